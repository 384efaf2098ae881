// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgate/graph.hpp"

namespace kgate::synth {

/// Defaults reproduce the synthetic clinical cohort: 100 subjects with one
/// sample each, one control sample, 10,792 Disease nodes including control.
struct GeneratorConfig {
    std::uint64_t seed = 42;
    std::size_t n_subjects = 100;
    std::size_t n_control_samples = 1;
    /// Total Disease nodes when no vocabulary is supplied, control included.
    std::size_t disease_vocab_size = 10'792;
    std::size_t n_genes = 5'000;
    std::size_t n_proteins = 5'000;
    std::size_t n_phenotypes = 1'000;
    double mean_genes_per_sample = 5.0;
    double mean_proteins_per_sample = 50.0;
    double mean_phenotypes_per_sample = 3.0;
    double score_min = 1.0;
    double score_max = 20.0;
};

struct DiseaseVocabEntry {
    std::string name;
    std::optional<std::string> icd10;
    std::optional<std::string> icd9;
    friend bool operator==(const DiseaseVocabEntry&, const DiseaseVocabEntry&) = default;
};

struct DiagnosisRow {
    std::string subject_id;
    std::string icd10_code;  // may be empty
    std::string disease_name;
};

struct PhenotypeRow {
    std::string subject_id;
    std::string hpo_term;
};

/// Already-parsed ingestion tables.
struct IngestBundle {
    std::vector<std::string> subjects;
    std::vector<DiagnosisRow> diagnoses;
    std::vector<PhenotypeRow> phenotypes;
};

enum class SynthErrc {
    InvalidConfig,
    EmptyVocab,
    MalformedCsv,
    DanglingReference,
    IoFailure,
    CorruptRecord,
    UnrepresentableValue,
};

std::string_view to_string(SynthErrc code);

class SynthError : public std::runtime_error {
public:
    SynthError(SynthErrc code, const std::string& message, std::string file = {}, std::size_t line = 0);
    SynthErrc code() const noexcept { return code_; }
    const std::string& file() const noexcept { return file_; }
    /// 1-based; 0 when the error is not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    SynthErrc code_;
    std::string file_;
    std::size_t line_;
};

void validate(const GeneratorConfig& config);

/// Deterministic stand-in vocabulary of `count` non-control diseases.
std::vector<DiseaseVocabEntry> synthesize_vocab(std::size_t count);

/// CSV with header "name,icd10,icd9"; empty code cells mean absent.
std::vector<DiseaseVocabEntry> parse_vocab_csv(std::string_view text, const std::string& file = "vocab.csv");

/// Subject and Biological_Sample ids for the i-th (0-based) subject, e.g. "S001".
std::string subject_id_for(std::size_t index, std::size_t n_subjects);

/// Seeded synthetic graph. Node ids: control Disease, vocabulary diseases,
/// genes, proteins, phenotypes, then each Subject followed by its sample.
/// Draw order: control selection, per-sample disease, then per sample in id
/// order its genes (with scores), proteins (with scores), and phenotypes.
PropertyGraph generate(const GeneratorConfig& config,
                       std::optional<std::span<const DiseaseVocabEntry>> vocab = std::nullopt);

IngestBundle parse_bundle(std::string_view subjects_csv, std::string_view diagnoses_csv,
                          std::string_view phenotypes_csv);
IngestBundle read_bundle(const std::filesystem::path& subjects, const std::filesystem::path& diagnoses,
                         const std::filesystem::path& phenotypes);

PropertyGraph ingest(const IngestBundle& bundle,
                     std::optional<std::span<const DiseaseVocabEntry>> vocab = std::nullopt);

/// JSONL dump: nodes then edges, ids ascending, one object per LF-terminated line.
void write_jsonl(const PropertyGraph& graph, std::ostream& out);
std::string to_jsonl(const PropertyGraph& graph);
PropertyGraph read_jsonl(std::istream& in);
PropertyGraph from_jsonl(std::string_view text);

void export_jsonl(const PropertyGraph& graph, const std::filesystem::path& destination);
PropertyGraph load_jsonl(const std::filesystem::path& source);

/// File stem for a label ("biological_sample") and an edge type
/// ("biological_sample_has_disease").
std::string csv_stem(NodeLabel label);
std::string csv_stem(EdgeType type);

/// Writes one <label>.csv per label and one <src>_<type>.csv per edge type.
std::vector<std::filesystem::path> export_csv(const PropertyGraph& graph, const std::filesystem::path& directory);
PropertyGraph import_csv(const std::filesystem::path& directory);

std::string read_file(const std::filesystem::path& path);

}  // namespace kgate::synth
