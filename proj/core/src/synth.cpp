// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "kgate/csv.hpp"
#include "kgate/rng.hpp"

namespace kgate::synth {

namespace {

std::string zero_pad(std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return digits;
}

bool valid_icd10(std::string_view code) {
    return !code.empty() && std::isupper(static_cast<unsigned char>(code.front()));
}

TextList synonyms_for(const std::set<std::string>& icd10, const std::set<std::string>& icd9) {
    TextList out;
    for (const auto& c : icd10) out.push_back("ICD10:" + c);
    for (const auto& c : icd9) out.push_back("ICD9:" + c);
    return out;
}

Properties disease_properties(const std::string& name, const TextList& synonyms) {
    Properties props{{"name", name}};
    if (!synonyms.empty()) props.emplace("synonyms", synonyms);
    return props;
}

/// Looks up columns by header name so column order in input files is free.
class Table {
public:
    Table(std::string_view text, std::string file, std::initializer_list<std::string_view> required)
        : file_(std::move(file)) {
        try {
            records_ = csv::parse(text);
        } catch (const csv::CsvError& e) {
            throw SynthError(SynthErrc::MalformedCsv, e.what(), file_, e.line());
        }
        if (records_.empty()) throw SynthError(SynthErrc::MalformedCsv, "missing header row", file_, 1);
        const auto& header = records_.front().fields;
        for (auto name : required) {
            auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw SynthError(SynthErrc::MalformedCsv, "header lacks column '" + std::string(name) + "'", file_,
                                 records_.front().line);
            }
            columns_.push_back(static_cast<std::size_t>(it - header.begin()));
        }
        for (std::size_t r = 1; r < records_.size(); ++r) {
            if (records_[r].fields.size() != header.size()) {
                throw SynthError(SynthErrc::MalformedCsv,
                                 "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(records_[r].fields.size()),
                                 file_, records_[r].line);
            }
        }
    }

    std::size_t rows() const { return records_.size() - 1; }
    const std::string& cell(std::size_t row, std::size_t column) const {
        return records_[row + 1].fields[columns_[column]];
    }
    std::size_t line(std::size_t row) const { return records_[row + 1].line; }
    [[noreturn]] void fail(std::size_t row, const std::string& what) const {
        throw SynthError(SynthErrc::MalformedCsv, what, file_, line(row));
    }

private:
    std::string file_;
    std::vector<csv::Record> records_;
    std::vector<std::size_t> columns_;
};

}  // namespace

std::string_view to_string(SynthErrc code) {
    switch (code) {
        case SynthErrc::InvalidConfig: return "InvalidConfig";
        case SynthErrc::EmptyVocab: return "EmptyVocab";
        case SynthErrc::MalformedCsv: return "MalformedCsv";
        case SynthErrc::DanglingReference: return "DanglingReference";
        case SynthErrc::IoFailure: return "IoFailure";
        case SynthErrc::CorruptRecord: return "CorruptRecord";
        case SynthErrc::UnrepresentableValue: return "UnrepresentableValue";
    }
    return "Unknown";
}

SynthError::SynthError(SynthErrc code, const std::string& message, std::string file, std::size_t line)
    : std::runtime_error(std::string(to_string(code)) + ": " + (file.empty() ? "" : file + ":") +
                         (line == 0 ? "" : std::to_string(line) + ": ") + message),
      code_(code),
      file_(std::move(file)),
      line_(line) {}

void validate(const GeneratorConfig& c) {
    auto fail = [](const std::string& what) { throw SynthError(SynthErrc::InvalidConfig, what); };
    if (c.n_subjects == 0) fail("n_subjects must be positive");
    if (c.n_control_samples > c.n_subjects) fail("n_control_samples exceeds n_subjects");
    if (c.disease_vocab_size == 0) fail("disease_vocab_size must be positive");
    if (c.n_genes == 0 || c.n_proteins == 0 || c.n_phenotypes == 0) fail("vocabulary sizes must be positive");
    for (double mean : {c.mean_genes_per_sample, c.mean_proteins_per_sample, c.mean_phenotypes_per_sample}) {
        if (!(mean > 0.0) || !std::isfinite(mean)) fail("mean link counts must be positive");
    }
    if (!(c.score_min < c.score_max)) fail("score_min must be below score_max");
    if (c.score_min < kScoreMin || c.score_max > kScoreMax) fail("scores must lie within [1, 20]");
}

std::vector<DiseaseVocabEntry> synthesize_vocab(std::size_t count) {
    std::vector<DiseaseVocabEntry> vocab;
    vocab.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        DiseaseVocabEntry e;
        e.name = "Synthetic disease " + zero_pad(i, 5);
        const std::size_t k = i - 1;
        if (i % 7 != 0) {
            e.icd10 = std::string(1, static_cast<char>('A' + k % 26)) + zero_pad((k / 26) % 100, 2) + "." +
                      std::to_string((k / 2600) % 10);
        }
        if (i % 3 != 0) e.icd9 = zero_pad(k % 1000, 3) + "." + std::to_string((k / 1000) % 10);
        vocab.push_back(std::move(e));
    }
    return vocab;
}

std::vector<DiseaseVocabEntry> parse_vocab_csv(std::string_view text, const std::string& file) {
    Table table(text, file, {"name", "icd10", "icd9"});
    std::vector<DiseaseVocabEntry> vocab;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        DiseaseVocabEntry e;
        e.name = table.cell(r, 0);
        if (e.name.empty()) table.fail(r, "disease name is empty");
        if (!table.cell(r, 1).empty()) {
            if (!valid_icd10(table.cell(r, 1))) table.fail(r, "ICD-10 code must begin with an uppercase letter");
            e.icd10 = table.cell(r, 1);
        }
        if (!table.cell(r, 2).empty()) e.icd9 = table.cell(r, 2);
        vocab.push_back(std::move(e));
    }
    if (vocab.empty()) throw SynthError(SynthErrc::EmptyVocab, "vocabulary has no entries", file);
    return vocab;
}

std::string subject_id_for(std::size_t index, std::size_t n_subjects) {
    const std::size_t width = std::max<std::size_t>(3, std::to_string(n_subjects).size());
    return "S" + zero_pad(index + 1, width);
}

PropertyGraph generate(const GeneratorConfig& config, std::optional<std::span<const DiseaseVocabEntry>> vocab) {
    validate(config);

    std::vector<DiseaseVocabEntry> synthesized;
    std::span<const DiseaseVocabEntry> diseases;
    if (vocab) {
        if (vocab->empty()) throw SynthError(SynthErrc::EmptyVocab, "vocabulary has no entries");
        diseases = *vocab;
    } else {
        synthesized = synthesize_vocab(config.disease_vocab_size - 1);
        diseases = synthesized;
    }
    if (diseases.empty() && config.n_control_samples < config.n_subjects) {
        throw SynthError(SynthErrc::InvalidConfig, "no non-control diseases to assign");
    }

    Rng rng(config.seed);
    PropertyGraph g;

    const NodeId control = g.add_node(NodeLabel::Disease, {{"name", std::string(kControlDiseaseName)}});
    std::vector<NodeId> disease_ids;
    disease_ids.reserve(diseases.size());
    for (const auto& d : diseases) {
        if (d.name == kControlDiseaseName) {
            throw SynthError(SynthErrc::InvalidConfig, "vocabulary must not contain the control disease");
        }
        std::set<std::string> icd10, icd9;
        if (d.icd10) icd10.insert(*d.icd10);
        if (d.icd9) icd9.insert(*d.icd9);
        disease_ids.push_back(g.add_node(NodeLabel::Disease, disease_properties(d.name, synonyms_for(icd10, icd9))));
    }

    auto add_vocab = [&](NodeLabel label, std::size_t count, auto&& name_of) {
        std::vector<NodeId> ids;
        ids.reserve(count);
        for (std::size_t i = 1; i <= count; ++i) ids.push_back(g.add_node(label, {{"name", name_of(i)}}));
        return ids;
    };
    const auto genes = add_vocab(NodeLabel::Gene, config.n_genes, [](std::size_t i) { return "G" + zero_pad(i, 5); });
    const auto proteins =
        add_vocab(NodeLabel::Protein, config.n_proteins, [](std::size_t i) { return "P" + zero_pad(i, 5); });
    const auto phenotypes =
        add_vocab(NodeLabel::Phenotype, config.n_phenotypes, [](std::size_t i) { return "HP:" + zero_pad(i, 7); });

    std::vector<NodeId> subjects, samples;
    for (std::size_t i = 0; i < config.n_subjects; ++i) {
        subjects.push_back(g.add_node(NodeLabel::Subject, {{"subject_id", subject_id_for(i, config.n_subjects)}}));
        samples.push_back(g.add_node(NodeLabel::BiologicalSample, {}));
    }

    const auto control_picks = rng.sample(config.n_control_samples, config.n_subjects);
    const std::set<std::uint64_t> control_set(control_picks.begin(), control_picks.end());
    std::vector<NodeId> diagnosis(config.n_subjects, control);
    for (std::size_t i = 0; i < config.n_subjects; ++i) {
        if (!control_set.contains(i)) diagnosis[i] = disease_ids[rng.below(disease_ids.size())];
    }

    const auto cents_min = static_cast<std::uint64_t>(std::llround(config.score_min * 100.0));
    const auto cents_max = static_cast<std::uint64_t>(std::llround(config.score_max * 100.0));
    auto draw_score = [&] {
        return static_cast<double>(cents_min + rng.below(cents_max - cents_min + 1)) / 100.0;
    };
    auto draw_count = [&](double mean, std::size_t cap) {
        return std::clamp<std::uint64_t>(rng.poisson(mean), 1, cap);
    };

    for (std::size_t i = 0; i < config.n_subjects; ++i) {
        const NodeId bs = samples[i];
        g.add_edge(bs, EdgeType::BelongsToSubject, subjects[i]);
        g.add_edge(bs, EdgeType::HasDisease, diagnosis[i]);

        for (auto t : rng.sample(draw_count(config.mean_genes_per_sample, genes.size()), genes.size())) {
            g.add_edge(bs, EdgeType::HasDamage, genes[t], {{"score", draw_score()}});
        }
        for (auto t : rng.sample(draw_count(config.mean_proteins_per_sample, proteins.size()), proteins.size())) {
            g.add_edge(bs, EdgeType::HasProtein, proteins[t], {{"score", draw_score()}});
        }
        for (auto t :
             rng.sample(draw_count(config.mean_phenotypes_per_sample, phenotypes.size()), phenotypes.size())) {
            g.add_edge(bs, EdgeType::HasPhenotype, phenotypes[t]);
        }
    }
    return g;
}

IngestBundle parse_bundle(std::string_view subjects_csv, std::string_view diagnoses_csv,
                          std::string_view phenotypes_csv) {
    IngestBundle bundle;

    Table subjects(subjects_csv, "subjects.csv", {"subject_id"});
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < subjects.rows(); ++r) {
        const auto& sid = subjects.cell(r, 0);
        if (sid.empty()) subjects.fail(r, "subject_id is empty");
        if (!seen.insert(sid).second) subjects.fail(r, "duplicate subject_id '" + sid + "'");
        bundle.subjects.push_back(sid);
    }

    Table diagnoses(diagnoses_csv, "diagnoses.csv", {"subject_id", "icd10_code", "disease_name"});
    for (std::size_t r = 0; r < diagnoses.rows(); ++r) {
        DiagnosisRow row{diagnoses.cell(r, 0), diagnoses.cell(r, 1), diagnoses.cell(r, 2)};
        if (row.disease_name.empty()) diagnoses.fail(r, "disease_name is empty");
        if (!row.icd10_code.empty() && !valid_icd10(row.icd10_code)) {
            diagnoses.fail(r, "ICD-10 code must begin with an uppercase letter");
        }
        bundle.diagnoses.push_back(std::move(row));
    }

    Table phenotypes(phenotypes_csv, "phenotypes.csv", {"subject_id", "hpo_term"});
    for (std::size_t r = 0; r < phenotypes.rows(); ++r) {
        PhenotypeRow row{phenotypes.cell(r, 0), phenotypes.cell(r, 1)};
        if (row.hpo_term.empty()) phenotypes.fail(r, "hpo_term is empty");
        bundle.phenotypes.push_back(std::move(row));
    }
    return bundle;
}

IngestBundle read_bundle(const std::filesystem::path& subjects, const std::filesystem::path& diagnoses,
                         const std::filesystem::path& phenotypes) {
    return parse_bundle(read_file(subjects), read_file(diagnoses), read_file(phenotypes));
}

PropertyGraph ingest(const IngestBundle& bundle, std::optional<std::span<const DiseaseVocabEntry>> vocab) {
    std::unordered_map<std::string, const DiseaseVocabEntry*> vocab_by_name;
    if (vocab) {
        for (const auto& e : *vocab) vocab_by_name.emplace(e.name, &e);
    }

    PropertyGraph g;
    std::unordered_map<std::string, NodeId> sample_of;
    for (const auto& sid : bundle.subjects) {
        const NodeId subject = g.add_node(NodeLabel::Subject, {{"subject_id", sid}});
        const NodeId bs = g.add_node(NodeLabel::BiologicalSample, {});
        g.add_edge(bs, EdgeType::BelongsToSubject, subject);
        sample_of.emplace(sid, bs);
    }
    auto sample_for = [&](const std::string& sid) {
        auto it = sample_of.find(sid);
        if (it == sample_of.end()) {
            throw SynthError(SynthErrc::DanglingReference, "subject_id '" + sid + "' is not in subjects.csv");
        }
        return it->second;
    };

    // Distinct diseases in first-appearance order, with every code seen for them.
    struct DiseaseCodes {
        std::set<std::string> icd10, icd9;
    };
    std::vector<std::string> disease_order;
    std::map<std::string, DiseaseCodes> disease_codes;
    for (const auto& row : bundle.diagnoses) {
        sample_for(row.subject_id);
        auto [it, fresh] = disease_codes.try_emplace(row.disease_name);
        if (fresh) disease_order.push_back(row.disease_name);
        if (!row.icd10_code.empty()) it->second.icd10.insert(row.icd10_code);
    }
    std::unordered_map<std::string, NodeId> disease_ids;
    for (const auto& name : disease_order) {
        auto& codes = disease_codes[name];
        if (auto v = vocab_by_name.find(name); v != vocab_by_name.end()) {
            if (v->second->icd10) codes.icd10.insert(*v->second->icd10);
            if (v->second->icd9) codes.icd9.insert(*v->second->icd9);
        }
        disease_ids.emplace(name, g.add_node(NodeLabel::Disease,
                                             disease_properties(name, synonyms_for(codes.icd10, codes.icd9))));
    }

    std::vector<std::string> phenotype_order;
    std::unordered_map<std::string, NodeId> phenotype_ids;
    for (const auto& row : bundle.phenotypes) {
        sample_for(row.subject_id);
        if (!phenotype_ids.contains(row.hpo_term)) {
            phenotype_ids.emplace(row.hpo_term, NodeId{});
            phenotype_order.push_back(row.hpo_term);
        }
    }
    for (const auto& term : phenotype_order) {
        phenotype_ids[term] = g.add_node(NodeLabel::Phenotype, {{"name", term}});
    }

    std::set<std::pair<std::uint64_t, std::uint64_t>> linked;
    for (const auto& row : bundle.diagnoses) {
        const NodeId bs = sample_for(row.subject_id);
        const NodeId d = disease_ids.at(row.disease_name);
        if (linked.insert({bs.value, d.value}).second) g.add_edge(bs, EdgeType::HasDisease, d);
    }
    for (const auto& row : bundle.phenotypes) {
        const NodeId bs = sample_for(row.subject_id);
        const NodeId p = phenotype_ids.at(row.hpo_term);
        if (linked.insert({bs.value, p.value}).second) g.add_edge(bs, EdgeType::HasPhenotype, p);
    }
    return g;
}

}  // namespace kgate::synth
