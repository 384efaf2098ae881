// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <unistd.h>

#include "kgate/audit.hpp"
#include "kgate/graph.hpp"
#include "kgate/synth.hpp"

#ifndef KGATE_TEST_AUDIT_DIR
#define KGATE_TEST_AUDIT_DIR "audit-logs"
#endif

namespace kgate::testing {

namespace fs = std::filesystem;

/// Every audit log a test writes lands here so the acceptance run can replay
/// all of them.
inline fs::path audit_dir() {
    fs::path dir(KGATE_TEST_AUDIT_DIR);
    fs::create_directories(dir);
    return dir;
}

inline fs::path fresh_audit_path(const std::string& stem) {
    static std::atomic<unsigned> counter{0};
    return audit_dir() / (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".jsonl");
}

inline std::unique_ptr<AuditLog> file_audit_log(const std::string& stem) {
    return std::make_unique<AuditLog>(fresh_audit_path(stem));
}

/// A scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& stem = "kgate-test") {
        static std::atomic<unsigned> counter{0};
        path_ = fs::temp_directory_path() /
                (stem + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

/// The seed-42 default cohort, generated once per process.
inline const PropertyGraph& default_graph() {
    static const PropertyGraph graph = synth::generate(synth::GeneratorConfig{});
    return graph;
}

/// A small cohort that keeps end-to-end runs fast.
inline synth::GeneratorConfig small_config(std::uint64_t seed, std::size_t subjects = 12) {
    synth::GeneratorConfig c;
    c.seed = seed;
    c.n_subjects = subjects;
    c.n_control_samples = 2;
    c.disease_vocab_size = 40;
    c.n_genes = 30;
    c.n_proteins = 60;
    c.n_phenotypes = 20;
    c.mean_proteins_per_sample = 6.0;
    return c;
}

/// Subject -> sample -> disease, with explicit ids for hand-built fixtures.
struct TinyCohort {
    PropertyGraph graph;
    NodeId control;
    std::vector<NodeId> diseases;
    std::vector<NodeId> subjects;
    std::vector<NodeId> samples;

    NodeId add_disease(const std::string& name, TextList synonyms = {}) {
        Properties p{{"name", name}};
        if (!synonyms.empty()) p["synonyms"] = std::move(synonyms);
        auto id = graph.add_node(NodeLabel::Disease, std::move(p));
        diseases.push_back(id);
        return id;
    }

    NodeId add_sample(const std::string& subject_id) {
        auto s = graph.add_node(NodeLabel::Subject, {{"subject_id", subject_id}});
        auto b = graph.add_node(NodeLabel::BiologicalSample, {});
        graph.add_edge(b, EdgeType::BelongsToSubject, s);
        subjects.push_back(s);
        samples.push_back(b);
        return b;
    }

    void diagnose(NodeId sample, NodeId disease) { graph.add_edge(sample, EdgeType::HasDisease, disease); }
};

inline TinyCohort tiny_cohort() {
    TinyCohort c;
    c.control = c.graph.add_node(NodeLabel::Disease, {{"name", std::string(kControlDiseaseName)}});
    return c;
}

}  // namespace kgate::testing
