// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <benchmark/benchmark.h>

#include "kgate/proto.hpp"
#include "kgate/query.hpp"
#include "kgate/refapp.hpp"
#include "kgate/synth.hpp"

namespace {

using namespace kgate;

const PropertyGraph& default_graph() {
    static const PropertyGraph g = synth::generate(synth::GeneratorConfig{});
    return g;
}

void BM_GenerateDefault(benchmark::State& state) {
    synth::GeneratorConfig c;
    for (auto _ : state) {
        c.seed++;
        benchmark::DoNotOptimize(synth::generate(c));
    }
}
BENCHMARK(BM_GenerateDefault)->Unit(benchmark::kMillisecond);

void BM_GenerateSubjects(benchmark::State& state) {
    synth::GeneratorConfig c;
    c.n_subjects = static_cast<std::size_t>(state.range(0));
    c.n_control_samples = c.n_subjects / 100;
    for (auto _ : state) benchmark::DoNotOptimize(synth::generate(c));
}
BENCHMARK(BM_GenerateSubjects)->RangeMultiplier(4)->Range(100, 6400)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state, std::string_view text) {
    const auto& g = default_graph();
    const auto ast = qlang::parse(text);
    std::uint64_t steps = 0;
    for (auto _ : state) {
        auto result = qlang::evaluate(g, ast, qlang::Budget::production());
        steps = result.steps_used;
        benchmark::DoNotOptimize(result);
    }
    state.counters["steps"] = static_cast<double>(steps);
}
BENCHMARK_CAPTURE(BM_Evaluate, disease_hop, refapp::kDiseaseQuery)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Evaluate, subjects, refapp::kSubjectQuery)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Evaluate, protein_filter,
                  "MATCH (b:Biological_Sample)-[r:HAS_PROTEIN]->(p:Protein) WHERE r.score > 10 RETURN b, p.name")
    ->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Evaluate, disease_scan, "MATCH (d:Disease) WHERE d.name CONTAINS \"99\" RETURN d.name")
    ->Unit(benchmark::kMicrosecond);

void BM_ParsePrint(benchmark::State& state) {
    const std::string text(refapp::kDiseaseQuery);
    for (auto _ : state) benchmark::DoNotOptimize(qlang::pretty_print(qlang::parse(text)));
}
BENCHMARK(BM_ParsePrint);

proto::Rows sample_rows() {
    const auto& g = default_graph();
    auto table = qlang::evaluate(g, qlang::parse(refapp::kDiseaseQuery), qlang::Budget::production());
    return {1, table.columns, table.rows, table.truncated};
}

void BM_EncodeRows(benchmark::State& state) {
    const proto::Message m = sample_rows();
    std::size_t bytes = 0;
    for (auto _ : state) {
        auto frame = proto::encode(m);
        bytes = frame.size();
        benchmark::DoNotOptimize(frame);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes));
}
BENCHMARK(BM_EncodeRows);

void BM_DecodeRows(benchmark::State& state) {
    const auto frame = proto::encode(sample_rows());
    for (auto _ : state) benchmark::DoNotOptimize(proto::decode(frame));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * frame.size()));
}
BENCHMARK(BM_DecodeRows);

}  // namespace

BENCHMARK_MAIN();
