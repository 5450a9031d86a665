#include <benchmark/benchmark.h>

#include "../tests/support.hpp"

using namespace fkt;
using namespace fkt::testing;

namespace {

const GradedModule& ck_module() {
    static const GradedModule M = fk_module(ck_z3_graph());
    return M;
}

const GradedModule& z4_module() {
    static const GradedModule M = [] {
        auto cat = builtin_category("Z4");
        return tensor_mod_k(coker_module(cat, z4_beta(*cat)), 3);
    }();
    return M;
}

const std::vector<int> kDegrees{0, 1, 2, 3};

void BM_TorSerialZ3(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tor_serial(ck_module(), kDegrees));
}
void BM_TorParallelZ3(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tor(ck_module(), kDegrees));
}
void BM_TorSerialZ4(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tor_serial(z4_module(), kDegrees));
}
void BM_TorParallelZ4(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(tor(z4_module(), kDegrees));
}

}

BENCHMARK(BM_TorSerialZ3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TorParallelZ3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TorSerialZ4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TorParallelZ4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
