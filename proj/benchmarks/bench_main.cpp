#include <nvb/builtin.hpp>
#include <nvb/driver.hpp>
#include <nvb/refine.hpp>
#include <nvb/stability.hpp>

#include <benchmark/benchmark.h>

#include <set>

using namespace nvb;

namespace {

// Corner-graded L-shape after `steps` Doerfler steps.
const Mesh & graded_mesh(std::size_t steps)
{
    static std::vector<Mesh> meshes = [] {
        RunConfig c = lshape_corner_config();
        return run_refinement(lshape6(), c).meshes;
    }();
    return meshes[steps];
}

Mesh uniform_mesh(int levels)
{
    Mesh m = lshape6();
    for (int i = 0; i < levels; ++i)
        m = uniform(m, UniformKind::bisec3);
    return m;
}

std::set<ElemId> every_tenth(const Mesh & m)
{
    std::set<ElemId> s;
    for (ElemId t = 0; t < m.num_elements(); t += 10)
        s.insert(t);
    return s;
}

void BM_CloseMarks(benchmark::State & state)
{
    const Mesh m = uniform_mesh(static_cast<int>(state.range(0)));
    const auto marking = mark_reference_edges(m, every_tenth(m));
    for (auto _ : state)
        benchmark::DoNotOptimize(close_marks(m, marking, ClosureMode::nvb));
    state.counters["elements"] = static_cast<double>(m.num_elements());
}
BENCHMARK(BM_CloseMarks)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_RefineStep(benchmark::State & state)
{
    const Mesh m = uniform_mesh(static_cast<int>(state.range(0)));
    const auto marking = mark_all_edges(m, every_tenth(m));
    for (auto _ : state)
        benchmark::DoNotOptimize(refine_step(m, marking, Dialect::refine, PatternPolicy::always_red()));
    state.counters["elements"] = static_cast<double>(m.num_elements());
}
BENCHMARK(BM_RefineStep)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_ComputeWeights(benchmark::State & state)
{
    const Mesh & m = graded_mesh(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_weights(m));
    state.counters["elements"] = static_cast<double>(m.num_elements());
}
BENCHMARK(BM_ComputeWeights)->Arg(10)->Arg(20)->Arg(25)->Unit(benchmark::kMicrosecond);

void BM_AssembleNested(benchmark::State & state)
{
    const Mesh & coarse = graded_mesh(static_cast<std::size_t>(state.range(0)));
    const Mesh fine = uniform(uniform(coarse, UniformKind::bisec3), UniformKind::bisec3);
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_nested(coarse, fine));
    state.counters["fine_elements"] = static_cast<double>(fine.num_elements());
}
BENCHMARK(BM_AssembleNested)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_H1Stability(benchmark::State & state)
{
    const Mesh & coarse = graded_mesh(static_cast<std::size_t>(state.range(0)));
    const Mesh fine = uniform(uniform(coarse, UniformKind::bisec3), UniformKind::bisec3);
    const auto system = assemble_nested(coarse, fine);
    for (auto _ : state)
        benchmark::DoNotOptimize(measure_h1_stability(system));
    state.counters["fine_elements"] = static_cast<double>(fine.num_elements());
}
BENCHMARK(BM_H1Stability)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
