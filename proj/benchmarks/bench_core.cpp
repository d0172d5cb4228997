#include <benchmark/benchmark.h>

#include "latinhib/channel1d.hpp"
#include "latinhib/graph.hpp"
#include "latinhib/network.hpp"
#include "latinhib/patterning.hpp"
#include "latinhib/sweep.hpp"

using namespace latinhib;

namespace {

constexpr double D = 4.9e-10;

void BM_FixedPointSearch(benchmark::State& state) {
    const NetworkModel m(CompartmentGraph::pair(500e-6, 1.0, D), ParameterSet{});
    const ReducedMaps maps = reduced_maps(m);
    for (auto _ : state) benchmark::DoNotOptimize(find_fixed_points(maps));
}
BENCHMARK(BM_FixedPointSearch);

void BM_NetworkRhs(benchmark::State& state) {
    const NetworkModel m(CompartmentGraph::parallelogram(500e-6, 700e-6, 1.0, D), ParameterSet{});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(m.layout().size(), 1e-10);
    Eigen::VectorXd dy(y.size());
    for (auto _ : state) {
        network_rhs(m, y, dy);
        benchmark::DoNotOptimize(dy.data());
    }
}
BENCHMARK(BM_NetworkRhs);

void BM_NetworkJacobian(benchmark::State& state) {
    const NetworkModel m(CompartmentGraph::parallelogram(500e-6, 700e-6, 1.0, D), ParameterSet{});
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(m.layout().size(), 1e-10);
    for (auto _ : state) benchmark::DoNotOptimize(network_jacobian(m, y));
}
BENCHMARK(BM_NetworkJacobian);

void BM_SweepCell(benchmark::State& state) {
    const ParameterSet p;
    for (auto _ : state) benchmark::DoNotOptimize(classify_point(p, 5e-7, 500e-6, 1.0, D));
}
BENCHMARK(BM_SweepCell);

void BM_ChannelStep(benchmark::State& state) {
    ChannelGeometry g;
    g.cells = static_cast<std::size_t>(state.range(0));
    ChannelField f = ChannelField::uniform(g, ChannelEnd::reservoir, ChannelEnd::reservoir, 1e-9);
    ChannelStepper s(g, ChannelEnd::reservoir, ChannelEnd::reservoir, 7.7e-4);
    for (auto _ : state) benchmark::DoNotOptimize(s.step(f, 10.0, 1e-12));
}
BENCHMARK(BM_ChannelStep)->Arg(50)->Arg(200)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
