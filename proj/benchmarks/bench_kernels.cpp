#include <random>

#include <benchmark/benchmark.h>

#include "oven/modes.hpp"
#include "oven/thermal.hpp"
#include "oven/xmap.hpp"
#include "oven/yee.hpp"

using namespace oven;

namespace {

// Prototype cavity at the given resolution.
struct Fixture {
  explicit Fixture(double cpw) {
    GridOptions o;
    o.cells_per_wavelength = cpw;
    grid = auto_grid(scene, lib, 10.8e9, o);
    vox = voxelize(scene, grid, lib);
    medium = build_medium(vox, 10.4e9, scene.ambient_T);
  }
  MaterialLibrary lib = MaterialLibrary::bundled();
  Scene scene = prototype_scene(true);
  YeeGrid grid;
  VoxelModel vox;
  CellMedium medium;
};

template <class Real>
void BM_YeeStep(benchmark::State& st) {
  const Fixture fx(static_cast<double>(st.range(0)));
  YeeOptions yo;
  yo.open_end = true;
  YeeSolver<Real> s(fx.grid, fx.medium, yo);
  s.set_probe(probe_edges(fx.scene.probe, fx.grid));
  for (auto _ : st) s.step(1.0);
  st.counters["cells"] = static_cast<double>(fx.grid.cells());
  st.counters["Mcell/s"] = benchmark::Counter(static_cast<double>(fx.grid.cells()) * st.iterations() * 1e-6,
                                              benchmark::Counter::kIsRate);
}
BENCHMARK_TEMPLATE(BM_YeeStep, float)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_YeeStep, double)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_MapPower(benchmark::State& st) {
  const Fixture fx(15);
  const ThermalGrid tg = coincident_thermal_grid(fx.vox, {static_cast<int>(st.range(0)), static_cast<int>(st.range(0)), 2});
  const Mapping m = build_mapping(fx.grid, tg, fx.vox.load_mask);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> q(fx.grid.cells());
  for (double& v : q) v = U(rng);
  for (auto _ : st) benchmark::DoNotOptimize(map_power(m, q));
  st.counters["entries"] = static_cast<double>(m.entries.size());
}
BENCHMARK(BM_MapPower)->Arg(1)->Arg(3);

void BM_BuildMapping(benchmark::State& st) {
  const Fixture fx(15);
  const ThermalGrid tg = coincident_thermal_grid(fx.vox, {3, 3, 2});
  for (auto _ : st) benchmark::DoNotOptimize(build_mapping(fx.grid, tg, fx.vox.load_mask));
}
BENCHMARK(BM_BuildMapping)->Unit(benchmark::kMillisecond);

void BM_HeatStep(benchmark::State& st) {
  const Fixture fx(15);
  const ThermalGrid tg = coincident_thermal_grid(fx.vox, {static_cast<int>(st.range(0)), static_cast<int>(st.range(0)), 2});
  const ThermalModel m = thermal_model(fx.scene, fx.lib, tg);
  ThermalState s = initial_state(m, 293.15);
  const std::vector<double> q(tg.cells(), 1e6);
  const double dt = max_stable_dt(m);
  for (auto _ : st) step_heat(m, s, q, dt);
  st.counters["cells"] = static_cast<double>(tg.cells());
}
BENCHMARK(BM_HeatStep)->Arg(1)->Arg(3);

void BM_ResonanceSearch(benchmark::State& st) {
  const CavitySpec spec{25.5e-3, 25.5e-3, 100e-3, 10e-3, 6.0};
  for (auto _ : st) benchmark::DoNotOptimize(solve_resonances(spec, 3, 3, 10.0e9, 10.8e9));
}
BENCHMARK(BM_ResonanceSearch)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
