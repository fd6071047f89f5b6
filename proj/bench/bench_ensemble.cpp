// Serial reference loops vs OpenMP kernels for the ensemble forecast and
// analysis. Both paths give bitwise-identical ensembles; only time differs.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <memory>

#include "cda/enkf.hpp"
#include "cda/kse.hpp"
#include "cda/nse.hpp"

namespace {

using namespace cda;

struct Setup {
  std::unique_ptr<ForwardModel> model;
  Projector projector;
  SpectralField obs;
};

Setup make_setup(bool nse) {
  Setup s{nullptr, {}, SpectralField(WaveGrid::line(4, 1.0))};
  ModelState truth{SpectralField(WaveGrid::line(4, 1.0))};
  if (nse) {
    NseParams p;
    p.n = 64;
    s.model = std::make_unique<NseSolver>(p);
    s.projector = {5};
  } else {
    s.model = std::make_unique<KseSolver>(KseParams{});
    s.projector = {16};
  }
  truth = s.model->initial_state();
  for (int i = 0; i < 2000; ++i) s.model->step(truth);
  s.obs = project(truth.field, s.projector, Part::observed);
  return s;
}

Setup& setup(bool nse) {
  static Setup kse = make_setup(false);
  static Setup ns = make_setup(true);
  return nse ? ns : kse;
}

// args: {model (0 kse, 1 nse), members, exec (0 serial, 1 parallel)}
void BM_Forecast(benchmark::State& state) {
  auto& s = setup(state.range(0) == 1);
  const Exec exec = state.range(2) ? Exec::parallel : Exec::serial;
  EnsembleKalmanFilter f(*s.model, {int(state.range(1)), 1e-16, 1e-14, s.projector}, 1, exec);
  Ensemble ens = f.init_ensemble(s.obs);
  for (auto _ : state) {
    ens.phase = EnsemblePhase::analysis;
    f.forecast(ens);
    benchmark::DoNotOptimize(ens.members.front().field[1]);
  }
  state.counters["threads"] = exec == Exec::parallel ? omp_get_max_threads() : 1;
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Analysis(benchmark::State& state) {
  auto& s = setup(state.range(0) == 1);
  const Exec exec = state.range(2) ? Exec::parallel : Exec::serial;
  EnsembleKalmanFilter f(*s.model, {int(state.range(1)), 1e-16, 1e-14, s.projector}, 1, exec);
  Ensemble ens = f.init_ensemble(s.obs);
  for (auto _ : state) {
    ens.phase = EnsemblePhase::forecast;
    f.analysis_step(ens, s.obs);
    benchmark::DoNotOptimize(ens.members.front().field[1]);
  }
  state.counters["threads"] = exec == Exec::parallel ? omp_get_max_threads() : 1;
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void ensemble_args(benchmark::internal::Benchmark* b) {
  for (int exec : {0, 1}) {
    b->Args({0, 32, exec});
    b->Args({0, 128, exec});
    b->Args({1, 64, exec});
  }
  b->ArgNames({"nse", "K", "omp"})->Unit(benchmark::kMillisecond);
}

BENCHMARK(BM_Forecast)->Apply(ensemble_args);
BENCHMARK(BM_Analysis)->Apply(ensemble_args);

}  // namespace

BENCHMARK_MAIN();
