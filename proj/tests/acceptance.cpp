// Acceptance checks, one criterion per invocation: `acceptance <n>`.
// Sub-checks print indented; the last line is the single verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "cda/config.hpp"
#include "cda/kse.hpp"
#include "cda/nse.hpp"
#include "cda/output.hpp"
#include "cda/twin_lab.hpp"
#include "invariant_suite.hpp"
#include "oracles.hpp"
#include "report.hpp"

using namespace cda;
using check::fmt;
using check::Report;
namespace fs = std::filesystem;

namespace {

constexpr double kKseSpinUp = 1000.0;
constexpr double kNseSpinUp = 300.0;

NseParams small_nse() {
  NseParams p;
  p.n = 32;
  p.nu = 0.05;
  p.f0 = 0.5;
  p.forcing_scaling = ForcingScaling::unit;
  p.k_f = {2, 1};
  return p;
}

SpectralField random_psi(const WaveGrid& g, std::uint64_t seed, double amplitude, int cutoff) {
  std::mt19937_64 gen(seed);
  auto psi = oracle::random_field(g, gen, cutoff, true);
  psi *= amplitude;
  return psi;
}

TwinConfig kse_default() {
  TwinConfig t = preset_config("kse-paper").twin;
  t.spin_up_time = kKseSpinUp;
  t.horizon = 100;
  t.record_stride = 10;
  return t;
}

std::string summary(const RunResult& r) {
  std::string s = to_string(r.status);
  if (!r.records.empty()) {
    const auto& e = r.records.back();
    s += fmt(", final obs %.3e unobs %.3e total %.3e", e.err_observed, e.err_unobserved,
             e.err_total);
  }
  return s + fmt(", %.1f s", r.total_seconds);
}

// 1: transforms against O(N^2d) sums, nonlinear terms against convolutions.
void spectral_oracles(Report& r) {
  std::mt19937_64 gen(101);
  for (const auto& g : {WaveGrid::line(32, 32 * std::numbers::pi),
                        WaveGrid::square(32, 2 * std::numbers::pi, -std::numbers::pi)}) {
    const auto u = oracle::random_samples(g, gen);
    const double d = oracle::max_abs_diff(to_spectral(g, u), oracle::dft(g, u));
    r.expect(std::string("forward transform vs direct DFT, ") + (g.dims() == 1 ? "1d" : "2d"),
             d < 1e-12, fmt("%.2e", d));
  }
  KseParams kp;
  kp.n = 32;
  const KseSolver kse(kp);
  const int kcut = kse.grid().dealias_cutoff();
  const auto u = oracle::random_field(kse.grid(), gen, kcut);
  const double dk = oracle::max_abs_diff(kse.nonlinear(u), oracle::kse_convolution(u, kcut));
  r.expect("kse -u u_x vs convolution sum", dk < 1e-11, fmt("%.2e", dk));

  const NseSolver nse(small_nse());
  const int ncut = nse.grid().dealias_cutoff();
  const auto psi = random_psi(nse.grid(), 102, 1.0, ncut);
  const auto slow = oracle::nse_advection(psi, ncut);
  const double scale = std::max(1.0, oracle::max_abs(slow));
  const double dn = oracle::max_abs_diff(nse.advection(psi), slow) / scale;
  r.expect("nse u . grad omega vs convolution sum, relative to max |coefficient|", dn < 1e-11,
           fmt("%.2e (max %.2e)", dn, scale));
}

// 2: self-convergence orders at T = 1.
void integrator_orders(Report& r) {
  {
    auto run = [](double dt, const SpectralField& u0) {
      KseParams p;
      p.dt = dt;
      KseSolver s(p);
      ModelState st{u0};
      for (long i = 0, n = std::lround(1.0 / dt); i < n; ++i) s.step(st);
      return st.field;
    };
    const auto u0 = KseSolver({}).initial_state().field;
    const auto ref = run(1e-5, u0);
    double prev = l2_norm(run(0.01, u0) - ref);
    for (double dt : {0.005, 0.0025}) {
      const double e = l2_norm(run(dt, u0) - ref);
      const double order = std::log2(prev / e);
      r.expect(fmt("integrating-factor Euler order at dt=%g", dt), std::abs(order - 1.0) <= 0.1,
               fmt("%.3f", order));
      prev = e;
    }
  }
  {
    auto p = small_nse();
    p.nu = 0.01;
    const auto psi0 = random_psi(NseSolver(p).grid(), 6, 0.03, 6);
    auto run = [&](double dt) {
      auto q = p;
      q.dt = dt;
      NseSolver s(q);
      ModelState st{psi0};
      for (long i = 0, n = std::lround(1.0 / dt); i < n; ++i) s.step(st);
      return st.field;
    };
    const auto ref = run(0.05 / 256);
    double prev = l2_norm(run(0.05) - ref);
    for (double dt : {0.025, 0.0125, 0.00625, 0.003125}) {
      const double e = l2_norm(run(dt) - ref);
      const double order = std::log2(prev / e);
      r.expect(fmt("ETDRK4 order at dt=%g", dt), order >= 3.8, fmt("%.3f", order));
      prev = e;
    }
  }
}

// 3: the spun-up reference is resolved to round-off at the dealiasing cutoff.
void resolution(Report& r) {
  const auto t = kse_default();
  const auto model = make_model(t);
  const auto u = generate_reference(t, *model).field;
  const int cut = model->grid().dealias_cutoff();
  double peak = 0.0, at_cut = 0.0;
  for (const auto& b : energy_spectrum(u)) {
    peak = std::max(peak, b.energy);
    if (b.shell == cut) at_cut = b.energy;
  }
  double amp_peak = 0.0;
  for (int k = 1; k <= cut; ++k) amp_peak = std::max(amp_peak, std::abs(u.at(k)));
  r.expect(fmt("shell energy at |k|=%g relative to peak", double(cut)), at_cut <= 1e-15 * peak,
           fmt("%.3e (amplitude ratio %.3e)", at_cut / peak, std::abs(u.at(cut)) / amp_peak));
}

// 4: noiseless KSE nudging reaches and holds 1e-10.
void kse_nudging(Report& r) {
  const auto res = run_twin_experiment(kse_default());
  r.expect("run completes", res.status == RunStatus::completed, summary(res));
  double first = -1.0;
  bool holds = true;
  for (const auto& e : res.records) {
    if (first < 0 && e.err_total < 1e-10) first = e.time;
    if (first >= 0 && !(e.err_total < 1e-10)) holds = false;
  }
  r.expect("total error below 1e-10 and stays there", first >= 0 && holds,
           fmt("first below at t=%g", first));
}

// 5: noiseless KSE EnKF accuracy and the inflation ordering of the plateau.
void kse_enkf(Report& r) {
  auto t = kse_default();
  t.method = Method::enkf;
  t.members = 32;
  t.sigma_E2 = 1e-16;
  std::vector<double> medians;
  for (double s2 : {1e-14, 1e-10, 1e-6}) {
    t.sigma_I2 = s2;
    const auto res = run_twin_experiment(t);
    r.expect(fmt("sigma_I2=%g completes", s2), res.status == RunStatus::completed, summary(res));
    if (res.records.empty()) return;
    const auto obs = stationary_stats(res.records, ErrorComponent::observed);
    const auto unobs = stationary_stats(res.records, ErrorComponent::unobserved);
    medians.push_back(obs.median);
    if (s2 == 1e-14) {
      const double final_unobs = res.records.back().err_unobserved;
      r.expect("unobserved error below 1e-12 at the horizon", final_unobs < 1e-12,
               fmt("%.3e", final_unobs));
      r.expect("observed plateau above unobserved", obs.median > unobs.median,
               fmt("median obs %.3e, unobs %.3e", obs.median, unobs.median));
    }
  }
  r.expect("observed plateau strictly increasing in sigma_I2",
           medians.size() == 3 && medians[0] < medians[1] && medians[1] < medians[2],
           fmt("%.3e, %.3e, %.3e", medians[0], medians[1], medians[2]));
}

// 6: K = M members cannot span the observed space.
void under_ensemble(Report& r) {
  auto t = kse_default();
  t.method = Method::enkf;
  t.members = 16;
  const auto res = run_twin_experiment(t);
  bool stagnates = !res.records.empty();
  for (const auto& e : res.records) stagnates = stagnates && e.err_total > 1e-2;
  r.expect("K=16 degenerates or stagnates above 1e-2",
           res.status == RunStatus::gain_degenerate || stagnates, summary(res));
}

// 7: with noisy observations a larger mu amplifies the noise.
void noise_amplification(Report& r) {
  auto t = kse_default();
  t.sigma_O2 = 1e-10;
  double med[2];
  int i = 0;
  for (double mu : {10.0, 100.0}) {
    t.mu = mu;
    const auto res = run_twin_experiment(t);
    med[i++] = stationary_stats(res.records, ErrorComponent::observed).median;
    r.expect(fmt("mu=%g completes", mu), res.status == RunStatus::completed, summary(res));
  }
  r.expect("median observed error at mu=100 exceeds mu=10", med[1] > med[0],
           fmt("%.3e vs %.3e", med[1], med[0]));
}

// 8: mu beyond 2/dt is unstable.
void cfl_failure(Report& r) {
  auto t = kse_default();
  t.mu = 400;
  const auto res = run_twin_experiment(t);
  r.expect("advisory flags mu=400 as unstable", res.cfl.status == CflStatus::unstable,
           res.cfl.summary());
  r.expect("blow-up guard trips", res.status == RunStatus::blow_up,
           summary(res) + fmt(", failure at t=%g", res.failure_time));
}

// 9: NSE nudging synchronizes to round-off in both components.
void nse_nudging(Report& r) {
  TwinConfig t = preset_config("nse-paper").twin;
  t.spin_up_time = kNseSpinUp;
  t.horizon = 50;
  t.record_stride = 100;
  const auto res = run_twin_experiment(t);
  r.expect("run completes", res.status == RunStatus::completed, summary(res));
  if (res.records.empty()) return;
  const auto& e = res.records.back();
  r.expect("observed error below 1e-10", e.err_observed < 1e-10, fmt("%.3e", e.err_observed));
  r.expect("unobserved error below 1e-10", e.err_unobserved < 1e-10,
           fmt("%.3e", e.err_unobserved));
}

// 10: desk-scale NSE EnKF, plus the measured cost against nudging.
void nse_enkf(Report& r) {
  ExperimentConfig cfg = preset_config("nse-paper");
  cfg.twin.spin_up_time = kNseSpinUp;
  cfg.twin.horizon = 20;
  cfg.twin.record_stride = 100;
  cfg.twin.observed_modes = 5;
  const fs::path out = fs::current_path() / "acceptance_out" / "c10";
  RunOptions quiet;
  quiet.quiet = true;
  quiet.allow_failures = true;

  cfg.twin.method = Method::enkf;
  cfg.twin.members = 170;
  cfg.output_dir = (out / "enkf").string();
  run_and_emit(cfg, quiet);
  cfg.twin.method = Method::nudging;
  cfg.output_dir = (out / "nudging").string();
  run_and_emit(cfg, quiet);

  auto load = [&](const char* m) {
    std::ifstream in(out / m / "run" / "manifest.json");
    return nlohmann::json::parse(in);
  };
  const auto enkf = load("enkf"), nudging = load("nudging");
  const auto recs = read_error_csv(out / "enkf" / "run" / "errors.csv");
  r.expect("EnKF run completes", enkf["termination"]["status"] == "completed",
           enkf["termination"].dump());
  if (recs.size() >= 2) {
    const double e0 = recs.front().err_unobserved, e1 = recs.back().err_unobserved;
    r.expect("unobserved error drops by at least 6 orders", e1 <= 1e-6 * e0,
             fmt("%.3e -> %.3e (%.2f orders)", e0, e1, std::log10(e0 / e1)));
  }

  const double te = enkf["timings_seconds"]["method"], tn = nudging["timings_seconds"]["method"];
  const nlohmann::json report = {
      {"observed_modes", enkf["derived"]["observed_modes"]},
      {"members", 170},
      {"steps", std::lround(cfg.twin.horizon / cfg.twin.dt())},
      {"enkf_method_seconds", te},
      {"nudging_method_seconds", tn},
      {"ratio", te / tn},
      {"enkf_manifest", (out / "enkf" / "run" / "manifest.json").string()},
      {"nudging_manifest", (out / "nudging" / "run" / "manifest.json").string()}};
  write_text_atomic(out / "cost_report.json", report.dump(2) + "\n");
  std::printf("  cost report: EnKF %.1f s, nudging %.2f s, ratio %.0f (%s)\n", te, tn, te / tn,
              (out / "cost_report.json").c_str());
}

void invariants(Report& r) { check::run_invariants(r); }

}  // namespace

int main(int argc, char** argv) {
  const std::function<void(Report&)> criteria[] = {
      spectral_oracles, integrator_orders, resolution,          kse_nudging,
      kse_enkf,         under_ensemble,    noise_amplification, cfl_failure,
      nse_nudging,      nse_enkf,          invariants};
  const char* names[] = {"spectral oracles",       "integrator orders",
                         "KSE resolution",         "KSE nudging, noiseless",
                         "KSE EnKF, noiseless",    "EnKF under-ensembling",
                         "noise amplification by mu", "CFL failure",
                         "NSE nudging, noiseless", "NSE EnKF desk-scale",
                         "invariant suites"};
  const int n = argc > 1 ? std::atoi(argv[1]) : 0;
  if (n < 1 || n > 11) {
    std::fprintf(stderr, "usage: acceptance <criterion 1-11>\n");
    return 2;
  }
  Report report("", "  ");
  const auto start = std::chrono::steady_clock::now();
  try {
    criteria[n - 1](report);
  } catch (const std::exception& e) {
    report.expect("unexpected exception", false, e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %d: %s (%.1f s)\n", report.ok() ? "PASS" : "FAIL", n, names[n - 1], secs);
  return report.ok() ? 0 : 1;
}
