#include "cda/output.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "cda/errors.hpp"

#ifndef CDA_VERSION
#define CDA_VERSION "unknown"
#endif

namespace cda {

namespace fs = std::filesystem;

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_error_csv(const fs::path& path, const std::vector<ErrorRecord>& records) {
  std::string text = "time,err_observed,err_unobserved,err_total\n";
  char line[128];
  for (const auto& r : records) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", r.time, r.err_observed,
                  r.err_unobserved, r.err_total);
    text += line;
  }
  write_text_atomic(path, text);
}

std::vector<ErrorRecord> read_error_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<ErrorRecord> out;
  while (std::getline(in, line)) {
    ErrorRecord r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &r.time, &r.err_observed, &r.err_unobserved,
                    &r.err_total) == 4)
      out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double kMachineEpsilon = 2.220446049250313e-16;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double component(const ErrorRecord& r, int panel) {
  return panel == 0 ? r.err_observed : panel == 1 ? r.err_unobserved : r.err_total;
}

}  // namespace

std::string render_error_plot_svg(const std::vector<PlotSeries>& series, const std::string& title) {
  const double panel_w = 360, panel_h = 280, margin_l = 62, margin_t = 48, gap = 40;
  const double width = margin_l + 3 * panel_w + 2 * gap + 20;
  const double height = margin_t + panel_h + 50 + 18.0 * double(series.size());

  double t_min = 0.0, t_max = 1.0;
  double lo = kMachineEpsilon, hi = 1.0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& r : s.records) {
      if (!any) t_min = t_max = r.time;
      any = true;
      t_min = std::min(t_min, r.time);
      t_max = std::max(t_max, r.time);
      for (int p = 0; p < 3; ++p) {
        const double v = component(r, p);
        if (v > 0 && std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
    }
  if (t_max <= t_min) t_max = t_min + 1.0;
  const double d_lo = std::floor(std::log10(lo)), d_hi = std::ceil(std::log10(hi));

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape_xml(title) << "</text>\n";
  const char* names[] = {"observed modes", "unobserved modes", "all modes"};
  for (int p = 0; p < 3; ++p) {
    const double x0 = margin_l + p * (panel_w + gap), y0 = margin_t;
    auto X = [&](double t) { return x0 + (t - t_min) / (t_max - t_min) * panel_w; };
    auto Y = [&](double v) {
      const double lv = std::log10(std::max(v, std::pow(10.0, d_lo)));
      return y0 + (d_hi - lv) / (d_hi - d_lo) * panel_h;
    };
    os << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"" << y0 - 8
       << "\" text-anchor=\"middle\">L2 error, " << names[p] << "</text>\n";
    os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << panel_w << "\" height=\""
       << panel_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    const int step = std::max(1, int(std::ceil((d_hi - d_lo) / 8)));
    for (int d = int(d_lo); d <= int(d_hi); d += step) {
      os << "<line x1=\"" << x0 << "\" x2=\"" << x0 + panel_w << "\" y1=\"" << Y(std::pow(10.0, d))
         << "\" y2=\"" << Y(std::pow(10.0, d)) << "\" stroke=\"#eee\"/>\n";
      if (p == 0)
        os << "<text x=\"" << x0 - 4 << "\" y=\"" << Y(std::pow(10.0, d)) + 4
           << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
      const double t = t_min + (t_max - t_min) * i / 4;
      os << "<text x=\"" << X(t) << "\" y=\"" << y0 + panel_h + 14 << "\" text-anchor=\"middle\">"
         << t << "</text>\n";
    }
    os << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"" << y0 + panel_h + 30
       << "\" text-anchor=\"middle\">time</text>\n";
    os << "<line x1=\"" << x0 << "\" x2=\"" << x0 + panel_w << "\" y1=\"" << Y(kMachineEpsilon)
       << "\" y2=\"" << Y(kMachineEpsilon) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << kPalette[s % 10]
         << "\" points=\"";
      for (const auto& r : series[s].records) {
        const double v = component(r, p);
        if (v > 0 && std::isfinite(v)) os << X(r.time) << "," << Y(v) << " ";
      }
      os << "\"/>\n";
    }
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = margin_t + panel_h + 50 + 18.0 * double(s);
    os << "<line x1=\"" << margin_l << "\" x2=\"" << margin_l + 24 << "\" y1=\"" << y - 4
       << "\" y2=\"" << y - 4 << "\" stroke=\"" << kPalette[s % 10] << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << margin_l + 30 << "\" y=\"" << y << "\">" << escape_xml(series[s].label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Manifest and runner

nlohmann::json run_manifest(const SweepPoint& point, const ExperimentConfig& cfg,
                            const RunResult& result) {
  ExperimentConfig resolved = cfg;
  resolved.twin = point.twin;
  resolved.sweep = {};
  const TwinConfig& t = point.twin;
  const auto model = make_model(t);

  nlohmann::json derived;
  derived["observed_modes"] = result.obs_modes;
  derived["observed_real_dof"] = 2 * result.obs_modes;
  derived["cfl"] = {{"status", result.cfl.status == CflStatus::pass       ? "pass"
                               : result.cfl.status == CflStatus::boundary ? "boundary"
                                                                          : "unstable"},
                    {"mu_bound", result.cfl.bound},
                    {"margin", std::isfinite(result.cfl.margin) ? nlohmann::json(result.cfl.margin)
                                                                : nlohmann::json(nullptr)}};
  derived["dealias_cutoff"] = model->grid().dealias_cutoff();
  if (t.model == ModelKind::nse) {
    derived["grashof"] = compute_grashof(t.nse);
    derived["grashof_convention"] = "f0 / (nu^2 lambda_1), lambda_1 = 1";
    derived["forcing_amplitude"] = t.nse.forcing_amplitude();
    derived["observed_variable"] = to_string(t.observed_field);
  }
  if (t.method == Method::enkf) derived["recommended_members"] = 2 * result.obs_modes;

  nlohmann::json status = {{"status", to_string(result.status)}};
  if (result.status != RunStatus::completed) {
    status["message"] = result.failure_message;
    status["failure_time"] = result.failure_time;
    if (result.failure_member >= 0) status["failure_member"] = result.failure_member;
  }

  return {{"tool", "cda"},
          {"version", CDA_VERSION},
          {"sweep_point", point.label},
          {"seed", t.seed},
          {"config", config_to_json(resolved)},
          {"termination", status},
          {"records", result.records.size()},
          {"timings_seconds",
           {{"spin_up", result.spin_up_seconds},
            {"method", result.method_seconds},
            {"total", result.total_seconds}}},
          {"derived", derived},
          {"outputs", {{"csv", "errors.csv"}, {"config", "config.json"}}}};
}

namespace {

std::string reference_key(const TwinConfig& t) {
  nlohmann::json j = twin_to_json(t)["model"];
  j["spin_up_time"] = t.spin_up_time;
  return j.dump();
}

}  // namespace

int run_and_emit(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto points = expand_sweep(cfg);
  for (const auto& p : points) p.twin.validate();
  const fs::path out_dir = cfg.output_dir;
  fs::create_directories(out_dir);
  const bool plots = options.emit_plots || cfg.emit_plots;

  // Spin-ups depend only on the model and spin-up length; share them.
  std::map<std::string, ModelState> references;
  for (const auto& p : points) {
    const std::string key = reference_key(p.twin);
    if (references.count(key)) continue;
    const auto model = make_model(p.twin);
    references.emplace(key, generate_reference(p.twin, *model));
  }

  const int workers = std::max(1, std::min<int>(cfg.workers, int(points.size())));
  std::vector<RunResult> results(points.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const auto& p = points[i];
      const fs::path dir = out_dir / p.dir;
      fs::create_directories(dir);
      TwinConfig twin = p.twin;
      // Concurrent sweep points each get one thread; the result is the same.
      if (workers > 1) twin.exec = Exec::serial;
      results[i] = run_twin_experiment(twin, &references.at(reference_key(p.twin)));
      write_error_csv(dir / "errors.csv", results[i].records);
      ExperimentConfig resolved = cfg;
      resolved.twin = p.twin;
      resolved.sweep = {};
      write_text_atomic(dir / "config.json", config_to_json(resolved).dump(2) + "\n");
      write_text_atomic(dir / "manifest.json", run_manifest(p, cfg, results[i]).dump(2) + "\n");
      if (plots)
        write_text_atomic(dir / "errors.svg",
                          render_error_plot_svg({{p.label, results[i].records}}, p.label));
      if (!options.quiet) {
        std::lock_guard lock(log_mutex);
        std::cout << p.dir << " [" << p.label << "]: " << to_string(results[i].status);
        if (!results[i].records.empty())
          std::cout << ", final total error " << results[i].records.back().err_total;
        std::cout << " (" << results[i].total_seconds << " s)\n";
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (plots) {
    std::vector<PlotSeries> series;
    for (std::size_t i = 0; i < points.size(); ++i)
      series.push_back({points[i].label, results[i].records});
    write_text_atomic(out_dir / "comparison.svg",
                      render_error_plot_svg(series, to_string(cfg.twin.model) + " / " +
                                                        to_string(cfg.twin.method)));
  }

  const bool failed = std::any_of(results.begin(), results.end(), [](const RunResult& r) {
    return r.status != RunStatus::completed;
  });
  return failed && !options.allow_failures ? kExitNumerical : kExitOk;
}

}  // namespace cda
