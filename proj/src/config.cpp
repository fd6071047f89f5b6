#include "cda/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cda/errors.hpp"

namespace cda {

bool SweepSpec::empty() const {
  return mu.empty() && members.empty() && sigma_I2.empty() && sigma_E2.empty() &&
         sigma_O2.empty();
}

std::vector<std::string> preset_names() { return {"kse-paper", "nse-paper"}; }

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  TwinConfig& t = c.twin;
  if (name == "kse-paper") {
    t.model = ModelKind::kse;
    t.kse = KseParams{};  // lambda 1/2, [0, 32 pi), N = 256, dt = 0.01
    t.observed_modes = 16;
    t.mu = 100.0;
    t.members = 32;
    t.sigma_E2 = 1e-16;
    t.sigma_I2 = 1e-14;
    t.spin_up_time = 10000.0;
    t.horizon = 100.0;
  } else if (name == "nse-paper") {
    t.model = ModelKind::nse;
    t.nse = NseParams{};  // nu 0.01, f0 50, k_f (5, 5), N = 128, dt = 0.01
    t.observed_modes = 10;
    t.mu = 100.0;
    t.members = 317;  // lattice points with |k| <= 10
    t.sigma_E2 = 1e-15;
    t.sigma_I2 = 1e-13;
    t.spin_up_time = 10000.0;
    t.horizon = 50.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: kse-paper, nse-paper)");
  }
  t.method = Method::nudging;
  t.record_stride = 10;
  t.seed = 1;
  return c;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

/// A mapping node whose keys are checked off as they are read.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError(where() + ": expected a mapping");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }

  YAML::Node child(const std::string& key) {
    seen_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    seen_.insert(key);
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(key_path(key) + ": invalid value '" + scalar(key) + "'");
    }
  }

  /// Real number; also accepts multiples of pi written as "32pi" or "32*pi".
  void read_real(const std::string& key, double& out) {
    if (!has(key)) return;
    seen_.insert(key);
    const std::string s = scalar(key);
    std::string body = s;
    double factor = 1.0;
    if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
      factor = std::numbers::pi;
      body.resize(body.size() - 2);
      if (!body.empty() && body.back() == '*') body.pop_back();
      if (body.empty()) body = "1";
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(body, &used);
      if (used != body.size()) throw std::invalid_argument(s);
      out = v * factor;
    } catch (const std::exception&) {
      throw ConfigError(key_path(key) + ": invalid number '" + s + "'");
    }
    if (!std::isfinite(out)) throw ConfigError(key_path(key) + ": value must be finite");
  }

  void read_variance(const std::string& key, double& out) {
    read_real(key, out);
    if (has(key) && !(out >= 0.0)) throw ConfigError(key_path(key) + ": variance must be >= 0");
  }

  template <class T>
  void read_list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    seen_.insert(key);
    const YAML::Node n = node_[key];
    if (!n.IsSequence()) throw ConfigError(key_path(key) + ": expected a list");
    out.clear();
    for (std::size_t i = 0; i < n.size(); ++i) {
      try {
        out.push_back(n[i].as<T>());
      } catch (const YAML::Exception&) {
        throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]: invalid value");
      }
    }
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(key_path(key) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  std::string scalar(const std::string& key) const {
    const YAML::Node n = node_[key];
    return n.IsScalar() ? n.Scalar() : std::string("<non-scalar>");
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E>
E parse_enum(const Section& s, const std::string& key, const std::string& value,
             std::initializer_list<std::pair<const char*, E>> options) {
  std::string known;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    known += (known.empty() ? "" : ", ") + std::string(name);
  }
  throw ConfigError(s.key_path(key) + ": unknown value '" + value + "' (expected " + known + ")");
}

void parse_model(Section s, TwinConfig& t) {
  std::string kind;
  s.read("kind", kind);
  if (t.model == ModelKind::kse) {
    KseParams& p = t.kse;
    s.read_real("lambda", p.lambda);
    s.read_real("domain_length", p.domain_length);
    s.read("N", p.n);
    s.read_real("dt", p.dt);
  } else {
    NseParams& p = t.nse;
    s.read_real("nu", p.nu);
    s.read_real("f0", p.f0);
    std::vector<int> kf;
    s.read_list("k_f", kf);
    if (s.has("k_f")) {
      if (kf.size() != 2) throw ConfigError(s.key_path("k_f") + ": expected two integers");
      p.k_f = {kf[0], kf[1]};
    }
    std::string scaling;
    s.read("forcing_scaling", scaling);
    if (!scaling.empty())
      p.forcing_scaling = parse_enum<ForcingScaling>(
          s, "forcing_scaling", scaling,
          {{"grid-cell", ForcingScaling::grid_cell}, {"unit", ForcingScaling::unit}});
    s.read("N", p.n);
    s.read_real("dt", p.dt);
  }
  s.finish();
}

void parse_observations(Section s, TwinConfig& t) {
  s.read("M", t.observed_modes);
  s.read_variance("sigma_O2", t.sigma_O2);
  std::string field;
  s.read("field", field);
  if (!field.empty())
    t.observed_field = parse_enum<ObservedField>(
        s, "field", field,
        {{"streamfunction", ObservedField::streamfunction}, {"vorticity", ObservedField::vorticity}});
  s.finish();
}

void parse_method(Section s, TwinConfig& t) {
  std::string kind;
  s.read("kind", kind);
  if (!kind.empty())
    t.method = parse_enum<Method>(
        s, "kind", kind,
        {{"nudging", Method::nudging}, {"enkf", Method::enkf}, {"free-run", Method::free_run}});
  s.read_real("mu", t.mu);
  std::string init;
  s.read("init", init);
  if (!init.empty())
    t.nudging_init = parse_enum<NudgingInit>(
        s, "init", init, {{"zero", NudgingInit::zero}, {"projected", NudgingInit::projected}});
  s.read("K", t.members);
  s.read_variance("sigma_E2", t.sigma_E2);
  s.read_variance("sigma_I2", t.sigma_I2);
  s.read_real("condition_limit", t.condition_limit);
  std::string gain;
  s.read("gain", gain);
  if (!gain.empty())
    t.gain_form = parse_enum<GainForm>(
        s, "gain", gain, {{"real", GainForm::real}, {"complex", GainForm::complex}});
  s.read_variance("perturbation2", t.free_run_perturbation2);
  std::string exec;
  s.read("exec", exec);
  if (!exec.empty())
    t.exec = parse_enum<Exec>(s, "exec", exec,
                              {{"serial", Exec::serial}, {"parallel", Exec::parallel}});
  s.finish();
}

void parse_run(Section s, TwinConfig& t) {
  s.read_real("spin_up_time", t.spin_up_time);
  s.read_real("horizon", t.horizon);
  s.read("record_stride", t.record_stride);
  s.read("seed", t.seed);
  s.finish();
}

void parse_output(Section s, ExperimentConfig& c) {
  s.read("dir", c.output_dir);
  s.read("emit_plots", c.emit_plots);
  s.read("workers", c.workers);
  if (c.workers < 1) throw ConfigError(s.key_path("workers") + ": must be at least 1");
  s.finish();
}

void parse_sweep(Section s, SweepSpec& w) {
  s.read_list("mu", w.mu);
  s.read_list("K", w.members);
  s.read_list("sigma_I2", w.sigma_I2);
  s.read_list("sigma_E2", w.sigma_E2);
  s.read_list("sigma_O2", w.sigma_O2);
  const std::pair<const char*, const std::vector<double>*> variances[] = {
      {"sigma_I2", &w.sigma_I2}, {"sigma_E2", &w.sigma_E2}, {"sigma_O2", &w.sigma_O2}};
  for (const auto& [key, values] : variances)
    for (double v : *values)
      if (!(v >= 0.0)) throw ConfigError(s.key_path(key) + ": variance must be >= 0");
  s.finish();
}

ExperimentConfig parse_root(const YAML::Node& root) {
  Section s(root, "");
  std::string preset;
  s.read("preset", preset);
  std::string kind;
  if (s.has("model")) {
    Section m(s.child("model"), "model");
    m.read("kind", kind);
  }
  if (preset.empty())
    preset = kind == "nse" ? "nse-paper" : kind.empty() || kind == "kse" ? "kse-paper" : "";
  if (preset.empty())
    throw ConfigError("model.kind: unknown value '" + kind + "' (expected kse, nse)");
  ExperimentConfig c = preset_config(preset);
  if (!kind.empty()) {
    const ModelKind want = parse_enum<ModelKind>(s, "model.kind", kind,
                                                 {{"kse", ModelKind::kse}, {"nse", ModelKind::nse}});
    if (want != c.twin.model)
      throw ConfigError("model.kind: '" + kind + "' conflicts with preset '" + preset + "'");
  }
  parse_model(Section(s.child("model"), "model"), c.twin);
  parse_observations(Section(s.child("observations"), "observations"), c.twin);
  parse_method(Section(s.child("method"), "method"), c.twin);
  parse_run(Section(s.child("run"), "run"), c.twin);
  parse_output(Section(s.child("output"), "output"), c);
  parse_sweep(Section(s.child("sweep"), "sweep"), c.sweep);
  s.finish();
  for (const auto& p : expand_sweep(c)) p.twin.validate();
  return c;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config_string(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_root(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points{{"", "", cfg.twin}};
  auto expand = [&points](const char* name, const auto& values, auto setter) {
    if (values.empty()) return;
    std::vector<SweepPoint> next;
    for (const auto& p : points)
      for (const auto& v : values) {
        SweepPoint q = p;
        setter(q.twin, v);
        q.label += (q.label.empty() ? "" : ",") + std::string(name) + "=" + format_number(double(v));
        next.push_back(std::move(q));
      }
    points = std::move(next);
  };
  expand("mu", cfg.sweep.mu, [](TwinConfig& t, double v) { t.mu = v; });
  expand("K", cfg.sweep.members, [](TwinConfig& t, int v) { t.members = v; });
  expand("sigma_I2", cfg.sweep.sigma_I2, [](TwinConfig& t, double v) { t.sigma_I2 = v; });
  expand("sigma_E2", cfg.sweep.sigma_E2, [](TwinConfig& t, double v) { t.sigma_E2 = v; });
  expand("sigma_O2", cfg.sweep.sigma_O2, [](TwinConfig& t, double v) { t.sigma_O2 = v; });
  if (points.size() == 1 && points[0].label.empty()) {
    points[0].label = "run";
    points[0].dir = "run";
    return points;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "p%03zu", i);
    points[i].dir = buf;
  }
  return points;
}

nlohmann::json twin_to_json(const TwinConfig& t) {
  nlohmann::json j;
  if (t.model == ModelKind::kse) {
    j["model"] = {{"kind", "kse"},
                  {"lambda", t.kse.lambda},
                  {"domain_length", t.kse.domain_length},
                  {"N", t.kse.n},
                  {"dt", t.kse.dt}};
  } else {
    j["model"] = {{"kind", "nse"},
                  {"nu", t.nse.nu},
                  {"f0", t.nse.f0},
                  {"k_f", {t.nse.k_f[0], t.nse.k_f[1]}},
                  {"forcing_scaling",
                   t.nse.forcing_scaling == ForcingScaling::unit ? "unit" : "grid-cell"},
                  {"N", t.nse.n},
                  {"dt", t.nse.dt}};
  }
  j["observations"] = {
      {"M", t.observed_modes}, {"sigma_O2", t.sigma_O2}, {"field", to_string(t.observed_field)}};
  j["method"] = {{"kind", to_string(t.method)},
                 {"mu", t.mu},
                 {"init", to_string(t.nudging_init)},
                 {"K", t.members},
                 {"sigma_E2", t.sigma_E2},
                 {"sigma_I2", t.sigma_I2},
                 {"condition_limit", t.condition_limit},
                 {"gain", t.gain_form == GainForm::real ? "real" : "complex"},
                 {"perturbation2", t.free_run_perturbation2},
                 {"exec", t.exec == Exec::serial ? "serial" : "parallel"}};
  j["run"] = {{"spin_up_time", t.spin_up_time},
              {"horizon", t.horizon},
              {"record_stride", t.record_stride},
              {"seed", t.seed}};
  return j;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j = twin_to_json(cfg.twin);
  j["preset"] = cfg.preset;
  j["output"] = {{"dir", cfg.output_dir}, {"emit_plots", cfg.emit_plots}, {"workers", cfg.workers}};
  nlohmann::json s = nlohmann::json::object();
  if (!cfg.sweep.mu.empty()) s["mu"] = cfg.sweep.mu;
  if (!cfg.sweep.members.empty()) s["K"] = cfg.sweep.members;
  if (!cfg.sweep.sigma_I2.empty()) s["sigma_I2"] = cfg.sweep.sigma_I2;
  if (!cfg.sweep.sigma_E2.empty()) s["sigma_E2"] = cfg.sweep.sigma_E2;
  if (!cfg.sweep.sigma_O2.empty()) s["sigma_O2"] = cfg.sweep.sigma_O2;
  if (!s.empty()) j["sweep"] = s;
  return j;
}

}  // namespace cda
