#include "oven/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "oven/error.hpp"
#include "oven/output.hpp"

namespace oven {

ConfigError::ConfigError(std::string key_path, std::string message, int line)
    : Error(line > 0 ? fmt::format("{} (line {}): {}", key_path, line, message)
                     : fmt::format("{}: {}", key_path, message)),
      key_path_(std::move(key_path)),
      line_(line) {}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::modes: return "modes";
    case Scenario::spectrum: return "spectrum";
    case Scenario::heat: return "heat";
    case Scenario::control: return "control";
  }
  return "?";
}

namespace {

int line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

// Path-tracking view onto a YAML node.
class Node {
 public:
  Node(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  int line() const { return line_of(node_); }
  bool is_map() const { return node_.IsMap(); }
  bool is_seq() const { return node_.IsSequence(); }
  std::size_t size() const { return node_.size(); }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg, line()); }

  bool has(const char* key) const { return node_.IsMap() && node_[key]; }

  Node at(const char* key) const {
    if (!node_.IsMap()) fail("expected a mapping");
    const YAML::Node child = node_[key];
    const std::string p = path_.empty() ? key : path_ + "." + key;
    if (!child) throw ConfigError(p, "missing required key", line());
    return {child, p};
  }

  Node operator[](std::size_t i) const {
    return {node_[i], fmt::format("{}[{}]", path_, i)};
  }

  void require_map() const {
    if (!node_.IsMap()) fail("expected a mapping");
  }

  // Rejects keys outside the allowed set.
  void allow(std::initializer_list<const char*> keys) const {
    require_map();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!ok.count(k)) {
        const std::string p = path_.empty() ? k : path_ + "." + k;
        throw ConfigError(p, "unknown key", line_of(kv.first));
      }
    }
  }

  template <class T>
  T as() const {
    try {
      return node_.as<T>();
    } catch (const YAML::Exception&) {
      fail("value has the wrong type");
    }
  }

  double number() const { return as<double>(); }
  double positive() const {
    const double v = number();
    if (!(v > 0)) fail("must be positive");
    return v;
  }
  double nonneg() const {
    const double v = number();
    if (!(v >= 0)) fail("must be >= 0");
    return v;
  }
  int integer(int min) const {
    const int v = as<int>();
    if (v < min) fail(fmt::format("must be >= {}", min));
    return v;
  }

  Vec3 vec3() const {
    if (!is_seq() || size() != 3) fail("expected a list of three numbers");
    return {(*this)[0].number(), (*this)[1].number(), (*this)[2].number()};
  }
  std::array<int, 3> counts3() const {
    if (!is_seq() || size() != 3) fail("expected a list of three integers");
    return {(*this)[0].integer(1), (*this)[1].integer(1), (*this)[2].integer(1)};
  }
  std::vector<double> numbers() const {
    if (!is_seq()) fail("expected a list of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back((*this)[i].number());
    return v;
  }
  std::vector<std::pair<double, double>> pairs() const {
    if (!is_seq()) fail("expected a list of [x, y] pairs");
    std::vector<std::pair<double, double>> v;
    for (std::size_t i = 0; i < size(); ++i) {
      const Node e = (*this)[i];
      if (!e.is_seq() || e.size() != 2) e.fail("expected a [x, y] pair");
      v.emplace_back(e[0].number(), e[1].number());
    }
    return v;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

template <class F>
void guard(const Node& n, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    n.fail(e.what());
  }
}

CureKinetics parse_cure(const Node& n) {
  n.allow({"a1", "a2", "e1", "e2", "m", "n", "dh", "alpha_gel", "shrink"});
  CureKinetics c;
  if (n.has("a1")) c.a1 = n.at("a1").number();
  if (n.has("a2")) c.a2 = n.at("a2").number();
  if (n.has("e1")) c.e1 = n.at("e1").number();
  if (n.has("e2")) c.e2 = n.at("e2").number();
  if (n.has("m")) c.m = n.at("m").number();
  if (n.has("n")) c.n = n.at("n").number();
  if (n.has("dh")) c.dh = n.at("dh").number();
  if (n.has("alpha_gel")) c.alpha_gel = n.at("alpha_gel").number();
  if (n.has("shrink")) c.shrink = n.at("shrink").number();
  guard(n, [&] { c.validate(); });
  return c;
}

void parse_materials(const Node& n, MaterialLibrary& lib) {
  if (!n.is_seq()) n.fail("expected a list of materials");
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Node m = n[i];
    m.allow({"name", "base", "eps_r", "tan_delta", "density", "heat_capacity", "conductivity_thermal",
             "cte", "modulus", "poisson", "cure", "eps_slope_T", "tan_slope_T", "tan_slope_alpha"});
    const auto name = m.at("name").as<std::string>();
    Material mat;
    if (m.has("base")) {
      const Node b = m.at("base");
      const auto base = b.as<std::string>();
      if (!lib.contains(base)) b.fail(fmt::format("undefined material '{}'", base));
      mat = lib.at(base);
    } else if (lib.contains(name)) {
      mat = lib.at(name);
    }
    mat.name = name;
    auto num = [&](const char* key, double& field) {
      if (m.has(key)) field = m.at(key).number();
    };
    num("eps_r", mat.eps_r);
    num("tan_delta", mat.tan_delta);
    num("density", mat.density);
    num("heat_capacity", mat.heat_capacity);
    num("conductivity_thermal", mat.conductivity_thermal);
    num("cte", mat.cte);
    num("modulus", mat.modulus);
    num("poisson", mat.poisson);
    num("eps_slope_T", mat.eps_slope_T);
    num("tan_slope_T", mat.tan_slope_T);
    num("tan_slope_alpha", mat.tan_slope_alpha);
    if (m.has("cure")) mat.cure = parse_cure(m.at("cure"));
    guard(m, [&] { lib.add(mat); });
  }
}

Box parse_box(const Node& n) {
  n.allow({"lo", "hi", "material"});
  Box b{n.at("lo").vec3(), n.at("hi").vec3()};
  for (int a = 0; a < 3; ++a)
    if (!(b.hi[a] > b.lo[a])) n.fail("hi must exceed lo on every axis");
  return b;
}

std::string material_ref(const Node& n, const MaterialLibrary& lib) {
  const auto name = n.as<std::string>();
  if (!lib.contains(name)) n.fail(fmt::format("undefined material '{}'", name));
  return name;
}

void parse_scene(const Node& n, const MaterialLibrary& lib, Scene& s) {
  n.allow({"preset", "cavity", "open_end", "background", "blocks", "sample", "probe", "ambient_T",
           "h_conv", "contact_conductance"});
  if (n.has("preset")) {
    const Node p = n.at("preset");
    const auto name = p.as<std::string>();
    if (name == "prototype")
      s = prototype_scene(true);
    else if (name == "prototype-empty")
      s = prototype_scene(false);
    else
      p.fail("unknown preset (prototype, prototype-empty)");
  }
  if (n.has("cavity")) {
    const Node c = n.at("cavity");
    c.allow({"a", "b", "l_d", "l_air", "eps_r"});
    if (c.has("a")) s.cavity.a = c.at("a").positive();
    if (c.has("b")) s.cavity.b = c.at("b").positive();
    if (c.has("l_d")) s.cavity.l_d = c.at("l_d").positive();
    if (c.has("l_air")) s.cavity.l_air = c.at("l_air").positive();
    if (c.has("eps_r")) s.cavity.eps_r = c.at("eps_r").number();
    guard(c, [&] { s.cavity.validate(); });
  }
  if (n.has("open_end")) s.open_end = n.at("open_end").as<bool>();
  if (n.has("background")) s.background = material_ref(n.at("background"), lib);
  if (n.has("blocks")) {
    const Node b = n.at("blocks");
    if (!b.is_seq()) b.fail("expected a list of blocks");
    s.blocks.clear();
    for (std::size_t i = 0; i < b.size(); ++i)
      s.blocks.push_back({parse_box(b[i]), material_ref(b[i].at("material"), lib)});
  }
  if (n.has("sample")) {
    const Node sm = n.at("sample");
    s.sample_region = parse_box(sm);
    if (sm.has("material")) {
      // Convenience: a sample with a material is also appended as a block.
      s.blocks.push_back({s.sample_region, material_ref(sm.at("material"), lib)});
    }
  }
  if (n.has("probe")) {
    const Node p = n.at("probe");
    p.allow({"x", "y", "length"});
    if (p.has("x")) s.probe.x = p.at("x").number();
    if (p.has("y")) s.probe.y = p.at("y").number();
    if (p.has("length")) s.probe.length = p.at("length").positive();
  }
  if (n.has("ambient_T")) s.ambient_T = n.at("ambient_T").positive();
  if (n.has("h_conv")) s.h_conv = n.at("h_conv").nonneg();
  if (n.has("contact_conductance")) s.contact_conductance = n.at("contact_conductance").nonneg();
  // Material names were checked with key paths above.
  guard(n, [&] { s.validate(lib); });
}

Precision parse_precision(const Node& n) {
  const auto v = n.as<std::string>();
  if (v == "single") return Precision::single;
  if (v == "double") return Precision::dual;
  n.fail("expected 'single' or 'double'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  const Node root(doc, "");
  if (!doc.IsMap()) throw ConfigError("<document>", "top level must be a mapping", line_of(doc));
  root.allow({"scenario", "seed", "output", "materials", "scene", "grid", "thermal_grid", "em", "modes",
              "spectrum", "drive", "coupling", "power_schedule", "profile", "controller", "sensor", "t_end",
              "companion"});

  RunConfig cfg;
  cfg.hash = fnv1a64(text);

  {
    const Node s = root.at("scenario");
    const auto v = s.as<std::string>();
    if (v == "modes") cfg.scenario = Scenario::modes;
    else if (v == "spectrum") cfg.scenario = Scenario::spectrum;
    else if (v == "heat") cfg.scenario = Scenario::heat;
    else if (v == "control") cfg.scenario = Scenario::control;
    else s.fail("expected one of modes, spectrum, heat, control");
  }
  if (root.has("seed")) cfg.seed = root.at("seed").as<std::uint64_t>();
  if (root.has("output")) {
    const Node o = root.at("output");
    o.allow({"directory", "snapshot_interval"});
    if (o.has("directory")) cfg.output_dir = o.at("directory").as<std::string>();
    if (o.has("snapshot_interval")) cfg.snapshot_interval = o.at("snapshot_interval").nonneg();
  }
  if (root.has("materials")) parse_materials(root.at("materials"), cfg.materials);
  if (root.has("scene")) parse_scene(root.at("scene"), cfg.materials, cfg.scene);
  else guard(root, [&] { cfg.scene.validate(cfg.materials); });

  if (root.has("grid")) {
    const Node g = root.at("grid");
    g.allow({"cells_per_wavelength", "cell_budget", "f_max", "min_cells_per_block", "align_to_blocks"});
    if (g.has("cells_per_wavelength")) {
      const Node c = g.at("cells_per_wavelength");
      cfg.grid.options.cells_per_wavelength = c.number();
      if (!(cfg.grid.options.cells_per_wavelength >= 10)) c.fail("must be >= 10");
    }
    if (g.has("cell_budget")) cfg.grid.options.cell_budget = g.at("cell_budget").positive();
    if (g.has("f_max")) cfg.grid.f_max = g.at("f_max").positive();
    if (g.has("min_cells_per_block")) cfg.grid.options.min_cells_per_block = g.at("min_cells_per_block").integer(1);
    if (g.has("align_to_blocks")) cfg.grid.options.align_to_blocks = g.at("align_to_blocks").as<bool>();
  }
  if (root.has("thermal_grid")) {
    const Node t = root.at("thermal_grid");
    t.allow({"refine", "counts"});
    if (t.has("refine")) cfg.thermal_grid.refine = t.at("refine").counts3();
    if (t.has("counts")) cfg.thermal_grid.counts = t.at("counts").counts3();
  }
  if (root.has("em")) {
    const Node e = root.at("em");
    e.allow({"tol", "balance_tol", "ramp_periods", "window_periods", "max_periods", "courant", "precision",
             "amplitude"});
    if (e.has("tol")) cfg.em.tol = e.at("tol").positive();
    if (e.has("balance_tol")) cfg.em.balance_tol = e.at("balance_tol").positive();
    if (e.has("ramp_periods")) cfg.em.ramp_periods = e.at("ramp_periods").integer(50);
    if (e.has("window_periods")) cfg.em.window_periods = e.at("window_periods").integer(1);
    if (e.has("max_periods")) cfg.em.max_periods = e.at("max_periods").integer(1);
    if (e.has("courant")) {
      const Node c = e.at("courant");
      cfg.em.courant = c.number();
      if (!(cfg.em.courant > 0 && cfg.em.courant <= 0.99)) c.fail("must lie in (0, 0.99]");
    }
    if (e.has("precision")) cfg.em.precision = parse_precision(e.at("precision"));
    if (e.has("amplitude")) cfg.em.amplitude = e.at("amplitude").positive();
    if (cfg.em.max_periods <= cfg.em.ramp_periods) e.fail("max_periods must exceed ramp_periods");
  }
  cfg.spectrum.courant = cfg.em.courant;
  cfg.spectrum.precision = cfg.em.precision;
  if (root.has("modes")) {
    const Node m = root.at("modes");
    m.allow({"m", "n", "band"});
    if (m.has("m")) cfg.modes.m = m.at("m").integer(1);
    if (m.has("n")) cfg.modes.n = m.at("n").integer(1);
    if (m.has("band")) {
      const Node b = m.at("band");
      const auto v = b.numbers();
      if (v.size() != 2 || !(v[0] < v[1])) b.fail("expected [f_lo, f_hi] with f_lo < f_hi");
      cfg.modes.f_lo = v[0];
      cfg.modes.f_hi = v[1];
    }
  }
  if (root.has("spectrum")) {
    const Node s = root.at("spectrum");
    s.allow({"f_center", "f_span", "duration", "n_steps", "df", "monitors", "amplitude", "tail_taper"});
    if (s.has("f_center")) cfg.spectrum.f_center = s.at("f_center").positive();
    if (s.has("f_span")) cfg.spectrum.f_span = s.at("f_span").positive();
    if (s.has("duration") && s.has("n_steps")) s.fail("give either duration or n_steps");
    if (s.has("n_steps")) cfg.spectrum.n_steps = s.at("n_steps").integer(1);
    if (s.has("duration")) cfg.spectrum.duration = s.at("duration").positive();
    if (s.has("df")) cfg.spectrum.df = s.at("df").positive();
    if (s.has("amplitude")) cfg.spectrum.amplitude = s.at("amplitude").nonneg();
    if (s.has("tail_taper")) {
      cfg.spectrum.tail_taper = s.at("tail_taper").positive();
      if (cfg.spectrum.tail_taper > 1) s.at("tail_taper").fail("must be in (0, 1]");
    }
    if (s.has("monitors")) {
      const Node m = s.at("monitors");
      if (!m.is_seq()) m.fail("expected a list of [x, y, z] points");
      for (std::size_t i = 0; i < m.size(); ++i) cfg.spectrum.monitors.push_back(m[i].vec3());
    }
    if (!(cfg.spectrum.f_center - cfg.spectrum.f_span / 2 > 0)) s.fail("band must stay above 0 Hz");
  }
  if (root.has("drive")) {
    const Node d = root.at("drive");
    d.allow({"frequencies", "weights", "locate"});
    const Node fs = d.at("frequencies");
    cfg.drive.freqs = fs.numbers();
    if (cfg.drive.freqs.empty()) fs.fail("need at least one frequency");
    for (std::size_t i = 0; i < cfg.drive.freqs.size(); ++i)
      if (!(cfg.drive.freqs[i] > 0)) fs[i].fail("must be positive");
    if (d.has("weights")) {
      const Node w = d.at("weights");
      cfg.drive.weights = w.numbers();
      if (cfg.drive.weights.size() != cfg.drive.freqs.size()) w.fail("one weight per frequency");
      double sum = 0;
      for (std::size_t i = 0; i < cfg.drive.weights.size(); ++i) {
        if (!(cfg.drive.weights[i] >= 0)) w[i].fail("must be >= 0");
        sum += cfg.drive.weights[i];
      }
      if (std::abs(sum - 1.0) > 1e-9) w.fail("weights must sum to 1");
    }
    if (d.has("locate")) {
      const Node l = d.at("locate");
      l.allow({"f_center", "f_span", "duration", "max_shift"});
      LocateSettings ls;
      ls.f_center = l.at("f_center").positive();
      ls.f_span = l.at("f_span").positive();
      if (l.has("duration")) ls.duration = l.at("duration").positive();
      if (l.has("max_shift")) ls.max_shift = l.at("max_shift").positive();
      cfg.drive.locate = ls;
    }
  }
  if (root.has("coupling")) {
    const Node c = root.at("coupling");
    c.allow({"dt", "resolve_threshold", "cte_ref"});
    if (c.has("dt")) cfg.coupling.dt_couple = c.at("dt").positive();
    if (c.has("resolve_threshold")) {
      const Node r = c.at("resolve_threshold");
      cfg.coupling.resolve_threshold = r.number();
      if (!(cfg.coupling.resolve_threshold >= 0 && cfg.coupling.resolve_threshold < 1))
        r.fail("must lie in [0, 1)");
    }
    if (c.has("cte_ref")) cfg.cte_ref = c.at("cte_ref").number();
  }
  cfg.coupling.freqs = cfg.drive.freqs;
  cfg.coupling.weights = cfg.drive.weights;
  if (root.has("power_schedule")) {
    const Node p = root.at("power_schedule");
    p.allow({"mode", "points"});
    auto mode = PowerSchedule::Mode::hold;
    if (p.has("mode")) {
      const Node m = p.at("mode");
      const auto v = m.as<std::string>();
      if (v == "linear") mode = PowerSchedule::Mode::linear;
      else if (v != "hold") m.fail("expected 'hold' or 'linear'");
    }
    const Node pts = p.at("points");
    guard(pts, [&] { cfg.schedule = PowerSchedule(pts.pairs(), mode); });
  }
  if (root.has("profile")) {
    const Node p = root.at("profile");
    guard(p, [&] { cfg.profile = Profile(p.pairs()); });
    if (cfg.profile->empty()) p.fail("profile needs at least one breakpoint");
  }
  if (root.has("controller")) {
    const Node c = root.at("controller");
    c.allow({"kp", "ki", "kd", "u_max", "tune"});
    auto& g = cfg.controller.gains;
    if (c.has("kp")) g.kp = c.at("kp").nonneg();
    if (c.has("ki")) g.ki = c.at("ki").nonneg();
    if (c.has("kd")) g.kd = c.at("kd").nonneg();
    if (c.has("u_max")) g.u_max = c.at("u_max").nonneg();
    if (c.has("tune")) {
      const Node t = c.at("tune");
      t.allow({"step_power", "duration", "tau_c"});
      cfg.controller.tune = true;
      if (t.has("step_power")) cfg.controller.tune_power = t.at("step_power").positive();
      if (t.has("duration")) cfg.controller.tune_duration = t.at("duration").positive();
      if (t.has("tau_c")) cfg.controller.tau_c = t.at("tau_c").positive();
    }
  }
  if (root.has("sensor")) {
    const Node s = root.at("sensor");
    s.allow({"noise_std"});
    if (s.has("noise_std")) cfg.sensor_noise = s.at("noise_std").nonneg();
  }
  if (root.has("t_end")) cfg.t_end = root.at("t_end").positive();
  if (root.has("companion")) {
    const Node c = root.at("companion");
    c.allow({"enabled", "thermal_counts"});
    if (c.has("enabled")) cfg.companion.enabled = c.at("enabled").as<bool>();
    if (c.has("thermal_counts")) cfg.companion.thermal_counts = c.at("thermal_counts").counts3();
  }

  // Scenario requirements.
  const bool coupled = cfg.scenario == Scenario::heat || cfg.scenario == Scenario::control;
  if (coupled) {
    if (cfg.drive.freqs.empty()) throw ConfigError("drive.frequencies", "required for coupled scenarios");
    if (!(cfg.t_end > 0)) throw ConfigError("t_end", "required for coupled scenarios");
    const double steps = cfg.t_end / cfg.coupling.dt_couple;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
      throw ConfigError("t_end", "must be a whole number of coupling intervals");
  }
  if (cfg.scenario == Scenario::heat && cfg.schedule.empty())
    throw ConfigError("power_schedule", "required for the heat scenario");
  if (cfg.scenario == Scenario::control) {
    if (!cfg.profile) throw ConfigError("profile", "required for the control scenario");
    if (!cfg.controller.tune && cfg.controller.gains.kp == 0 && cfg.controller.gains.ki == 0)
      throw ConfigError("controller", "give gains or a tune block");
  }
  if (cfg.scenario == Scenario::spectrum && !root.has("spectrum"))
    throw ConfigError("spectrum", "required for the spectrum scenario");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace oven
