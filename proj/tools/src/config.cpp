#include "lyapguard_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace lyapguard::cli {
namespace {

using nlohmann::json;

// Reads one JSON object; every key must be consumed before finish().
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    out = v.get<double>();
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
    out = v.get<int>();
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) {
      throw ConfigError(key_path(key) + ": expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    out = v.get<std::string>();
  }

  template <int N>
  void vector(const std::string& key, Eigen::Matrix<double, N, 1>& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_array() || v.size() != static_cast<std::size_t>(N)) {
      throw ConfigError(key_path(key) + ": expected an array of " + std::to_string(N) +
                        " numbers");
    }
    for (int i = 0; i < N; ++i) {
      if (!v[i].is_number()) throw ConfigError(key_path(key) + ": expected numbers");
      out(i) = v[i].get<double>();
    }
  }

  Section child(const std::string& key) { return Section(raw(key), key_path(key)); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key " + key_path(key));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

AxisReference::Kind axis_kind(const std::string& text, const std::string& path) {
  if (text == "constant") return AxisReference::Kind::Constant;
  if (text == "sinusoid") return AxisReference::Kind::Sinusoid;
  if (text == "step") return AxisReference::Kind::Step;
  throw ConfigError(path + ": unknown reference kind '" + text +
                    "' (constant, sinusoid, step)");
}

std::string axis_kind_text(AxisReference::Kind k) {
  switch (k) {
    case AxisReference::Kind::Constant: return "constant";
    case AxisReference::Kind::Sinusoid: return "sinusoid";
    case AxisReference::Kind::Step: return "step";
  }
  return "constant";
}

DisturbanceSegment::Kind segment_kind(const std::string& text, const std::string& path) {
  if (text == "constant") return DisturbanceSegment::Kind::Constant;
  if (text == "gust") return DisturbanceSegment::Kind::Gust;
  if (text == "random") return DisturbanceSegment::Kind::Random;
  throw ConfigError(path + ": unknown disturbance kind '" + text + "' (constant, gust, random)");
}

std::string segment_kind_text(DisturbanceSegment::Kind k) {
  switch (k) {
    case DisturbanceSegment::Kind::Constant: return "constant";
    case DisturbanceSegment::Kind::Gust: return "gust";
    case DisturbanceSegment::Kind::Random: return "random";
  }
  return "constant";
}

void read_plant(Section s, PlantParams& p) {
  s.number("arm_length", p.arm_length);
  s.number("thrust_coeff", p.thrust_coeff);
  s.number("drag_coeff", p.drag_coeff);
  s.vector("body_inertia", p.body_inertia);
  s.number("omega_max", p.omega_max);
  s.finish();
}

void read_bounds(Section s, RobustBounds& b) {
  s.number("D", b.disturbance);
  s.number("D_bar", b.disturbance_total);
  s.number("S", b.coriolis_error);
  s.number("H", b.ref_accel);
  s.number("xi", b.xi);
  s.number("beta_min", b.beta_min);
  s.number("beta_max", b.beta_max);
  s.number("sigma", b.sigma);
  s.finish();
}

void read_reference(const json& arr, const std::string& path, Reference& ref) {
  if (!arr.is_array() || arr.size() != 3) {
    throw ConfigError(path + ": expected an array of 3 axis objects");
  }
  std::array<AxisReference, 3> axes{};
  for (int i = 0; i < 3; ++i) {
    Section a(arr[i], path + "[" + std::to_string(i) + "]");
    std::string kind = "constant";
    a.string("kind", kind);
    axes[i].kind = axis_kind(kind, a.key_path("kind"));
    a.number("offset", axes[i].offset);
    a.number("amplitude", axes[i].amplitude);
    a.number("frequency", axes[i].frequency);
    a.number("phase", axes[i].phase);
    a.number("step_time", axes[i].step_time);
    a.finish();
  }
  ref = Reference(axes);
}

void read_disturbance(const json& arr, const std::string& path,
                      std::vector<DisturbanceSegment>& out) {
  if (!arr.is_array()) throw ConfigError(path + ": expected an array of segments");
  out.clear();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Section s(arr[i], path + "[" + std::to_string(i) + "]");
    DisturbanceSegment seg;
    std::string kind = "constant";
    s.string("kind", kind);
    seg.kind = segment_kind(kind, s.key_path("kind"));
    s.number("start", seg.start);
    s.number("end", seg.end);
    s.number("width", seg.width);
    s.number("hold", seg.hold);
    s.vector("value", seg.value);
    s.finish();
    out.push_back(seg);
  }
}

void read_scenario(Section s, Scenario& sc) {
  s.number("duration", sc.duration);
  s.number("dt", sc.dt);
  s.vector("initial_eta", sc.initial_eta);
  s.vector("initial_eta_dot", sc.initial_eta_dot);
  s.number("thrust", sc.thrust);
  s.boolean("open_loop", sc.open_loop);
  s.boolean("continuous_control", sc.continuous_control);
  s.unsigned64("seed", sc.seed);
  if (s.has("reference")) read_reference(s.raw("reference"), s.key_path("reference"), sc.reference);
  if (s.has("disturbance")) {
    read_disturbance(s.raw("disturbance"), s.key_path("disturbance"), sc.disturbance);
  }
  s.finish();
}

void read_monitor(Section s, MonitorSettings& m) {
  s.integer("debounce_n", m.debounce_n);
  s.number("e_floor", m.e_floor);
  s.integer("divider", m.divider);
  if (s.has("envelope")) {
    Section e = s.child("envelope");
    e.number("max_roll", m.envelope.max_roll);
    e.number("max_pitch", m.envelope.max_pitch);
    e.finish();
  }
  s.finish();
}

}  // namespace

VBoundTemplate RunConfig::v_bound_template() const {
  if (v_bound) return VBoundTemplate::from(bounds, v_bound->rate_coeff, v_bound->angle_coeff);
  return VBoundTemplate::matched(bounds, gains);
}

MonitorConfig RunConfig::monitor_config() const {
  MonitorConfig m;
  m.plant = plant;
  m.bounds = bounds;
  m.cert = LyapunovCert(gains);
  m.estimates = ModelEstimates::scaled(plant, scenario.mismatch);
  m.v_bound = v_bound_template();
  m.debounce_n = monitor.debounce_n;
  m.e_floor = monitor.e_floor;
  m.envelope = monitor.envelope;
  m.divider = monitor.divider;
  return m;
}

void RunConfig::validate() const {
  plant.validate();
  gains.validate();
  bounds.validate();
  v_bound_template().validate();
  scenario.validate();
  monitor_config().validate();
  const double sup = scenario.reference.sup_accel(scenario.duration, scenario.dt);
  if (!(sup < bounds.ref_accel)) {
    throw InvalidArgument("reference violates sup ||eta_d''|| < H: sup = " + std::to_string(sup) +
                          ", bounds.H = " + std::to_string(bounds.ref_accel));
  }
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section root(doc, "");
  if (root.has("plant")) read_plant(root.child("plant"), cfg.plant);
  if (root.has("gains")) {
    Section g = root.child("gains");
    g.vector("k_eta", cfg.gains.k_eta);
    g.vector("k_r", cfg.gains.k_r);
    g.finish();
  }
  if (root.has("bounds")) read_bounds(root.child("bounds"), cfg.bounds);
  if (root.has("v_bound")) {
    Section v = root.child("v_bound");
    VBoundCoefficients c;
    if (!v.has("rate_coeff") || !v.has("angle_coeff")) {
      throw ConfigError("v_bound: both rate_coeff and angle_coeff are required");
    }
    v.vector("rate_coeff", c.rate_coeff);
    v.vector("angle_coeff", c.angle_coeff);
    v.finish();
    cfg.v_bound = c;
  }
  if (root.has("estimates")) {
    Section e = root.child("estimates");
    e.number("mismatch", cfg.scenario.mismatch);
    e.finish();
  }
  const double mismatch = cfg.scenario.mismatch;
  if (root.has("scenario")) read_scenario(root.child("scenario"), cfg.scenario);
  cfg.scenario.mismatch = mismatch;
  if (root.has("monitor")) read_monitor(root.child("monitor"), cfg.monitor);
  if (root.has("output")) {
    Section o = root.child("output");
    o.string("csv", cfg.output.csv);
    o.string("transitions", cfg.output.transitions);
    o.string("tptp", cfg.output.tptp);
    o.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json doc;
  doc["plant"] = {
      {"arm_length", cfg.plant.arm_length},
      {"thrust_coeff", cfg.plant.thrust_coeff},
      {"drag_coeff", cfg.plant.drag_coeff},
      {"body_inertia", vec_json(cfg.plant.body_inertia)},
      {"omega_max", cfg.plant.omega_max},
  };
  doc["gains"] = {{"k_eta", vec_json(cfg.gains.k_eta)}, {"k_r", vec_json(cfg.gains.k_r)}};
  const RobustBounds& b = cfg.bounds;
  doc["bounds"] = {
      {"D", b.disturbance},  {"D_bar", b.disturbance_total}, {"S", b.coriolis_error},
      {"H", b.ref_accel},    {"xi", b.xi},                   {"beta_min", b.beta_min},
      {"beta_max", b.beta_max}, {"sigma", b.sigma},
  };
  if (cfg.v_bound) {
    doc["v_bound"] = {{"rate_coeff", vec_json(cfg.v_bound->rate_coeff)},
                      {"angle_coeff", vec_json(cfg.v_bound->angle_coeff)}};
  }
  doc["estimates"] = {{"mismatch", cfg.scenario.mismatch}};

  const Scenario& sc = cfg.scenario;
  json axes = json::array();
  for (const auto& a : sc.reference.axes()) {
    axes.push_back({{"kind", axis_kind_text(a.kind)},
                    {"offset", a.offset},
                    {"amplitude", a.amplitude},
                    {"frequency", a.frequency},
                    {"phase", a.phase},
                    {"step_time", a.step_time}});
  }
  json segments = json::array();
  for (const auto& s : sc.disturbance) {
    segments.push_back({{"kind", segment_kind_text(s.kind)},
                        {"start", s.start},
                        {"end", s.end},
                        {"width", s.width},
                        {"hold", s.hold},
                        {"value", vec_json(s.value)}});
  }
  doc["scenario"] = {
      {"duration", sc.duration},
      {"dt", sc.dt},
      {"initial_eta", vec_json(sc.initial_eta)},
      {"initial_eta_dot", vec_json(sc.initial_eta_dot)},
      {"thrust", sc.thrust},
      {"open_loop", sc.open_loop},
      {"continuous_control", sc.continuous_control},
      {"seed", sc.seed},
      {"reference", axes},
      {"disturbance", segments},
  };
  doc["monitor"] = {
      {"debounce_n", cfg.monitor.debounce_n},
      {"e_floor", cfg.monitor.e_floor},
      {"divider", cfg.monitor.divider},
      {"envelope",
       {{"max_roll", cfg.monitor.envelope.max_roll},
        {"max_pitch", cfg.monitor.envelope.max_pitch}}},
  };
  doc["output"] = {{"csv", cfg.output.csv},
                   {"transitions", cfg.output.transitions},
                   {"tptp", cfg.output.tptp}};
  return doc.dump(2) + "\n";
}

}  // namespace lyapguard::cli
