#include "se3ekf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "se3ekf/errors.hpp"

namespace se3ekf {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last || first == last) {
    throw std::invalid_argument("'" + std::string(s) + "' is not a number");
  }
  return v;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(std::string_view s, std::size_t expected) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    out.push_back(parse_double(s.substr(i, j - i)));
    i = j;
  }
  if (out.size() != expected) {
    throw std::invalid_argument("expected " + std::to_string(expected) + " numbers, got " +
                                std::to_string(out.size()));
  }
  return out;
}

std::string join(const double* v, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

std::string vec_text(const Vec3& v) { return join(v.data(), 3); }

std::string mat_text(const Mat3& m) {
  const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> r = m;
  return join(r.data(), 9);
}

Mat3 mat_parse(std::string_view s) {
  const std::vector<double> n = parse_numbers(s, 9);
  return Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(n.data());
}

Rotation rotation_parse(std::string_view s) {
  const Mat3 m = mat_parse(s);
  const Rotation r = Rotation::unchecked(m);
  if (!(r.orthogonality_error() <= 1e-9) || std::abs(m.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("not a rotation matrix");
  }
  return r;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("'" + std::string(s) + "' is not an unsigned integer");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false");
}

struct Entry {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, std::string_view)> set;
};

template <class Ref>
Entry real(std::string key, Ref ref) {
  return {std::move(key),
          [ref](const ScenarioConfig& c) { return format_double(ref(const_cast<ScenarioConfig&>(c))); },
          [ref](ScenarioConfig& c, std::string_view v) { ref(c) = parse_double(v); }};
}

template <class Ref>
Entry vec3(std::string key, Ref ref) {
  return {std::move(key),
          [ref](const ScenarioConfig& c) { return vec_text(ref(const_cast<ScenarioConfig&>(c))); },
          [ref](ScenarioConfig& c, std::string_view v) {
            const std::vector<double> n = parse_numbers(v, 3);
            ref(c) = Vec3(n[0], n[1], n[2]);
          }};
}

template <class Ref>
Entry rotation(std::string key, Ref ref) {
  return {std::move(key),
          [ref](const ScenarioConfig& c) {
            return mat_text(ref(const_cast<ScenarioConfig&>(c)).matrix());
          },
          [ref](ScenarioConfig& c, std::string_view v) { ref(c) = rotation_parse(v); }};
}

template <class E>
Entry choice(std::string key, std::vector<std::pair<std::string, E>> names,
             std::function<E&(ScenarioConfig&)> ref) {
  return {std::move(key),
          [ref, names](const ScenarioConfig& c) {
            const E v = ref(const_cast<ScenarioConfig&>(c));
            for (const auto& [n, e] : names) {
              if (e == v) return n;
            }
            return std::string("?");
          },
          [ref, names](ScenarioConfig& c, std::string_view v) {
            for (const auto& [n, e] : names) {
              if (n == v) {
                ref(c) = e;
                return;
              }
            }
            std::string allowed;
            for (const auto& [n, e] : names) allowed += (allowed.empty() ? "" : ", ") + n;
            throw std::invalid_argument("'" + std::string(v) + "' is not one of: " + allowed);
          }};
}

void add_state(std::vector<Entry>& t, const std::string& prefix,
               FullState& (*ref)(ScenarioConfig&)) {
  t.push_back(vec3(prefix + ".x", [ref](ScenarioConfig& c) -> Vec3& { return ref(c).x; }));
  t.push_back(vec3(prefix + ".v", [ref](ScenarioConfig& c) -> Vec3& { return ref(c).v; }));
  t.push_back(rotation(prefix + ".R", [ref](ScenarioConfig& c) -> Rotation& { return ref(c).R; }));
  t.push_back(vec3(prefix + ".W", [ref](ScenarioConfig& c) -> Vec3& { return ref(c).W; }));
  t.push_back(vec3(prefix + ".ei", [ref](ScenarioConfig& c) -> Vec3& { return ref(c).ei; }));
  t.push_back(vec3(prefix + ".eI", [ref](ScenarioConfig& c) -> Vec3& { return ref(c).eI; }));
}

#define SE3EKF_REF(type, member) [](ScenarioConfig& c) -> type& { return c.member; }

std::vector<Entry> build_table() {
  std::vector<Entry> t;
  t.push_back({"scenario", [](const ScenarioConfig& c) { return c.name; },
               [](ScenarioConfig& c, std::string_view v) { c.name = std::string(v); }});
  t.push_back(real("sim.duration", SE3EKF_REF(double, duration)));
  t.push_back(real("sim.dt", SE3EKF_REF(double, dt)));
  t.push_back({"sim.seed", [](const ScenarioConfig& c) { return std::to_string(c.seed); },
               [](ScenarioConfig& c, std::string_view v) { c.seed = parse_u64(v); }});
  t.push_back(choice<FeedbackMode>("sim.feedback",
                                   {{"truth", FeedbackMode::Truth},
                                    {"estimate", FeedbackMode::Estimate}},
                                   SE3EKF_REF(FeedbackMode, feedback)));

  t.push_back(real("vehicle.mass", SE3EKF_REF(double, params.mass)));
  t.push_back({"vehicle.inertia", [](const ScenarioConfig& c) { return mat_text(c.params.inertia); },
               [](ScenarioConfig& c, std::string_view v) { c.params.inertia = mat_parse(v); }});
  t.push_back(real("vehicle.gravity", SE3EKF_REF(double, params.gravity)));
  t.push_back(vec3("vehicle.force_disturbance", SE3EKF_REF(Vec3, params.force_disturbance)));
  t.push_back(vec3("vehicle.moment_disturbance", SE3EKF_REF(Vec3, params.moment_disturbance)));
  t.push_back(real("vehicle.arm_length", SE3EKF_REF(double, params.arm_length)));

  t.push_back(real("gains.kx", SE3EKF_REF(double, gains.kx)));
  t.push_back(real("gains.kv", SE3EKF_REF(double, gains.kv)));
  t.push_back(real("gains.ki", SE3EKF_REF(double, gains.ki)));
  t.push_back(real("gains.sigma", SE3EKF_REF(double, gains.sigma)));
  t.push_back(real("gains.kR", SE3EKF_REF(double, gains.kR)));
  t.push_back(real("gains.kW", SE3EKF_REF(double, gains.kW)));
  t.push_back(real("gains.kI", SE3EKF_REF(double, gains.kI)));
  t.push_back(real("gains.c1", SE3EKF_REF(double, gains.c1)));
  t.push_back(real("gains.c2", SE3EKF_REF(double, gains.c2)));
  t.push_back(real("gains.psi1", SE3EKF_REF(double, gains.psi1)));

  t.push_back(real("controller.eps_thrust", SE3EKF_REF(double, controller.eps_thrust)));
  t.push_back(real("controller.eps_cross", SE3EKF_REF(double, controller.eps_cross)));
  t.push_back(real("controller.omega_dot_step", SE3EKF_REF(double, controller.omega_dot_step)));

  t.push_back(choice<TrajectoryKind>("trajectory.kind",
                                     {{"hover", TrajectoryKind::Hover},
                                      {"lissajous", TrajectoryKind::Lissajous},
                                      {"helix", TrajectoryKind::Helix}},
                                     SE3EKF_REF(TrajectoryKind, trajectory.kind)));
  t.push_back(vec3("trajectory.position", SE3EKF_REF(Vec3, trajectory.hover_position)));
  t.push_back(vec3("trajectory.heading", SE3EKF_REF(Vec3, trajectory.hover_heading)));
  t.push_back(real("trajectory.altitude", SE3EKF_REF(double, trajectory.altitude)));
  t.push_back(real("trajectory.helix_a", SE3EKF_REF(double, trajectory.helix_a)));
  t.push_back(real("trajectory.helix_b", SE3EKF_REF(double, trajectory.helix_b)));
  t.push_back(real("trajectory.helix_w", SE3EKF_REF(double, trajectory.helix_w)));
  t.push_back(real("trajectory.helix_speed", SE3EKF_REF(double, trajectory.helix_speed)));

  t.push_back(choice<JacobianSource>("filter.jacobian",
                                     {{"analytic", JacobianSource::Analytic},
                                      {"fd", JacobianSource::FiniteDifference}},
                                     SE3EKF_REF(JacobianSource, filter.jacobian)));
  t.push_back(choice<Transition>("filter.transition",
                                 {{"first-order", Transition::FirstOrder},
                                  {"exact-expm", Transition::ExactExpm}},
                                 SE3EKF_REF(Transition, filter.transition)));
  t.push_back(choice<FilterOptions::HeldJacobian>(
      "filter.held_jacobian",
      {{"closed-loop", FilterOptions::HeldJacobian::ClosedLoop},
       {"held-input", FilterOptions::HeldJacobian::HeldInput}},
      SE3EKF_REF(FilterOptions::HeldJacobian, filter.held_jacobian)));
  t.push_back(real("filter.rate_step", SE3EKF_REF(double, filter.linearization.rate_step)));
  t.push_back(real("filter.fd_step", SE3EKF_REF(double, filter.fd_step)));
  t.push_back({"filter.substeps",
               [](const ScenarioConfig& c) { return std::to_string(c.filter.substeps); },
               [](ScenarioConfig& c, std::string_view v) {
                 const std::uint64_t n = parse_u64(v);
                 if (n < 1 || n > 1000) throw std::invalid_argument("must be between 1 and 1000");
                 c.filter.substeps = static_cast<int>(n);
               }});
  t.push_back({"filter.model", [](const ScenarioConfig& c) { return c.measurement_model; },
               [](ScenarioConfig& c, std::string_view v) { c.measurement_model = std::string(v); }});

  t.push_back(real("noise.measurement", SE3EKF_REF(double, measurement_noise)));
  t.push_back(real("noise.process", SE3EKF_REF(double, process_noise)));
  t.push_back(real("noise.truth_process", SE3EKF_REF(double, truth_process_noise)));
  t.push_back(real("noise.sample_scale", SE3EKF_REF(double, measurement_sample_scale)));

  add_state(t, "truth", [](ScenarioConfig& c) -> FullState& { return c.initial_truth; });
  add_state(t, "estimate", [](ScenarioConfig& c) -> FullState& { return c.initial_estimate; });
  t.push_back({"estimate.P0_diag",
               [](const ScenarioConfig& c) { return join(c.initial_covariance_diag.data(), 18); },
               [](ScenarioConfig& c, std::string_view v) {
                 const std::vector<double> n = parse_numbers(v, 18);
                 c.initial_covariance_diag = Eigen::Map<const Vec18>(n.data());
               }});

  t.push_back(real("metrics.window_start", SE3EKF_REF(double, window_start)));
  t.push_back(real("metrics.window_end", SE3EKF_REF(double, window_end)));

  t.push_back(real("threshold.converge_error", SE3EKF_REF(double, thresholds.converge_error)));
  t.push_back(real("threshold.converge_time", SE3EKF_REF(double, thresholds.converge_time)));
  t.push_back(real("threshold.max_position_error", SE3EKF_REF(double, thresholds.max_position_error)));
  t.push_back(real("threshold.max_velocity_error", SE3EKF_REF(double, thresholds.max_velocity_error)));
  t.push_back(real("threshold.velocity_rmse_ratio", SE3EKF_REF(double, thresholds.velocity_rmse_ratio)));
  t.push_back(real("threshold.max_tracking_error", SE3EKF_REF(double, thresholds.max_tracking_error)));
  t.push_back(real("threshold.tracking_after", SE3EKF_REF(double, thresholds.tracking_after)));
  t.push_back(real("threshold.min_covariance_eigenvalue",
                   SE3EKF_REF(double, thresholds.min_covariance_eigenvalue)));

  t.push_back({"telemetry.jacobian_check",
               [](const ScenarioConfig& c) { return std::string(c.jacobian_check ? "true" : "false"); },
               [](ScenarioConfig& c, std::string_view v) { c.jacobian_check = parse_bool(v); }});
  return t;
}

#undef SE3EKF_REF

const std::vector<Entry>& table() {
  static const std::vector<Entry> t = build_table();
  return t;
}

const Entry* find_entry(std::string_view key) {
  for (const Entry& e : table()) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

struct Line {
  int number;
  std::string key;
  std::string value;
};

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : table()) keys.push_back(e.key);
  return keys;
}

void apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value) {
  const Entry* e = find_entry(key);
  if (e == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'");
  try {
    e->set(c, trim(value));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError("bad value for '" + std::string(key) + "': " + ex.what());
  }
}

ScenarioConfig parse_config(std::istream& in, const ScenarioConfig* base) {
  std::vector<Line> lines;
  std::set<std::string> seen;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value', got '" + std::string(s) + "'", number);
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError("missing key before '='", number);
    if (find_entry(key) == nullptr) throw ConfigError("unknown key '" + key + "'", number);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", number);
    lines.push_back({number, key, value});
  }

  ScenarioConfig cfg;
  bool have_base = false;
  for (const Line& l : lines) {
    if (l.key == "scenario") {
      try {
        cfg = scenario_by_name(l.value);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), l.number);
      }
      have_base = true;
    }
  }
  if (!have_base && base != nullptr) cfg = *base;

  for (const Line& l : lines) {
    if (l.key == "scenario") continue;
    try {
      apply_setting(cfg, l.key, l.value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), l.number);
    }
  }
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text, const ScenarioConfig* base) {
  std::istringstream in(text);
  return parse_config(in, base);
}

ScenarioConfig load_config(const std::string& path, const ScenarioConfig* base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, base);
}

std::string config_to_text(const ScenarioConfig& c) {
  std::string out;
  for (const Entry& e : table()) {
    out += e.key;
    out += " = ";
    out += e.get(c);
    out += '\n';
  }
  return out;
}

void save_config(const ScenarioConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  out << config_to_text(c);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace se3ekf
