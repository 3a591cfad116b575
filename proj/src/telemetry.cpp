#include "se3ekf/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "se3ekf/config.hpp"
#include "se3ekf/errors.hpp"

namespace se3ekf {

namespace {

void vec_names(std::vector<std::string>& h, const std::string& p) {
  for (int i = 1; i <= 3; ++i) h.push_back(p + std::to_string(i));
}

void mat_names(std::vector<std::string>& h, const std::string& p) {
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) h.push_back(p + std::to_string(i) + std::to_string(j));
  }
}

void plant_names(std::vector<std::string>& h, const std::string& p) {
  vec_names(h, p + ".x");
  vec_names(h, p + ".v");
  mat_names(h, p + ".R");
  vec_names(h, p + ".W");
}

// Flattening visitor shared by the writer and the reader so the two cannot
// drift apart.
template <class Rec, class F>
void visit(Rec& r, F&& f) {
  auto vec = [&](auto& v) {
    for (int i = 0; i < 3; ++i) f(v(i));
  };
  auto mat = [&](auto& m) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) f(m(i, j));
    }
  };
  auto plant = [&](auto& s, auto& R) {
    vec(s.x);
    vec(s.v);
    mat(R);
    vec(s.W);
  };
  f(r.t);
  plant(r.truth, r.truth_R);
  plant(r.est, r.est_R);
  vec(r.des_x);
  vec(r.des_v);
  mat(r.des_R);
  vec(r.meas_x);
  mat(r.meas_R);
  vec(r.meas_W);
  vec(r.ebar_x);
  vec(r.ebar_v);
  f(r.psi);
  f(r.eR_norm);
  f(r.eW_norm);
  f(r.nees);
  f(r.P_min_eig);
  f(r.jac_max_rel);
}

// A record with its rotations expanded into plain matrices.
struct FlatRecord {
  double t;
  QuadrotorState truth, est;
  Mat3 truth_R, est_R;
  Vec3 des_x, des_v;
  Mat3 des_R;
  Vec3 meas_x;
  Mat3 meas_R;
  Vec3 meas_W;
  Vec3 ebar_x, ebar_v;
  double psi, eR_norm, eW_norm, nees, P_min_eig, jac_max_rel;
};

FlatRecord flatten(const TelemetryRecord& r) {
  return {r.t,      r.truth,     r.est,    r.truth.R.matrix(), r.est.R.matrix(), r.des_x,
          r.des_v,  r.des_R,     r.meas_x, r.meas_R,           r.meas_W,         r.ebar_x,
          r.ebar_v, r.psi,       r.eR_norm, r.eW_norm,         r.nees,           r.P_min_eig,
          r.jac_max_rel};
}

TelemetryRecord unflatten(const FlatRecord& f) {
  TelemetryRecord r;
  r.t = f.t;
  r.truth = f.truth;
  r.truth.R = Rotation::unchecked(f.truth_R);
  r.est = f.est;
  r.est.R = Rotation::unchecked(f.est_R);
  r.des_x = f.des_x;
  r.des_v = f.des_v;
  r.des_R = f.des_R;
  r.meas_x = f.meas_x;
  r.meas_R = f.meas_R;
  r.meas_W = f.meas_W;
  r.ebar_x = f.ebar_x;
  r.ebar_v = f.ebar_v;
  r.psi = f.psi;
  r.eR_norm = f.eR_norm;
  r.eW_norm = f.eW_norm;
  r.nees = f.nees;
  r.P_min_eig = f.P_min_eig;
  r.jac_max_rel = f.jac_max_rel;
  return r;
}

}  // namespace

std::vector<std::string> telemetry_header() {
  std::vector<std::string> h{"t"};
  plant_names(h, "truth");
  plant_names(h, "est");
  vec_names(h, "des.x");
  vec_names(h, "des.v");
  mat_names(h, "des.R");
  vec_names(h, "meas.x");
  mat_names(h, "meas.R");
  vec_names(h, "meas.W");
  vec_names(h, "ebar_x");
  vec_names(h, "ebar_v");
  for (const char* n : {"psi", "eR_norm", "eW_norm", "nees", "P_min_eig", "jac_max_rel"}) {
    h.push_back(n);
  }
  return h;
}

void write_csv(const std::vector<TelemetryRecord>& records, std::ostream& out) {
  const std::vector<std::string> header = telemetry_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  std::string line;
  for (const TelemetryRecord& r : records) {
    FlatRecord f = flatten(r);
    line.clear();
    bool first = true;
    visit(f, [&](double v) {
      if (!first) line += ',';
      first = false;
      line += format_double(v);
    });
    out << line << '\n';
  }
}

void write_csv(const std::vector<TelemetryRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::vector<TelemetryRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("telemetry is empty", 1);
  std::string expected;
  for (const std::string& h : telemetry_header()) expected += (expected.empty() ? "" : ",") + h;
  if (line != expected) throw ConfigError("telemetry header does not match the schema", 1);
  const std::size_t columns = telemetry_header().size();

  std::vector<TelemetryRecord> out;
  int number = 1;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    values.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
      try {
        values.push_back(parse_double(cell));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), number);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (values.size() != columns) {
      throw ConfigError("expected " + std::to_string(columns) + " columns, got " +
                            std::to_string(values.size()),
                        number);
    }
    FlatRecord f{};
    std::size_t k = 0;
    visit(f, [&](double& v) { v = values[k++]; });
    out.push_back(unflatten(f));
  }
  return out;
}

std::vector<TelemetryRecord> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_csv(in);
}

MetricsOptions metrics_options(const ScenarioConfig& c) {
  MetricsOptions o;
  o.converge_error = c.thresholds.converge_error > 0.0 ? c.thresholds.converge_error : 0.2;
  o.window_start = c.window_start;
  o.window_end = c.window_end;
  o.tracking_after = c.thresholds.tracking_after;
  return o;
}

Metrics compute_metrics(const std::vector<TelemetryRecord>& records, const MetricsOptions& opt) {
  Metrics m;
  m.steps = records.size();
  double sx = 0.0, sv = 0.0, sR = 0.0, sW = 0.0, sfd = 0.0, nees_sum = 0.0;
  std::size_t n_window = 0, n_fd = 0, n_nees = 0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const TelemetryRecord& r = records[k];
    const double ex = (r.est.x - r.truth.x).norm();
    const double ev = (r.est.v - r.truth.v).norm();
    if (std::isnan(m.convergence_time) && ex < opt.converge_error) m.convergence_time = r.t;
    m.max_position_error = std::max(m.max_position_error, ex);
    m.max_velocity_error = std::max(m.max_velocity_error, ev);
    m.min_covariance_eigenvalue = std::min(m.min_covariance_eigenvalue, r.P_min_eig);
    if (std::isfinite(r.nees)) {
      m.max_nees = std::max(m.max_nees, r.nees);
      nees_sum += r.nees;
      ++n_nees;
    }
    if (!std::isnan(r.jac_max_rel)) {
      m.max_jacobian_error =
          std::isnan(m.max_jacobian_error) ? r.jac_max_rel : std::max(m.max_jacobian_error, r.jac_max_rel);
    }
    if (r.t >= opt.tracking_after) {
      const double et = (r.truth.x - r.des_x).norm();
      m.max_tracking_error_after =
          std::isnan(m.max_tracking_error_after) ? et : std::max(m.max_tracking_error_after, et);
    }
    if (r.t >= opt.window_start && r.t <= opt.window_end) {
      // Rotation angle of R̄ᵀR, robust all the way to π.
      const Mat3 E = r.est.R.matrix().transpose() * r.truth.R.matrix();
      const double angle = std::atan2(vee_skew(E).norm(), 0.5 * (E.trace() - 1.0));
      sx += ex * ex;
      sv += ev * ev;
      sR += angle * angle;
      sW += (r.est.W - r.truth.W).squaredNorm();
      ++n_window;
      if (k > 0 && r.meas_x.allFinite() && records[k - 1].meas_x.allFinite()) {
        const Vec3 v_fd = (r.meas_x - records[k - 1].meas_x) / (r.t - records[k - 1].t);
        sfd += (v_fd - r.truth.v).squaredNorm();
        ++n_fd;
      }
    }
  }
  if (n_window > 0) {
    const double n = static_cast<double>(n_window);
    m.rmse_position = std::sqrt(sx / n);
    m.rmse_velocity = std::sqrt(sv / n);
    m.rmse_attitude = std::sqrt(sR / n);
    m.rmse_angular_velocity = std::sqrt(sW / n);
  }
  if (n_fd > 0) m.fd_velocity_rmse = std::sqrt(sfd / static_cast<double>(n_fd));
  if (n_nees > 0) m.mean_nees = nees_sum / static_cast<double>(n_nees);
  return m;
}

std::vector<ThresholdCheck> check_thresholds(const Metrics& m, const Thresholds& th) {
  std::vector<ThresholdCheck> out;
  auto nan_safe_le = [](double v, double lim) { return !std::isnan(v) && v <= lim; };
  if (th.converge_error > 0.0 && th.converge_time > 0.0) {
    out.push_back({"convergence_time", m.convergence_time, th.converge_time,
                   nan_safe_le(m.convergence_time, th.converge_time)});
  }
  if (th.max_position_error > 0.0) {
    out.push_back({"max_position_error", m.max_position_error, th.max_position_error,
                   m.max_position_error < th.max_position_error});
  }
  if (th.max_velocity_error > 0.0) {
    out.push_back({"max_velocity_error", m.max_velocity_error, th.max_velocity_error,
                   m.max_velocity_error < th.max_velocity_error});
  }
  if (th.velocity_rmse_ratio > 0.0) {
    const double ratio = m.fd_velocity_rmse / m.rmse_velocity;
    out.push_back({"velocity_rmse_ratio", ratio, th.velocity_rmse_ratio,
                   !std::isnan(ratio) && ratio >= th.velocity_rmse_ratio});
  }
  if (th.max_tracking_error > 0.0) {
    out.push_back({"max_tracking_error_after", m.max_tracking_error_after, th.max_tracking_error,
                   !std::isnan(m.max_tracking_error_after) &&
                       m.max_tracking_error_after < th.max_tracking_error});
  }
  out.push_back({"min_covariance_eigenvalue", m.min_covariance_eigenvalue,
                 th.min_covariance_eigenvalue,
                 m.min_covariance_eigenvalue >= th.min_covariance_eigenvalue});
  return out;
}

void write_metrics(const Metrics& m, std::ostream& out) {
  auto line = [&](const char* name, double v) { out << name << " = " << format_double(v) << '\n'; };
  out << "steps = " << m.steps << '\n';
  line("convergence_time", m.convergence_time);
  line("max_position_error", m.max_position_error);
  line("max_velocity_error", m.max_velocity_error);
  line("rmse_position", m.rmse_position);
  line("rmse_velocity", m.rmse_velocity);
  line("rmse_attitude", m.rmse_attitude);
  line("rmse_angular_velocity", m.rmse_angular_velocity);
  line("fd_velocity_rmse", m.fd_velocity_rmse);
  line("max_tracking_error_after", m.max_tracking_error_after);
  line("min_covariance_eigenvalue", m.min_covariance_eigenvalue);
  line("max_nees", m.max_nees);
  line("mean_nees", m.mean_nees);
  line("max_jacobian_error", m.max_jacobian_error);
}

}  // namespace se3ekf
