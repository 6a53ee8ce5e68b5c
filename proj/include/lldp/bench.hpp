#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lldp/adaptive.hpp"
#include "lldp/errors.hpp"
#include "lldp/testset.hpp"

namespace lldp::bench {

/// Raised when the two reference integrations disagree.
class reference_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ToleranceSet {
  std::string label;
  double rtol;
  double atol;
};

inline const ToleranceSet crude{"crude", 1e-3, 1e-6};
inline const ToleranceSet mild{"mild", 1e-6, 1e-9};
inline const ToleranceSet refined{"refined", 1e-9, 1e-12};

inline ToleranceSet tolerance_by_label(std::string_view label) {
  if (label == "crude") return crude;
  if (label == "mild") return mild;
  if (label == "refined") return refined;
  throw usage_error("unknown tolerance set '" + std::string(label) + "'");
}

/// ok; failed (the method could not complete); reference_failed (no
/// trustworthy reference, so no error could be scored).
enum class Status { ok, failed, reference_failed };

inline constexpr std::string_view status_name(Status s) noexcept {
  switch (s) {
    case Status::ok:
      return "ok";
    case Status::failed:
      return "failed";
    case Status::reference_failed:
      return "reference_failed";
  }
  return "failed";
}

/// One row of a benchmark table.
struct SimulationReport {
  char simulation = 'B';
  std::string problem;
  Method method = Method::dp45;
  std::string tolerance;
  double scale = 1.0;
  double rtol = 0.0;
  double atol = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t failed_steps = 0;
  std::size_t f_evals = 0;
  std::size_t jacobian_evals = 0;
  std::size_t expm_evals = 0;
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double wall_time = 0.0;
  std::size_t dense_points = 0;
  Status status = Status::ok;
  /// Failure description; not serialized.
  std::string message;
};

struct SimulationOptions {
  PadeOrder pade{};
  std::optional<double> h_max;
};

/// Maximum over samples and components of |x - y|/|x|, skipping components
/// with |x| < 1e-12.
inline double relative_error(const std::vector<Vector>& reference, const std::vector<Vector>& approx) {
  if (reference.empty()) throw usage_error("relative_error: empty sample set");
  if (reference.size() != approx.size()) throw usage_error("relative_error: sample counts differ");
  double worst = 0.0;
  for (std::size_t s = 0; s < reference.size(); ++s) {
    const Vector& x = reference[s];
    const Vector& y = approx[s];
    if (x.size() != y.size()) throw usage_error("relative_error: dimensions differ");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) < 1e-12) continue;
      const double q = std::abs((x[i] - y[i]) / x[i]);
      if (std::isnan(q)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, q);
    }
  }
  return worst;
}

inline constexpr double reference_rtol = 1e-12;
inline constexpr double reference_atol = 1e-14;
inline constexpr double reference_agreement = 1e-7;

/// Cross-check measure between two reference integrations: componentwise
/// |x - y| / max(|x|, atol/rtol), the weighting the integrator itself controls.
inline double reference_disagreement(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) throw usage_error("reference_disagreement: sample counts differ");
  constexpr double floor = reference_atol / reference_rtol;
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    for (std::size_t i = 0; i < a[s].size(); ++i) {
      const double q = std::abs(a[s][i] - b[s][i]) / std::max(std::abs(a[s][i]), floor);
      if (std::isnan(q)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, q);
    }
  }
  return worst;
}

namespace detail {

// Integrates with dense output and samples the continuous solution at the
// sorted times, without keeping the interpolants.
inline std::vector<Vector> sample_integration(const OdeProblem& p, const AdaptiveConfig& cfg,
                                              const std::vector<double>& times) {
  std::vector<Vector> out(times.size());
  std::size_t next = 0;
  while (next < times.size() && times[next] <= p.t0) out[next++] = p.x0;

  AdaptiveConfig c = cfg;
  c.store_dense = false;
  const PadeOrder order = c.pade;
  integrate(p, c, [&](const DenseInterpolant& di, double t_next, const Vector& y_next) {
    while (next < times.size() && times[next] <= t_next) {
      const double tau = times[next];
      out[next++] = (tau == t_next) ? y_next : eval_dense(di, std::clamp((tau - di.t_n) / di.h, 0.0, 1.0), order);
    }
  });
  if (next != times.size()) throw usage_error("reference sample times extend beyond the interval");
  return out;
}

inline void require_sorted(const std::vector<double>& times) {
  if (!std::is_sorted(times.begin(), times.end())) throw usage_error("sample times must be sorted");
}

}  // namespace detail

/// Reference states at the given sorted times: closed form when available,
/// otherwise a tight-tolerance LLDP (6,6) integration that must agree with a
/// DP integration at the same tolerances to reference_agreement.
inline std::vector<Vector> reference_solution(const testset::NamedProblem& np, const std::vector<double>& times) {
  detail::require_sorted(times);
  if (np.analytic_reference) {
    std::vector<Vector> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(np.analytic_reference(t));
    return out;
  }

  AdaptiveConfig cfg;
  cfg.rtol = reference_rtol;
  cfg.atol = reference_atol;
  cfg.pade = PadeOrder{6, 6};
  cfg.method = Method::lldp45;
  std::vector<Vector> primary = detail::sample_integration(np.problem, cfg, times);
  cfg.method = Method::dp45;
  const std::vector<Vector> check = detail::sample_integration(np.problem, cfg, times);

  const double disagreement = reference_disagreement(primary, check);
  if (!(disagreement <= reference_agreement)) {
    std::ostringstream os;
    os << "reference for '" << np.name << "' failed the cross-check: LLDP and DP disagree by " << disagreement;
    throw reference_error(os.str());
  }
  return primary;
}

inline std::vector<Vector> reference_solution(std::string_view name, const std::vector<double>& times) {
  return reference_solution(testset::make_problem(name), times);
}

namespace detail {

inline SimulationReport blank_row(char sim, const testset::NamedProblem& np, Method m, const ToleranceSet& tol,
                                  double scale) {
  SimulationReport r;
  r.simulation = sim;
  r.problem = np.name;
  r.method = m;
  r.tolerance = tol.label;
  r.scale = scale;
  r.rtol = tol.rtol * scale;
  r.atol = tol.atol * scale;
  return r;
}

inline void fill_stats(SimulationReport& r, const SolverStats& s) {
  r.accepted_steps = s.accepted_steps;
  r.failed_steps = s.failed_steps;
  r.f_evals = s.f_evals;
  r.jacobian_evals = s.jacobian_evals;
  r.expm_evals = s.expm_evals;
  r.wall_time = s.wall_time.count();
}

inline AdaptiveConfig config_for(const SimulationReport& row, const SimulationOptions& opt, bool dense) {
  AdaptiveConfig cfg;
  cfg.rtol = row.rtol;
  cfg.atol = row.atol;
  cfg.method = row.method;
  cfg.pade = opt.pade;
  cfg.h_max = opt.h_max;
  cfg.store_dense = dense;
  return cfg;
}

inline void mark_failed(SimulationReport& r, const std::string& why, Status status = Status::failed) {
  r.status = status;
  r.relative_error = std::numeric_limits<double>::quiet_NaN();
  r.message = why;
}

// Adaptive run scored on its own mesh.
inline SimulationReport run_adaptive(char sim, const testset::NamedProblem& np, Method m, const ToleranceSet& tol,
                                     double scale, const SimulationOptions& opt) {
  SimulationReport row = blank_row(sim, np, m, tol, scale);
  try {
    const SolutionPath path = integrate(np.problem, config_for(row, opt, false));
    fill_stats(row, path.stats);
    row.relative_error = relative_error(reference_solution(np, path.mesh), path.states);
  } catch (const reference_error& e) {
    mark_failed(row, e.what(), Status::reference_failed);
  } catch (const integration_error& e) {
    mark_failed(row, e.what());
  } catch (const computation_error& e) {
    mark_failed(row, e.what());
  }
  return row;
}

}  // namespace detail

/// Same partition: DP fixes the mesh adaptively, the LLDP fifth-order formula
/// is then stepped over that mesh without error control. Returns {DP, LLDP}.
inline std::vector<SimulationReport> simulation_a(const testset::NamedProblem& np, const ToleranceSet& tol,
                                                  const SimulationOptions& opt = {}) {
  SimulationReport dp = detail::blank_row('A', np, Method::dp45, tol, 1.0);
  SimulationReport ll = detail::blank_row('A', np, Method::lldp45, tol, 1.0);

  SolutionPath dp_path;
  try {
    dp_path = integrate(np.problem, detail::config_for(dp, opt, false));
  } catch (const std::runtime_error& e) {
    detail::mark_failed(dp, e.what());
    detail::mark_failed(ll, "no mesh: DP integration failed");
    return {dp, ll};
  }
  detail::fill_stats(dp, dp_path.stats);
  std::vector<Vector> ref;
  try {
    ref = reference_solution(np, dp_path.mesh);
  } catch (const reference_error& e) {
    detail::mark_failed(dp, e.what(), Status::reference_failed);
    detail::mark_failed(ll, e.what(), Status::reference_failed);
    return {dp, ll};
  }
  dp.relative_error = relative_error(ref, dp_path.states);

  ll.accepted_steps = dp_path.steps();
  try {
    const SolutionPath ll_path = integrate_on_mesh(np.problem, Method::lldp45, dp_path.mesh, opt.pade);
    detail::fill_stats(ll, ll_path.stats);
    ll.relative_error = relative_error(ref, ll_path.states);
  } catch (const computation_error& e) {
    detail::mark_failed(ll, e.what());
  }
  return {dp, ll};
}

/// Same tolerance: each method on its own adaptive mesh. Returns {DP, LLDP}.
inline std::vector<SimulationReport> simulation_b(const testset::NamedProblem& np, const ToleranceSet& tol,
                                                  const SimulationOptions& opt = {}) {
  return {detail::run_adaptive('B', np, Method::dp45, tol, 1.0, opt),
          detail::run_adaptive('B', np, Method::lldp45, tol, 1.0, opt)};
}

/// Matched accuracy: DP at the base tolerance, LLDP at scale times both
/// tolerances. Returns {DP, LLDP}.
inline std::vector<SimulationReport> simulation_c(const testset::NamedProblem& np, const ToleranceSet& tol,
                                                  double scale, const SimulationOptions& opt = {}) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw usage_error("simulation_c: scale must be positive");
  if (!(tol.rtol * scale < 1.0)) throw usage_error("simulation_c: scaled rtol must stay below 1");
  return {detail::run_adaptive('C', np, Method::dp45, tol, 1.0, opt),
          detail::run_adaptive('C', np, Method::lldp45, tol, scale, opt)};
}

/// Dense output: each accepted step is sampled at θ = k/refine, k = 1..refine
/// (θ = 1 is the mesh state), plus t0. Returns {DP, LLDP}.
inline std::vector<SimulationReport> simulation_d(const testset::NamedProblem& np, const ToleranceSet& tol,
                                                  std::size_t refine, const SimulationOptions& opt = {}) {
  if (refine == 0) throw usage_error("simulation_d: refine must be at least 1");
  std::vector<SimulationReport> rows;
  for (Method m : {Method::dp45, Method::lldp45}) {
    SimulationReport row = detail::blank_row('D', np, m, tol, 1.0);
    try {
      const SolutionPath path = integrate(np.problem, detail::config_for(row, opt, true));
      detail::fill_stats(row, path.stats);
      std::vector<double> times{path.mesh.front()};
      std::vector<Vector> approx{path.states.front()};
      for (std::size_t n = 0; n < path.steps(); ++n) {
        const DenseInterpolant& di = path.interpolants[n];
        for (std::size_t k = 1; k < refine; ++k) {
          const double theta = static_cast<double>(k) / static_cast<double>(refine);
          times.push_back(di.t_n + theta * di.h);
          approx.push_back(eval_dense(di, theta, path.pade));
        }
        times.push_back(path.mesh[n + 1]);
        approx.push_back(path.states[n + 1]);
      }
      row.dense_points = times.size();
      row.relative_error = relative_error(reference_solution(np, times), approx);
    } catch (const reference_error& e) {
      detail::mark_failed(row, e.what(), Status::reference_failed);
    } catch (const integration_error& e) {
      detail::mark_failed(row, e.what());
    } catch (const computation_error& e) {
      detail::mark_failed(row, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Report serialization

enum class Format { csv, markdown };

inline constexpr std::array<std::string_view, 16> report_columns{
    "simulation", "problem",        "method",     "tolerance",      "scale",          "rtol",
    "atol",       "accepted_steps", "failed_steps", "f_evals",      "jacobian_evals", "expm_evals",
    "relative_error", "wall_time_s", "dense_points", "status"};

struct EmitOptions {
  Format format = Format::csv;
  /// When false the wall-time column is written as zero so that repeated
  /// runs produce identical bytes.
  bool include_timing = true;
};

namespace detail {

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

inline std::vector<std::string> row_fields(const SimulationReport& r, bool timing) {
  return {std::string(1, r.simulation),
          r.problem,
          std::string(method_name(r.method)),
          r.tolerance,
          format_real(r.scale),
          format_real(r.rtol),
          format_real(r.atol),
          std::to_string(r.accepted_steps),
          std::to_string(r.failed_steps),
          std::to_string(r.f_evals),
          std::to_string(r.jacobian_evals),
          std::to_string(r.expm_evals),
          format_real(r.relative_error),
          format_real(timing ? r.wall_time : 0.0),
          std::to_string(r.dense_points),
          std::string(status_name(r.status))};
}

inline double parse_real(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw usage_error("malformed number '" + s + "'");
  return v;
}

inline std::size_t parse_count(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw usage_error("malformed count '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace detail

inline void emit_report(const std::vector<SimulationReport>& reports, std::ostream& out, const EmitOptions& opt = {}) {
  if (opt.format == Format::csv) {
    for (std::size_t c = 0; c < report_columns.size(); ++c) out << (c ? "," : "") << report_columns[c];
    out << '\n';
    for (const auto& r : reports) {
      const auto fields = detail::row_fields(r, opt.include_timing);
      for (std::size_t c = 0; c < fields.size(); ++c) out << (c ? "," : "") << fields[c];
      out << '\n';
    }
    return;
  }
  out << '|';
  for (auto col : report_columns) out << ' ' << col << " |";
  out << "\n|";
  for (std::size_t c = 0; c < report_columns.size(); ++c) out << "---|";
  out << '\n';
  for (const auto& r : reports) {
    out << '|';
    for (const auto& f : detail::row_fields(r, opt.include_timing)) out << ' ' << f << " |";
    out << '\n';
  }
}

inline void emit_report(const std::vector<SimulationReport>& reports, const std::string& path,
                        const EmitOptions& opt = {}) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw usage_error("cannot open report file '" + path + "' for writing");
  emit_report(reports, file, opt);
  file.flush();
  if (!file) throw usage_error("failed writing report file '" + path + "'");
}

/// Reads back a CSV written by emit_report.
inline std::vector<SimulationReport> parse_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw usage_error("report: missing header");
  std::string expected;
  for (std::size_t c = 0; c < report_columns.size(); ++c) expected += (c ? "," : "") + std::string(report_columns[c]);
  if (line != expected) throw usage_error("report: unexpected header");

  std::vector<SimulationReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != report_columns.size()) throw usage_error("report: wrong field count in '" + line + "'");
    SimulationReport r;
    if (f[0].size() != 1) throw usage_error("report: bad simulation tag");
    r.simulation = f[0][0];
    r.problem = f[1];
    if (f[2] == "lldp45") {
      r.method = Method::lldp45;
    } else if (f[2] == "dp45") {
      r.method = Method::dp45;
    } else {
      throw usage_error("report: unknown method '" + f[2] + "'");
    }
    r.tolerance = f[3];
    r.scale = detail::parse_real(f[4]);
    r.rtol = detail::parse_real(f[5]);
    r.atol = detail::parse_real(f[6]);
    r.accepted_steps = detail::parse_count(f[7]);
    r.failed_steps = detail::parse_count(f[8]);
    r.f_evals = detail::parse_count(f[9]);
    r.jacobian_evals = detail::parse_count(f[10]);
    r.expm_evals = detail::parse_count(f[11]);
    r.relative_error = detail::parse_real(f[12]);
    r.wall_time = detail::parse_real(f[13]);
    r.dense_points = detail::parse_count(f[14]);
    if (f[15] == "ok") {
      r.status = Status::ok;
    } else if (f[15] == "failed") {
      r.status = Status::failed;
    } else if (f[15] == "reference_failed") {
      r.status = Status::reference_failed;
    } else {
      throw usage_error("report: unknown status '" + f[15] + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace lldp::bench
