#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lldp/errors.hpp"
#include "lldp/matrix.hpp"
#include "lldp/problem.hpp"
#include "lldp/stepper.hpp"

namespace lldp {

struct AdaptiveConfig {
  double rtol = 1e-3;
  double atol = 1e-6;
  /// Defaults to (t_end - t0)/10 when unset.
  std::optional<double> h_max;
  /// Defaults to 16·eps·max(|t0|, |t_end|) when unset.
  std::optional<double> h_min;
  PadeOrder pade{};
  Method method = Method::lldp45;
  /// Keep one DenseInterpolant per accepted step in the SolutionPath.
  bool store_dense = true;
  std::size_t max_steps = 100'000'000;

  /// tr = atol/rtol, the floor of the error-weight denominators.
  double threshold() const noexcept { return atol / rtol; }
};

/// Copy of `cfg` with h_max/h_min filled in from the problem interval.
inline AdaptiveConfig resolve_config(AdaptiveConfig cfg, const OdeProblem& p) {
  if (!(cfg.rtol > 0.0 && cfg.rtol < 1.0)) throw usage_error("rtol must lie in (0, 1)");
  if (!(cfg.atol > 0.0)) throw usage_error("atol must be positive");
  if (cfg.method == Method::lldp45) require_valid(cfg.pade);
  if (!cfg.h_max) cfg.h_max = (p.t_end - p.t0) / 10.0;
  if (!cfg.h_min) {
    cfg.h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(p.t0), std::abs(p.t_end));
  }
  if (!(*cfg.h_min < *cfg.h_max)) throw usage_error("h_min must be smaller than h_max");
  return cfg;
}

struct SolverStats {
  std::size_t accepted_steps = 0;
  std::size_t failed_steps = 0;
  std::size_t f_evals = 0;
  std::size_t jacobian_evals = 0;
  std::size_t expm_evals = 0;
  std::chrono::duration<double> wall_time{0.0};
};

struct SolutionPath {
  Method method = Method::lldp45;
  PadeOrder pade{};
  std::vector<double> mesh;
  std::vector<Vector> states;
  std::vector<DenseInterpolant> interpolants;
  SolverStats stats;

  std::size_t steps() const noexcept { return mesh.empty() ? 0 : mesh.size() - 1; }

  /// Dense evaluation at any t inside [mesh.front(), mesh.back()].
  Vector evaluate(double t) const {
    if (interpolants.empty()) throw usage_error("SolutionPath::evaluate: no interpolants stored");
    if (t < mesh.front() || t > mesh.back()) throw usage_error("SolutionPath::evaluate: t outside the mesh");
    auto it = std::upper_bound(mesh.begin(), mesh.end(), t);
    if (it == mesh.end()) return states.back();
    const std::size_t n = static_cast<std::size_t>(it - mesh.begin()) - 1;
    if (t == mesh[n]) return states[n];
    const DenseInterpolant& di = interpolants[n];
    const double theta = std::clamp((t - di.t_n) / di.h, 0.0, 1.0);
    return eval_dense(di, theta, pade);
  }
};

/// Called once per accepted step with its interpolant and end point.
using StepObserver = std::function<void(const DenseInterpolant& step, double t_next, const Vector& y_next)>;

namespace detail {

inline double initial_step_from(const Vector& y0, const Vector& f0, const AdaptiveConfig& cfg) {
  const double tr = cfg.threshold();
  double rate = 0.0;
  for (std::size_t i = 0; i < y0.size(); ++i) rate = std::max(rate, std::abs(f0[i]) / std::max(std::abs(y0[i]), tr));
  rate /= 0.8 * std::pow(cfg.rtol, 0.2);
  const double h_max = *cfg.h_max;
  const double delta = (h_max * rate > 1.0) ? 1.0 / rate : h_max;
  return std::min(h_max, std::max(*cfg.h_min, delta));
}

}  // namespace detail

/// First step size from the scaled magnitude of f(t0, x0).
inline double initial_step(const OdeProblem& p, const AdaptiveConfig& cfg) {
  p.validate();
  const AdaptiveConfig rc = resolve_config(cfg, p);
  std::size_t unused = 0;
  const Vector f0 = eval_f(p, p.t0, p.x0, unused);
  return detail::initial_step_from(p.x0, f0, rc);
}

/// ‖err_i / max(|y_prev_i|, |y5_i|, tr)‖_∞.
inline double error_norm(std::span<const double> y_prev, std::span<const double> y5, std::span<const double> err_vec,
                         const AdaptiveConfig& cfg) {
  if (y_prev.size() != y5.size() || y5.size() != err_vec.size()) throw usage_error("error_norm: length mismatch");
  const double tr = cfg.threshold();
  double worst = 0.0;
  for (std::size_t i = 0; i < err_vec.size(); ++i) {
    const double scale = std::max({std::abs(y_prev[i]), std::abs(y5[i]), tr});
    worst = std::max(worst, std::abs(err_vec[i]) / scale);
  }
  return worst;
}

/// Next step size: growth on acceptance, a 0.1-floored shrink on the first
/// rejection and halving on repeated rejections; clamped to [h_min, h_max].
inline double next_step(double h, double error, bool fail, const AdaptiveConfig& cfg) {
  if (!cfg.h_max || !cfg.h_min) throw usage_error("next_step: config has unresolved step limits");
  double delta;
  if (error <= cfg.rtol) {
    delta = (error == 0.0) ? *cfg.h_max : 0.8 * std::pow(cfg.rtol / error, 0.2) * h;
  } else if (!fail) {
    delta = std::max(0.1, 0.8 * std::pow(cfg.rtol / error, 0.2)) * h;
  } else {
    delta = 0.5 * h;
  }
  return std::min(*cfg.h_max, std::max(*cfg.h_min, delta));
}

/// Adaptive integration of `p` over [t0, t_end].
///
/// A step whose exponential or stages cannot be computed counts as rejected
/// with infinite error. Throws integration_error when a step at h_min is
/// rejected.
inline SolutionPath integrate(const OdeProblem& p, const AdaptiveConfig& cfg, const StepObserver& observer = {}) {
  p.validate();
  const AdaptiveConfig rc = resolve_config(cfg, p);
  const auto started = std::chrono::steady_clock::now();

  SolutionPath path;
  path.method = rc.method;
  path.pade = rc.pade;
  path.mesh.push_back(p.t0);
  path.states.push_back(p.x0);

  EvalCounts counts;
  double t = p.t0;
  Vector y = p.x0;
  Vector fsal = eval_f(p, t, y, counts.f_evals);
  double h = detail::initial_step_from(y, fsal, rc);
  bool fail = false;
  double error = 0.0;
  const bool want_dense = rc.store_dense || static_cast<bool>(observer);

  while (true) {
    bool last = false;
    if (h >= p.t_end - t) {
      h = p.t_end - t;
      last = true;
    }

    std::optional<StepOutcome> step;
    try {
      step = take_step(rc.method, p, t, y, h, rc.pade, fsal, counts);
      error = error_norm(y, step->y5, step->err_vec, rc);
      if (std::isnan(error)) error = std::numeric_limits<double>::infinity();
    } catch (const computation_error&) {
      step.reset();
      error = std::numeric_limits<double>::infinity();
    }

    double h_new = next_step(h, error, fail, rc);

    if (error <= rc.rtol) {
      ++path.stats.accepted_steps;
      const double t_next = last ? p.t_end : t + h;
      if (want_dense) {
        DenseInterpolant di = make_interpolant(rc.method, t, h, y, *step);
        if (observer) observer(di, t_next, step->y5);
        if (rc.store_dense) path.interpolants.push_back(std::move(di));
      }
      y = std::move(step->y5);
      fsal = std::move(step->fsal_f);
      t = t_next;
      path.mesh.push_back(t);
      path.states.push_back(y);
      if (last) break;
      if (path.stats.accepted_steps >= rc.max_steps) {
        throw integration_error("integrate: maximum number of steps reached", t, error);
      }
      // A leftover shorter than h_min is folded into the next step.
      if (t + h_new > p.t_end || p.t_end - (t + h_new) < *rc.h_min) h_new = p.t_end - t;
      fail = false;
    } else {
      ++path.stats.failed_steps;
      if (h <= *rc.h_min) {
        throw integration_error("integrate: step size fell below h_min at t=" + std::to_string(t), t, error);
      }
      fail = true;
    }
    h = h_new;
  }

  path.stats.f_evals = counts.f_evals;
  path.stats.jacobian_evals = counts.jacobian_evals;
  path.stats.expm_evals = counts.expm_evals;
  path.stats.wall_time = std::chrono::steady_clock::now() - started;
  return path;
}

/// Steps `method` across a prescribed mesh with no error control. With
/// `propagate_embedded` the fourth-order result is carried forward instead.
/// Throws computation_error (with the failing time) if a step cannot be formed.
inline SolutionPath integrate_on_mesh(const OdeProblem& p, Method method, std::span<const double> mesh,
                                      PadeOrder order = {}, bool propagate_embedded = false) {
  p.validate();
  if (mesh.size() < 2) throw usage_error("integrate_on_mesh: mesh needs at least two points");
  if (method == Method::lldp45) require_valid(order);
  const auto started = std::chrono::steady_clock::now();

  SolutionPath path;
  path.method = method;
  path.pade = order;
  path.mesh.assign(mesh.begin(), mesh.end());
  path.states.reserve(mesh.size());
  path.states.push_back(p.x0);

  EvalCounts counts;
  Vector y = p.x0;
  std::optional<Vector> fsal;
  for (std::size_t n = 0; n + 1 < mesh.size(); ++n) {
    const double h = mesh[n + 1] - mesh[n];
    if (!(h > 0.0)) throw usage_error("integrate_on_mesh: mesh must be strictly increasing");
    StepOutcome step;
    try {
      step = take_step(method, p, mesh[n], y, h, order, fsal, counts);
    } catch (const computation_error& e) {
      throw computation_error("integrate_on_mesh: step from t=" + std::to_string(mesh[n]) + " failed: " + e.what());
    }
    y = propagate_embedded ? std::move(step.y4) : std::move(step.y5);
    if (propagate_embedded) {
      fsal.reset();
    } else {
      fsal = std::move(step.fsal_f);
    }
    path.states.push_back(y);
    ++path.stats.accepted_steps;
  }
  path.stats.f_evals = counts.f_evals;
  path.stats.jacobian_evals = counts.jacobian_evals;
  path.stats.expm_evals = counts.expm_evals;
  path.stats.wall_time = std::chrono::steady_clock::now() - started;
  return path;
}

}  // namespace lldp
