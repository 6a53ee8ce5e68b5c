#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "lldp/errors.hpp"
#include "lldp/expm.hpp"
#include "lldp/matrix.hpp"
#include "lldp/problem.hpp"
#include "lldp/tableau.hpp"

namespace lldp {

enum class Method { lldp45, dp45 };

inline constexpr std::string_view method_name(Method m) noexcept {
  return m == Method::lldp45 ? "lldp45" : "dp45";
}

/// Work counters, incremented as evaluations are attempted.
struct EvalCounts {
  std::size_t f_evals = 0;
  std::size_t jacobian_evals = 0;
  std::size_t expm_evals = 0;
};

using StageArray = std::array<Vector, EmbeddedTableau::stages>;

/// Everything one embedded step produces.
struct StepOutcome {
  Vector y5;       // fifth-order result
  Vector y4;       // embedded fourth-order result
  StageArray stages;
  Vector u_s;      // linear increment at c = 1 (zero for DP)
  Vector err_vec;  // h·Σ(b_j - b̂_j)·k_j, equal to y5 - y4 up to rounding
  Vector fsal_f;   // f(t + h, y5), reusable as the next step's f(t_n, y_n)
  std::optional<DenseMatrix> d_n;
};

namespace detail {

inline const EmbeddedTableau& tableau() {
  static constexpr EmbeddedTableau t = dp45_tableau();
  return t;
}

// Chain fraction holding e^{D·c_j·h} for stage j (0-based); stage 0 has c = 0.
inline constexpr std::array<ChainFraction, EmbeddedTableau::stages> stage_fraction{
    ChainFraction::one, ChainFraction::one_fifth, ChainFraction::three_tenths, ChainFraction::four_fifths,
    ChainFraction::eight_ninths, ChainFraction::one, ChainFraction::one};

// h·Σ_{i<j} a_{j,i} k_i, accumulated in stage order.
inline Vector stage_combination(const std::array<double, EmbeddedTableau::stages>& weights,
                                const StageArray& k, std::size_t count, std::size_t d) {
  Vector acc(d, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double w = weights[i];
    for (std::size_t r = 0; r < d; ++r) acc[r] += w * k[i][r];
  }
  return acc;
}

inline void require_step(const OdeProblem& p, const Vector& y, double h, const std::optional<Vector>& fsal_in) {
  if (!(h > 0.0) || !std::isfinite(h)) throw usage_error("step size must be positive and finite");
  if (y.size() != p.dimension) throw usage_error("state has wrong length");
  if (fsal_in && fsal_in->size() != p.dimension) throw usage_error("fsal value has wrong length");
}

inline void require_finite(const Vector& v, const char* what) {
  if (!all_finite(v)) throw computation_error(std::string("non-finite ") + what);
}

}  // namespace detail

/// One embedded locally linearized Dormand–Prince step from (t, y) with step h.
///
/// The linear part is integrated through one augmented exponential chain;
/// the Dormand–Prince stages only see the nonlinear remainder
///   k_j = f(t + c_j h, y + u_j + h Σ a_{j,i} k_i) - f(t, y) - J u_j - f_t c_j h,
/// with k_1 = 0. Throws computation_error when the exponential or a stage
/// is not finite; callers treat that as a rejected step.
inline StepOutcome lldp_step(const OdeProblem& p, double t, const Vector& y, double h, PadeOrder order,
                             const std::optional<Vector>& fsal_in, EvalCounts& counts) {
  detail::require_step(p, y, h, fsal_in);
  const auto& tab = detail::tableau();
  const std::size_t d = p.dimension;

  const Vector f0 = fsal_in ? *fsal_in : eval_f(p, t, y, counts.f_evals);
  ++counts.jacobian_evals;
  const DenseMatrix jac = eval_jacobian(p, t, y);
  std::optional<Vector> ft;
  if (!p.autonomous) ft = eval_time_derivative(p, t, y, f0);
  AugmentedSystem aug = assemble_augmented(jac, f0, ft);

  ++counts.expm_evals;
  const ExpChain chain = exp_chain(aug.d_n, h, order);

  StepOutcome out;
  out.stages[0] = Vector(d, 0.0);
  Vector u_j;
  for (std::size_t j = 1; j < EmbeddedTableau::stages; ++j) {
    u_j = extract_u(chain.at(detail::stage_fraction[j]), d);
    const Vector acc = detail::stage_combination(tab.a[j], out.stages, j, d);
    Vector arg(d);
    for (std::size_t r = 0; r < d; ++r) arg[r] = (y[r] + u_j[r]) + h * acc[r];

    const double ch = tab.c[j] * h;
    Vector fj = eval_f(p, t + ch, arg, counts.f_evals);
    const Vector ju = mat_vec(jac, u_j);
    Vector& k = out.stages[j];
    k.resize(d);
    for (std::size_t r = 0; r < d; ++r) {
      k[r] = fj[r] - f0[r] - ju[r];
      if (ft) k[r] -= (*ft)[r] * ch;
    }
    if (j + 1 == EmbeddedTableau::stages) out.fsal_f = std::move(fj);
  }
  out.u_s = std::move(u_j);

  const Vector acc5 = detail::stage_combination(tab.b, out.stages, EmbeddedTableau::stages, d);
  const Vector acc4 = detail::stage_combination(tab.b_hat, out.stages, EmbeddedTableau::stages, d);
  const Vector acce = detail::stage_combination(tab.e, out.stages, EmbeddedTableau::stages, d);
  out.y5.resize(d);
  out.y4.resize(d);
  out.err_vec.resize(d);
  for (std::size_t r = 0; r < d; ++r) {
    out.y5[r] = (y[r] + out.u_s[r]) + h * acc5[r];
    out.y4[r] = (y[r] + out.u_s[r]) + h * acc4[r];
    out.err_vec[r] = h * acce[r];
  }
  detail::require_finite(out.y5, "fifth-order state");
  detail::require_finite(out.y4, "fourth-order state");
  out.d_n = std::move(aug.d_n);
  return out;
}

/// Classical embedded Dormand–Prince 5(4) step with FSAL reuse.
inline StepOutcome dp_step(const OdeProblem& p, double t, const Vector& y, double h,
                           const std::optional<Vector>& fsal_in, EvalCounts& counts) {
  detail::require_step(p, y, h, fsal_in);
  const auto& tab = detail::tableau();
  const std::size_t d = p.dimension;

  StepOutcome out;
  out.stages[0] = fsal_in ? *fsal_in : eval_f(p, t, y, counts.f_evals);
  for (std::size_t j = 1; j < EmbeddedTableau::stages; ++j) {
    const Vector acc = detail::stage_combination(tab.a[j], out.stages, j, d);
    Vector arg(d);
    for (std::size_t r = 0; r < d; ++r) arg[r] = y[r] + h * acc[r];
    out.stages[j] = eval_f(p, t + tab.c[j] * h, arg, counts.f_evals);
  }
  out.fsal_f = out.stages[EmbeddedTableau::stages - 1];
  out.u_s = Vector(d, 0.0);

  const Vector acc5 = detail::stage_combination(tab.b, out.stages, EmbeddedTableau::stages, d);
  const Vector acc4 = detail::stage_combination(tab.b_hat, out.stages, EmbeddedTableau::stages, d);
  const Vector acce = detail::stage_combination(tab.e, out.stages, EmbeddedTableau::stages, d);
  out.y5.resize(d);
  out.y4.resize(d);
  out.err_vec.resize(d);
  for (std::size_t r = 0; r < d; ++r) {
    out.y5[r] = y[r] + h * acc5[r];
    out.y4[r] = y[r] + h * acc4[r];
    out.err_vec[r] = h * acce[r];
  }
  detail::require_finite(out.y5, "fifth-order state");
  detail::require_finite(out.y4, "fourth-order state");
  return out;
}

inline StepOutcome take_step(Method method, const OdeProblem& p, double t, const Vector& y, double h,
                             PadeOrder order, const std::optional<Vector>& fsal_in, EvalCounts& counts) {
  return method == Method::lldp45 ? lldp_step(p, t, y, h, order, fsal_in, counts)
                                  : dp_step(p, t, y, h, fsal_in, counts);
}

/// Continuous extension over one accepted step [t_n, t_n + h].
struct DenseInterpolant {
  Method method = Method::dp45;
  double t_n = 0.0;
  double h = 0.0;
  Vector y_n;
  StageArray stages;
  std::optional<DenseMatrix> d_n;  // LLDP only
  Vector u_s;                      // LLDP linear increment at θ = 1, from the step's chain
};

inline DenseInterpolant make_interpolant(Method method, double t_n, double h, Vector y_n, const StepOutcome& step) {
  return DenseInterpolant{method, t_n, h, std::move(y_n), step.stages, step.d_n, step.u_s};
}

/// State at t_n + θ·h. The LLDP form recomputes the linear increment with a
/// fresh scaled Padé exponential at θ·h for interior θ; at θ = 1 it reuses
/// the step's own increment so the interpolant closes on y5.
inline Vector eval_dense(const DenseInterpolant& di, double theta, PadeOrder order = {}) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw usage_error("eval_dense: theta must lie in [0, 1]");
  const auto& tab = detail::tableau();
  const std::size_t d = di.y_n.size();

  std::array<double, EmbeddedTableau::stages> weights{};
  for (std::size_t j = 0; j < EmbeddedTableau::stages; ++j) weights[j] = tab.dense_weight(j, theta);
  const Vector acc = detail::stage_combination(weights, di.stages, EmbeddedTableau::stages, d);

  Vector y(d);
  if (di.method == Method::lldp45) {
    if (!di.d_n) throw usage_error("eval_dense: LLDP interpolant has no augmented matrix");
    const Vector u = (theta == 1.0 && di.u_s.size() == d) ? di.u_s
                                                          : extract_u(expm(*di.d_n, theta * di.h, order).value, d);
    for (std::size_t r = 0; r < d; ++r) y[r] = (di.y_n[r] + u[r]) + di.h * acc[r];
  } else {
    for (std::size_t r = 0; r < d; ++r) y[r] = di.y_n[r] + di.h * acc[r];
  }
  return y;
}

}  // namespace lldp
