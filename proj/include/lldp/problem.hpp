#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "lldp/errors.hpp"
#include "lldp/matrix.hpp"

namespace lldp {

using VectorField = std::function<Vector(double t, const Vector& x)>;
using JacobianField = std::function<DenseMatrix(double t, const Vector& x)>;

/// Initial value problem dx/dt = f(t, x), x(t0) = x0 on [t0, t_end].
///
/// The Jacobian and the time derivative are optional; finite differences are
/// used when they are absent. For autonomous problems f must not depend on t
/// and the time derivative is never evaluated.
struct OdeProblem {
  std::size_t dimension = 0;
  bool autonomous = true;
  VectorField f;
  JacobianField jacobian;
  VectorField time_derivative;
  double t0 = 0.0;
  double t_end = 1.0;
  Vector x0;

  void validate() const {
    if (dimension == 0) throw usage_error("OdeProblem: dimension must be at least 1");
    if (!f) throw usage_error("OdeProblem: vector field is missing");
    if (!(t0 < t_end)) throw usage_error("OdeProblem: t0 must be smaller than t_end");
    if (x0.size() != dimension) throw usage_error("OdeProblem: x0 has wrong length");
  }
};

namespace detail {

inline void require_length(const OdeProblem& p, const Vector& x, const char* who) {
  if (x.size() != p.dimension) {
    throw usage_error(std::string(who) + ": state has length " + std::to_string(x.size()) + ", expected " +
                      std::to_string(p.dimension));
  }
}

inline std::string describe_point(double t, const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << t << " x=(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ")";
  return os.str();
}

inline bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline Vector raw_f(const OdeProblem& p, double t, const Vector& x) {
  Vector fx = p.f(t, x);
  if (fx.size() != p.dimension) throw usage_error("vector field returned a value of wrong length");
  if (!all_finite(fx)) throw computation_error("non-finite vector field value at " + describe_point(t, x));
  return fx;
}

}  // namespace detail

/// Vector field value; bumps `f_evals`.
inline Vector eval_f(const OdeProblem& p, double t, const Vector& x, std::size_t& f_evals) {
  detail::require_length(p, x, "eval_f");
  ++f_evals;
  return detail::raw_f(p, t, x);
}

/// Central-difference Jacobian with increment sqrt(eps)·max(|x_i|, 1).
inline DenseMatrix finite_difference_jacobian(const OdeProblem& p, double t, const Vector& x) {
  detail::require_length(p, x, "finite_difference_jacobian");
  const std::size_t d = p.dimension;
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  DenseMatrix jac(d, d);
  Vector probe = x;
  for (std::size_t i = 0; i < d; ++i) {
    const double step = root_eps * std::max(std::abs(x[i]), 1.0);
    probe[i] = x[i] + step;
    const Vector up = detail::raw_f(p, t, probe);
    probe[i] = x[i] - step;
    const Vector down = detail::raw_f(p, t, probe);
    probe[i] = x[i];
    const double width = 2.0 * step;
    for (std::size_t r = 0; r < d; ++r) jac(r, i) = (up[r] - down[r]) / width;
  }
  return jac;
}

/// Analytic Jacobian when supplied, finite differences otherwise.
inline DenseMatrix eval_jacobian(const OdeProblem& p, double t, const Vector& x) {
  detail::require_length(p, x, "eval_jacobian");
  DenseMatrix jac = p.jacobian ? p.jacobian(t, x) : finite_difference_jacobian(p, t, x);
  if (jac.rows() != p.dimension || jac.cols() != p.dimension) {
    throw usage_error("Jacobian callback returned a matrix of wrong shape");
  }
  if (!jac.all_finite()) throw computation_error("non-finite Jacobian at " + detail::describe_point(t, x));
  return jac;
}

/// Partial derivative in t. Zero for autonomous problems; forward difference
/// with increment sqrt(eps)·max(|t|, 1) when no analytic derivative is given.
inline Vector eval_time_derivative(const OdeProblem& p, double t, const Vector& x, const Vector& fx) {
  detail::require_length(p, x, "eval_time_derivative");
  if (p.autonomous) return Vector(p.dimension, 0.0);
  if (p.time_derivative) {
    Vector ft = p.time_derivative(t, x);
    if (ft.size() != p.dimension) throw usage_error("time derivative returned a value of wrong length");
    if (!detail::all_finite(ft)) {
      throw computation_error("non-finite time derivative at " + detail::describe_point(t, x));
    }
    return ft;
  }
  const double step = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(std::abs(t), 1.0);
  const Vector ahead = detail::raw_f(p, t + step, x);
  Vector ft(p.dimension);
  for (std::size_t i = 0; i < p.dimension; ++i) ft[i] = (ahead[i] - fx[i]) / step;
  return ft;
}

/// Augmented matrix D_n packing Jacobian, time derivative and field value so
/// that the last column of e^{D_n·s}, restricted to the first d rows, is the
/// locally linearized increment over a step of length s.
struct AugmentedSystem {
  DenseMatrix d_n;
  std::size_t dimension;
};

/// Autonomous: [[J, f], [0, 0]]. Non-autonomous: [[J, f_t, f], [0, 0, 1], [0, 0, 0]].
inline AugmentedSystem assemble_augmented(const DenseMatrix& jac, const Vector& fx,
                                          const std::optional<Vector>& ft) {
  const std::size_t d = fx.size();
  if (jac.rows() != d || jac.cols() != d) throw usage_error("assemble_augmented: Jacobian shape mismatch");
  if (ft && ft->size() != d) throw usage_error("assemble_augmented: time derivative length mismatch");

  const std::size_t n = ft ? d + 2 : d + 1;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = jac(i, j);
    m(i, n - 1) = fx[i];
    if (ft) m(i, d) = (*ft)[i];
  }
  if (ft) m(d, d + 1) = 1.0;
  return {std::move(m), d};
}

inline AugmentedSystem build_augmented(const OdeProblem& p, double t, const Vector& y) {
  detail::require_length(p, y, "build_augmented");
  const Vector fx = detail::raw_f(p, t, y);
  const DenseMatrix jac = eval_jacobian(p, t, y);
  std::optional<Vector> ft;
  if (!p.autonomous) ft = eval_time_derivative(p, t, y, fx);
  return assemble_augmented(jac, fx, ft);
}

/// First d entries of the last column of m, i.e. L·m·r.
inline Vector extract_u(const DenseMatrix& m, std::size_t d) {
  if (!m.is_square() || m.rows() < d + 1) {
    throw usage_error("extract_u: matrix must be square with size at least d+1");
  }
  Vector u(d);
  const std::size_t last = m.cols() - 1;
  for (std::size_t i = 0; i < d; ++i) u[i] = m(i, last);
  return u;
}

}  // namespace lldp
