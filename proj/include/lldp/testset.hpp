#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>

#include "lldp/errors.hpp"
#include "lldp/expm.hpp"
#include "lldp/matrix.hpp"
#include "lldp/problem.hpp"

namespace lldp::testset {

inline constexpr std::array<std::string_view, 10> problem_names{
    "perlin", "pernolin", "stifflin", "stiffnolin", "fpu", "bruss", "rigid", "chm", "vdp1", "vdp100"};

using Reference = std::function<Vector(double t)>;

struct NamedProblem {
  std::string name;
  OdeProblem problem;
  /// Closed-form solution; present for the two linear problems only.
  Reference analytic_reference;
};

/// H_ij = 1/(i + j - 1) with 1-based indices.
inline DenseMatrix hilbert(std::size_t n) {
  if (n == 0) throw usage_error("hilbert: n must be at least 1");
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  }
  return h;
}

inline constexpr double fpu_omega = 50.0;

/// Fermi–Pasta–Ulam energy for the state (p1..p6, q1..q6) with q0 = q7 = 0.
inline double fpu_hamiltonian(const Vector& x) {
  const double w = fpu_omega;
  auto q = [&](int k) { return (k == 0 || k == 7) ? 0.0 : x[static_cast<std::size_t>(5 + k)]; };
  double energy = 0.0;
  for (std::size_t i = 0; i < 6; ++i) energy += 0.5 * x[i] * x[i];
  for (int i = 1; i <= 3; ++i) {
    const double s = q(2 * i) - q(2 * i - 1);
    energy += 0.25 * w * w * s * s;
  }
  for (int i = 0; i <= 3; ++i) {
    const double s = q(2 * i + 1) - q(2 * i);
    energy += s * s * s * s;
  }
  return energy;
}

namespace detail {

// Complex system dz/dt = A(z + 2) + c·z^2 with A = diag(i, -i), stored as
// (Re z1, Im z1, Re z2, Im z2).
inline OdeProblem periodic(double quad, Vector x0) {
  OdeProblem p;
  p.dimension = 4;
  p.autonomous = true;
  p.f = [quad](double, const Vector& x) {
    const double u1 = x[0], v1 = x[1], u2 = x[2], v2 = x[3];
    return Vector{-v1 + quad * (u1 * u1 - v1 * v1), (u1 + 2.0) + quad * 2.0 * u1 * v1,
                  v2 + quad * (u2 * u2 - v2 * v2), -(u2 + 2.0) + quad * 2.0 * u2 * v2};
  };
  p.jacobian = [quad](double, const Vector& x) {
    const double u1 = x[0], v1 = x[1], u2 = x[2], v2 = x[3];
    return DenseMatrix{{2.0 * quad * u1, -1.0 - 2.0 * quad * v1, 0.0, 0.0},
                       {1.0 + 2.0 * quad * v1, 2.0 * quad * u1, 0.0, 0.0},
                       {0.0, 0.0, 2.0 * quad * u2, 1.0 - 2.0 * quad * v2},
                       {0.0, 0.0, -1.0 + 2.0 * quad * v2, 2.0 * quad * u2}};
  };
  p.t0 = 0.0;
  p.t_end = 4.0 * std::numbers::pi;
  p.x0 = std::move(x0);
  return p;
}

inline Vector perlin_exact(const Vector& x0, double t) {
  const double c = std::cos(t), s = std::sin(t);
  const double a1 = x0[0] + 2.0, b1 = x0[1];
  const double a2 = x0[2] + 2.0, b2 = x0[3];
  return {-2.0 + (a1 * c - b1 * s), a1 * s + b1 * c, -2.0 + (a2 * c + b2 * s), b2 * c - a2 * s};
}

inline OdeProblem stiff_linear() {
  const DenseMatrix jac = -100.0 * hilbert(12);
  OdeProblem p;
  p.dimension = 12;
  p.autonomous = true;
  p.f = [jac](double, const Vector& x) {
    Vector shifted = x;
    for (double& v : shifted) v += 1.0;
    return mat_vec(jac, shifted);
  };
  p.jacobian = [jac](double, const Vector&) { return jac; };
  p.t0 = 0.0;
  p.t_end = 1.0;
  p.x0 = Vector(12, 1.0);
  return p;
}

inline OdeProblem stiff_nonlinear() {
  const DenseMatrix lin = 100.0 * hilbert(12);
  OdeProblem p;
  p.dimension = 12;
  p.autonomous = true;
  p.f = [lin](double, const Vector& x) {
    Vector shifted = x;
    for (double& v : shifted) v -= 1.0;
    Vector out = mat_vec(lin, shifted);
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] += 100.0 * shifted[i] * shifted[i] - 60.0 * (x[i] * x[i] * x[i] - 1.0);
    }
    return out;
  };
  p.jacobian = [lin](double, const Vector& x) {
    DenseMatrix jac = lin;
    for (std::size_t i = 0; i < x.size(); ++i) jac(i, i) += 200.0 * (x[i] - 1.0) - 180.0 * x[i] * x[i];
    return jac;
  };
  p.t0 = 0.0;
  p.t_end = 1.0;
  p.x0 = Vector(12, -0.5);
  return p;
}

inline OdeProblem fermi_pasta_ulam() {
  constexpr double w2 = fpu_omega * fpu_omega;
  OdeProblem p;
  p.dimension = 12;
  p.autonomous = true;
  // x = (p1..p6, q1..q6); q(0) and q(7) are the fixed ends.
  p.f = [](double, const Vector& x) {
    auto q = [&](int k) { return (k == 0 || k == 7) ? 0.0 : x[static_cast<std::size_t>(5 + k)]; };
    std::array<double, 8> grad{};  // dV/dq_k, k = 0..7
    for (int i = 1; i <= 3; ++i) {
      const double s = 0.5 * w2 * (q(2 * i) - q(2 * i - 1));
      grad[static_cast<std::size_t>(2 * i)] += s;
      grad[static_cast<std::size_t>(2 * i - 1)] -= s;
    }
    for (int i = 0; i <= 3; ++i) {
      const double d = q(2 * i + 1) - q(2 * i);
      const double s = 4.0 * d * d * d;
      grad[static_cast<std::size_t>(2 * i + 1)] += s;
      grad[static_cast<std::size_t>(2 * i)] -= s;
    }
    Vector out(12);
    for (std::size_t k = 0; k < 6; ++k) {
      out[k] = -grad[k + 1];
      out[6 + k] = x[k];
    }
    return out;
  };
  p.jacobian = [](double, const Vector& x) {
    auto q = [&](int k) { return (k == 0 || k == 7) ? 0.0 : x[static_cast<std::size_t>(5 + k)]; };
    DenseMatrix hess(8, 8);  // Hessian of V over q_0..q_7
    auto couple = [&](int a, int b, double s) {
      hess(a, a) += s;
      hess(b, b) += s;
      hess(a, b) -= s;
      hess(b, a) -= s;
    };
    for (int i = 1; i <= 3; ++i) couple(2 * i - 1, 2 * i, 0.5 * w2);
    for (int i = 0; i <= 3; ++i) {
      const double d = q(2 * i + 1) - q(2 * i);
      couple(2 * i, 2 * i + 1, 12.0 * d * d);
    }
    DenseMatrix jac(12, 12);
    for (std::size_t k = 0; k < 6; ++k) {
      jac(6 + k, k) = 1.0;
      for (std::size_t m = 0; m < 6; ++m) jac(k, 6 + m) = -hess(k + 1, m + 1);
    }
    return jac;
  };
  p.t0 = 0.0;
  p.t_end = 15.0;
  p.x0 = Vector(12, 0.0);
  p.x0[0] = 1.0;
  p.x0[1] = 1.0;
  p.x0[2] = 1.0 / fpu_omega;
  p.x0[3] = 1.0;
  return p;
}

inline OdeProblem brusselator() {
  OdeProblem p;
  p.dimension = 2;
  p.autonomous = true;
  p.f = [](double, const Vector& x) {
    const double x1 = x[0], x2 = x[1];
    return Vector{1.0 + x1 * x1 * x2 - 4.0 * x1, 3.0 * x1 - x1 * x1 * x2};
  };
  p.jacobian = [](double, const Vector& x) {
    const double x1 = x[0], x2 = x[1];
    return DenseMatrix{{2.0 * x1 * x2 - 4.0, x1 * x1}, {3.0 - 2.0 * x1 * x2, -x1 * x1}};
  };
  p.t0 = 0.0;
  p.t_end = 20.0;
  p.x0 = {1.5, 3.0};
  return p;
}

inline OdeProblem rigid_body() {
  OdeProblem p;
  p.dimension = 3;
  p.autonomous = true;
  p.f = [](double, const Vector& x) { return Vector{x[1] * x[2], -x[0] * x[2], -0.51 * x[0] * x[1]}; };
  p.jacobian = [](double, const Vector& x) {
    return DenseMatrix{{0.0, x[2], x[1]}, {-x[2], 0.0, -x[0]}, {-0.51 * x[1], -0.51 * x[0], 0.0}};
  };
  p.t0 = 0.0;
  p.t_end = 12.0;
  p.x0 = {0.0, 1.0, 1.0};
  return p;
}

inline OdeProblem chemical_reaction() {
  OdeProblem p;
  p.dimension = 4;
  p.autonomous = true;
  p.f = [](double, const Vector& x) {
    const double k = std::exp(20.7 - 1500.0 / x[0]);
    return Vector{1.3 * (x[2] - x[0]) + 10400.0 * k * x[1], 1880.0 * (x[3] - x[1] * (1.0 + k)),
                  1752.0 - 269.0 * x[2] + 267.0 * x[0], 0.1 + 320.0 * x[1] - 321.0 * x[3]};
  };
  p.jacobian = [](double, const Vector& x) {
    const double k = std::exp(20.7 - 1500.0 / x[0]);
    const double dk = k * 1500.0 / (x[0] * x[0]);
    return DenseMatrix{{-1.3 + 10400.0 * dk * x[1], 10400.0 * k, 1.3, 0.0},
                       {-1880.0 * x[1] * dk, -1880.0 * (1.0 + k), 0.0, 1880.0},
                       {267.0, 0.0, -269.0, 0.0},
                       {0.0, 320.0, 0.0, -321.0}};
  };
  p.t0 = 0.0;
  p.t_end = 1.0;
  p.x0 = {50.0, 0.0, 600.0, 0.1};
  return p;
}

inline OdeProblem van_der_pol(double eps, double t_end) {
  OdeProblem p;
  p.dimension = 2;
  p.autonomous = true;
  p.f = [eps](double, const Vector& x) { return Vector{x[1], eps * (1.0 - x[0] * x[0]) * x[1] - x[0]}; };
  p.jacobian = [eps](double, const Vector& x) {
    return DenseMatrix{{0.0, 1.0}, {-2.0 * eps * x[0] * x[1] - 1.0, eps * (1.0 - x[0] * x[0])}};
  };
  p.t0 = 0.0;
  p.t_end = t_end;
  p.x0 = {2.0, 0.0};
  return p;
}

}  // namespace detail

inline bool has_analytic_reference(std::string_view name) { return name == "perlin" || name == "stifflin"; }

/// Closed-form solution of the linear problems at time t.
inline Vector analytic_reference(std::string_view name, double t) {
  if (name == "perlin") return detail::perlin_exact({-2.5, 0.0, -1.5, 0.0}, t);
  if (name == "stifflin") {
    // x(t) = -1 + e^{-100 H t}(x0 + 1) with x0 = 1.
    const DenseMatrix flow = expm(-100.0 * hilbert(12), t, PadeOrder{6, 6}).value;
    Vector x = mat_vec(flow, Vector(12, 2.0));
    for (double& v : x) v -= 1.0;
    return x;
  }
  throw usage_error("analytic_reference: no closed form for problem '" + std::string(name) + "'");
}

inline NamedProblem make_problem(std::string_view name) {
  NamedProblem np;
  np.name = std::string(name);
  if (name == "perlin") {
    np.problem = detail::periodic(0.0, {-2.5, 0.0, -1.5, 0.0});
  } else if (name == "pernolin") {
    np.problem = detail::periodic(0.1, {1.0, 0.0, 1.0, 0.0});
  } else if (name == "stifflin") {
    np.problem = detail::stiff_linear();
  } else if (name == "stiffnolin") {
    np.problem = detail::stiff_nonlinear();
  } else if (name == "fpu") {
    np.problem = detail::fermi_pasta_ulam();
  } else if (name == "bruss") {
    np.problem = detail::brusselator();
  } else if (name == "rigid") {
    np.problem = detail::rigid_body();
  } else if (name == "chm") {
    np.problem = detail::chemical_reaction();
  } else if (name == "vdp1") {
    np.problem = detail::van_der_pol(1.0, 20.0);
  } else if (name == "vdp100") {
    np.problem = detail::van_der_pol(100.0, 300.0);
  } else {
    throw usage_error("unknown problem '" + std::string(name) + "'");
  }
  if (has_analytic_reference(name)) {
    np.analytic_reference = [n = std::string(name)](double t) { return analytic_reference(n, t); };
  }
  return np;
}

}  // namespace lldp::testset
