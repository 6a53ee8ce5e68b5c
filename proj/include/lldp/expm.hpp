#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lldp/errors.hpp"
#include "lldp/matrix.hpp"

namespace lldp {

/// Degrees (p, q) of the Padé numerator and denominator.
struct PadeOrder {
  int p = 3;
  int q = 3;

  /// p + q > 4 keeps the fifth-order convergence of the embedded formulas.
  bool preserves_order() const noexcept { return p >= 0 && q >= 0 && p + q > 4; }
  /// p <= q <= p + 2 gives an A-acceptable rational approximant.
  bool a_stable() const noexcept { return p <= q && q <= p + 2; }

  friend bool operator==(const PadeOrder&, const PadeOrder&) = default;
};

inline void require_valid(PadeOrder order) {
  if (!order.preserves_order()) {
    throw usage_error("Padé order (" + std::to_string(order.p) + "," + std::to_string(order.q) +
                      ") must satisfy p + q > 4");
  }
}

namespace detail {

inline double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Coefficient of x^j in N_pq (numerator of degree p); the denominator uses the
// same formula with p and q swapped and argument -x.
inline double pade_coefficient(int p, int q, int j) {
  return factorial(p + q - j) * factorial(p) / (factorial(p + q) * factorial(j) * factorial(p - j));
}

}  // namespace detail

/// (p,q) Padé approximant N_pq(a)·D_pq(a)^{-1} to e^a. The caller scales a so
/// that inf_norm(a) <= 1/2.
inline DenseMatrix pade_expm_core(const DenseMatrix& a, PadeOrder order) {
  if (!a.is_square()) throw usage_error("pade_expm_core: matrix is not square");
  if (order.p < 0 || order.q < 0) throw usage_error("pade_expm_core: negative Padé degree");
  if (!a.all_finite()) throw computation_error("pade_expm_core: non-finite input");

  const std::size_t n = a.rows();
  const int top = std::max(order.p, order.q);

  DenseMatrix num = DenseMatrix::identity(n);
  DenseMatrix den = DenseMatrix::identity(n);
  DenseMatrix power = DenseMatrix::identity(n);
  for (int j = 1; j <= top; ++j) {
    power = mat_mul(power, a);
    if (j <= order.p) num += detail::pade_coefficient(order.p, order.q, j) * power;
    if (j <= order.q) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      den += (sign * detail::pade_coefficient(order.q, order.p, j)) * power;
    }
  }
  // num and den are polynomials in a, so they commute and den^{-1}·num = num·den^{-1}.
  return lu_solve(std::move(den), std::move(num));
}

struct ScaledExponential {
  DenseMatrix value;
  int kappa;
};

/// Smallest kappa >= 0 with norm·2^{-kappa} <= 1/2.
inline int scaling_exponent(double norm) {
  if (!std::isfinite(norm)) throw computation_error("scaling_exponent: non-finite norm");
  int kappa = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++kappa;
  }
  return kappa;
}

/// e^{a·h} by (p,q) Padé with scaling and squaring.
inline ScaledExponential expm(const DenseMatrix& a, double h, PadeOrder order = {}) {
  if (!a.is_square()) throw usage_error("expm: matrix is not square");
  if (!std::isfinite(h)) throw usage_error("expm: non-finite step");

  DenseMatrix scaled = a * h;
  const int kappa = scaling_exponent(inf_norm(scaled));
  scaled *= std::ldexp(1.0, -kappa);

  DenseMatrix result = pade_expm_core(scaled, order);
  for (int s = 0; s < kappa; ++s) result = mat_mul(result, result);
  if (!result.all_finite()) throw computation_error("expm: overflow while squaring");
  return {std::move(result), kappa};
}

/// Fractions of the base step at which the chain retains e^{D·c·h}.
enum class ChainFraction : std::size_t {
  one_ninetieth,  // 1/90
  one_tenth,      // 1/10
  one_fifth,      // 1/5
  three_tenths,   // 3/10
  two_fifths,     // 2/5
  four_fifths,    // 4/5
  eight_ninths,   // 8/9
  one,            // 1
};

inline constexpr std::size_t chain_fraction_count = 8;

inline constexpr double chain_fraction_value(ChainFraction f) {
  constexpr std::array<double, chain_fraction_count> values{1.0 / 90.0, 1.0 / 10.0, 1.0 / 5.0, 3.0 / 10.0,
                                                            2.0 / 5.0,  4.0 / 5.0,  8.0 / 9.0, 1.0};
  return values[static_cast<std::size_t>(f)];
}

/// Exponentials e^{D·c·h} for every Dormand–Prince abscissa, obtained from a
/// single Padé evaluation at h/90 followed by a fixed schedule of products.
class ExpChain {
 public:
  ExpChain(double h, int kappa, std::array<DenseMatrix, chain_fraction_count> matrices)
      : h_(h), kappa_(kappa), matrices_(std::move(matrices)) {}

  double step() const noexcept { return h_; }
  int kappa() const noexcept { return kappa_; }
  const DenseMatrix& at(ChainFraction f) const noexcept { return matrices_[static_cast<std::size_t>(f)]; }

 private:
  double h_;
  int kappa_;
  std::array<DenseMatrix, chain_fraction_count> matrices_;
};

inline ExpChain exp_chain(const DenseMatrix& d, double h, PadeOrder order = {}) {
  if (!d.is_square()) throw usage_error("exp_chain: matrix is not square");
  if (!(h > 0.0) || !std::isfinite(h)) throw usage_error("exp_chain: step must be positive and finite");

  auto base = expm(d, h / 90.0, order);
  const DenseMatrix& m1_90 = base.value;
  DenseMatrix m2_90 = mat_mul(m1_90, m1_90);
  DenseMatrix m4_90 = mat_mul(m2_90, m2_90);
  DenseMatrix m8_90 = mat_mul(m4_90, m4_90);
  DenseMatrix m16_90 = mat_mul(m8_90, m8_90);
  DenseMatrix m32_90 = mat_mul(m16_90, m16_90);
  DenseMatrix m80_90 = mat_mul(mat_mul(m32_90, m16_90), m32_90);
  DenseMatrix m1_10 = mat_mul(m8_90, m1_90);
  DenseMatrix m1_5 = mat_mul(m1_10, m1_10);
  DenseMatrix m2_5 = mat_mul(m1_5, m1_5);
  DenseMatrix m4_5 = mat_mul(m2_5, m2_5);
  DenseMatrix m3_10 = mat_mul(m1_10, m1_5);
  DenseMatrix m1 = mat_mul(m4_5, m1_5);
  if (!m1.all_finite() || !m80_90.all_finite()) throw computation_error("exp_chain: overflow in product chain");

  return ExpChain(h, base.kappa,
                  {std::move(base.value), std::move(m1_10), std::move(m1_5), std::move(m3_10), std::move(m2_5),
                   std::move(m4_5), std::move(m80_90), std::move(m1)});
}

}  // namespace lldp
