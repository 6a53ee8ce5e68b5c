#pragma once

#include <array>
#include <cstddef>

namespace lldp {

/// Dormand–Prince 5(4) coefficients together with the quartic dense-output
/// weights b_j(θ) = Σ_{i=1..4} alpha[j][i-1]·θ^i.
struct EmbeddedTableau {
  static constexpr std::size_t stages = 7;

  std::array<std::array<double, stages>, stages> a{};
  std::array<double, stages> b{};
  std::array<double, stages> b_hat{};
  /// b - b_hat, written out exactly rather than subtracted in floating point.
  std::array<double, stages> e{};
  std::array<double, stages> c{};
  std::array<std::array<double, 4>, stages> alpha{};

  /// Dense-output weight of stage j (0-based) at θ.
  constexpr double dense_weight(std::size_t j, double theta) const noexcept {
    const auto& al = alpha[j];
    return theta * (al[0] + theta * (al[1] + theta * (al[2] + theta * al[3])));
  }
};

inline constexpr EmbeddedTableau dp45_tableau() {
  EmbeddedTableau t;
  t.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};

  t.a[1] = {1.0 / 5.0};
  t.a[2] = {3.0 / 40.0, 9.0 / 40.0};
  t.a[3] = {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
  t.a[4] = {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0};
  t.a[5] = {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0};
  t.a[6] = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0};

  t.b = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0};
  t.b_hat = {5179.0 / 57600.0, 0.0,           7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0,
             187.0 / 2100.0,   1.0 / 40.0};
  t.e = {71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};

  t.alpha[0] = {1.0, -183.0 / 64.0, 37.0 / 12.0, -145.0 / 128.0};
  t.alpha[1] = {0.0, 0.0, 0.0, 0.0};
  t.alpha[2] = {0.0, 1500.0 / 371.0, -1000.0 / 159.0, 1000.0 / 371.0};
  t.alpha[3] = {0.0, -125.0 / 32.0, 125.0 / 12.0, -375.0 / 64.0};
  t.alpha[4] = {0.0, 9477.0 / 3392.0, -729.0 / 106.0, 25515.0 / 6784.0};
  t.alpha[5] = {0.0, -11.0 / 7.0, 11.0 / 3.0, -55.0 / 28.0};
  t.alpha[6] = {0.0, 3.0 / 2.0, -4.0, 5.0 / 2.0};
  return t;
}

}  // namespace lldp
