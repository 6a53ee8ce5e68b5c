#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lldp/expm.hpp"
#include "oracles.hpp"

using lldp::ChainFraction;
using lldp::DenseMatrix;
using lldp::PadeOrder;

namespace {

// Scalar (p,q) Padé approximant evaluated directly from its defining sums.
double scalar_pade(double z, int p, int q) {
  auto fact = [](int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
  };
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= p; ++j) num += fact(p + q - j) * fact(p) / (fact(p + q) * fact(j) * fact(p - j)) * std::pow(z, j);
  for (int j = 0; j <= q; ++j) den += fact(p + q - j) * fact(q) / (fact(p + q) * fact(j) * fact(q - j)) * std::pow(-z, j);
  return num / den;
}

// Leading Padé remainder: e^z - R_pq(z) ~ (-1)^q p!q!/((p+q)!(p+q+1)!) z^{p+q+1}.
// Each squaring doubles the relative error, so after scaling by 2^-kappa the
// relative error of expm is about that constant times |z|^{p+q+1}/2^{(p+q)kappa}.
double pade_relative_bound(double z, PadeOrder o) {
  auto fact = [](int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
  };
  const int kappa = lldp::scaling_exponent(std::abs(z));
  const double c = fact(o.p) * fact(o.q) / (fact(o.p + o.q) * fact(o.p + o.q + 1));
  return 1.1 * c * std::pow(std::abs(z), o.p + o.q + 1) / std::ldexp(1.0, (o.p + o.q) * kappa) + 1e-15;
}

}  // namespace

TEST(PadeOrder, Validity) {
  EXPECT_TRUE((PadeOrder{3, 3}.preserves_order()));
  EXPECT_TRUE((PadeOrder{3, 3}.a_stable()));
  EXPECT_FALSE((PadeOrder{2, 2}.preserves_order()));
  EXPECT_FALSE((PadeOrder{4, 1}.a_stable()));
  EXPECT_TRUE((PadeOrder{2, 4}.a_stable()));
  EXPECT_THROW(lldp::require_valid({2, 2}), lldp::usage_error);
  EXPECT_NO_THROW(lldp::require_valid({6, 6}));
}

TEST(PadeCore, ZeroGivesIdentityExactly) {
  EXPECT_EQ(lldp::pade_expm_core(DenseMatrix(4, 4), {3, 3}), DenseMatrix::identity(4));
}

TEST(PadeCore, MatchesScalarRationalFunction) {
  for (PadeOrder o : {PadeOrder{3, 3}, PadeOrder{2, 4}, PadeOrder{6, 6}, PadeOrder{4, 3}}) {
    for (double z : {-0.5, -0.1, 0.25, 0.5}) {
      const DenseMatrix r = lldp::pade_expm_core(DenseMatrix{{z}}, o);
      EXPECT_NEAR(r(0, 0), scalar_pade(z, o.p, o.q), 1e-15) << o.p << "," << o.q << " z=" << z;
    }
  }
}

TEST(PadeCore, AcceptableOnNegativeAxis) {
  for (double z : {-0.1, -1.0, -10.0, -1e3, -1e6}) {
    const DenseMatrix r = lldp::pade_expm_core(DenseMatrix{{z}}, {3, 3});
    EXPECT_LE(std::abs(r(0, 0)), 1.0) << "z=" << z;
  }
}

TEST(ScalingExponent, Examples) {
  EXPECT_EQ(lldp::scaling_exponent(0.0), 0);
  EXPECT_EQ(lldp::scaling_exponent(0.5), 0);
  EXPECT_EQ(lldp::scaling_exponent(0.75), 1);
  EXPECT_EQ(lldp::scaling_exponent(3.0), 3);
  EXPECT_EQ(lldp::scaling_exponent(4.0), 3);
  EXPECT_THROW(lldp::scaling_exponent(std::numeric_limits<double>::infinity()), lldp::computation_error);
}

TEST(Expm, ZeroMatrix) {
  const auto e = lldp::expm(DenseMatrix(3, 3), 7.0);
  EXPECT_EQ(e.value, DenseMatrix::identity(3));
  EXPECT_EQ(e.kappa, 0);
}

TEST(Expm, ScalarDecay) {
  const double got = lldp::expm(DenseMatrix{{-1.0}}, 1.0).value(0, 0);
  EXPECT_NEAR(got / std::exp(-1.0), 1.0, pade_relative_bound(-1.0, {3, 3}));
  EXPECT_NEAR(got, 0.36787944, 2e-7);
  EXPECT_NEAR(lldp::expm(DenseMatrix{{-1.0}}, 1.0, {6, 6}).value(0, 0), std::exp(-1.0), 1e-15);
}

TEST(Expm, DiagonalMatchesScalarExp) {
  const auto e = lldp::expm(DenseMatrix{{0.1, 0.0}, {0.0, -0.2}}, 1.0);
  EXPECT_NEAR(e.value(0, 0), std::exp(0.1), pade_relative_bound(0.1, {3, 3}) * std::exp(0.1));
  EXPECT_NEAR(e.value(1, 1), std::exp(-0.2), pade_relative_bound(-0.2, {3, 3}) * std::exp(-0.2));
  EXPECT_EQ(e.value(0, 1), 0.0);
  const auto f = lldp::expm(DenseMatrix{{0.1, 0.0}, {0.0, -0.2}}, 1.0, {4, 4});
  EXPECT_NEAR(f.value(0, 0), std::exp(0.1), 1e-10);
  EXPECT_NEAR(f.value(1, 1), std::exp(-0.2), 1e-10);
}

TEST(Expm, WideDiagonalRange) {
  for (PadeOrder o : {PadeOrder{3, 3}, PadeOrder{6, 6}}) {
    for (double x : {-10.0, -7.3, -1.0, 0.3, 4.0, 10.0}) {
      const auto e = lldp::expm(DenseMatrix{{x, 0.0}, {0.0, -x}}, 1.0, o);
      EXPECT_NEAR(e.value(0, 0) / std::exp(x), 1.0, pade_relative_bound(x, o) + 1e-13) << x;
      EXPECT_NEAR(e.value(1, 1) / std::exp(-x), 1.0, pade_relative_bound(x, o) + 1e-13) << x;
    }
  }
}

TEST(Expm, SmallRandomAgainstTaylor) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix a = oracle::random_matrix(rng, 5, 0.5);
    const DenseMatrix ref = oracle::taylor_expm(a);
    EXPECT_LT(oracle::relative_gap(lldp::expm(a, 1.0).value, ref), pade_relative_bound(0.5, {3, 3}) * std::exp(1.0));
    EXPECT_LT(oracle::relative_gap(lldp::expm(a, 1.0, {6, 6}).value, ref), 1e-14);
  }
}

TEST(Expm, StepScalesArgument) {
  std::mt19937_64 rng(9);
  const DenseMatrix a = oracle::random_matrix(rng, 4, 2.0);
  EXPECT_LT(oracle::relative_gap(lldp::expm(a, 0.7, {6, 6}).value, oracle::taylor_expm(a * 0.7)), 1e-13);
}

TEST(Expm, HigherOrderIsMoreAccurate) {
  std::mt19937_64 rng(3);
  const DenseMatrix a = oracle::random_matrix(rng, 6, 4.0);
  const DenseMatrix ref = oracle::taylor_expm(a);
  EXPECT_LT(oracle::relative_gap(lldp::expm(a, 1.0, {6, 6}).value, ref), 1e-13);
  EXPECT_LT(oracle::relative_gap(lldp::expm(a, 1.0, {6, 6}).value, ref),
            oracle::relative_gap(lldp::expm(a, 1.0, {3, 3}).value, ref));
}

TEST(Expm, OverflowIsReported) {
  EXPECT_THROW(lldp::expm(DenseMatrix{{1000.0}}, 1.0), lldp::computation_error);
}

TEST(Expm, NonSquareRejected) {
  EXPECT_THROW(lldp::expm(DenseMatrix(2, 3), 1.0), lldp::usage_error);
}

TEST(ExpChain, ZeroMatrixGivesIdentities) {
  const auto chain = lldp::exp_chain(DenseMatrix(3, 3), 0.5);
  for (std::size_t f = 0; f < lldp::chain_fraction_count; ++f) {
    EXPECT_EQ(chain.at(static_cast<ChainFraction>(f)), DenseMatrix::identity(3));
  }
}

TEST(ExpChain, NilpotentBlockIsExact) {
  const double v = 3.0, h = 0.25;
  const auto chain = lldp::exp_chain(DenseMatrix{{0.0, v}, {0.0, 0.0}}, h);
  const DenseMatrix& m1 = chain.at(ChainFraction::one);
  EXPECT_EQ(m1(0, 0), 1.0);
  EXPECT_NEAR(m1(0, 1), v * h, 1e-15);
  EXPECT_EQ(m1(1, 0), 0.0);
  EXPECT_EQ(m1(1, 1), 1.0);
}

TEST(ExpChain, StoredProductsComposeExactly) {
  std::mt19937_64 rng(21);
  const DenseMatrix d = oracle::random_matrix(rng, 5, 3.0);
  const auto c = lldp::exp_chain(d, 1.0);
  EXPECT_EQ(c.at(ChainFraction::two_fifths), lldp::mat_mul(c.at(ChainFraction::one_fifth), c.at(ChainFraction::one_fifth)));
  EXPECT_EQ(c.at(ChainFraction::four_fifths),
            lldp::mat_mul(c.at(ChainFraction::two_fifths), c.at(ChainFraction::two_fifths)));
  EXPECT_EQ(c.at(ChainFraction::three_tenths),
            lldp::mat_mul(c.at(ChainFraction::one_tenth), c.at(ChainFraction::one_fifth)));
  EXPECT_EQ(c.at(ChainFraction::one), lldp::mat_mul(c.at(ChainFraction::four_fifths), c.at(ChainFraction::one_fifth)));
}

TEST(ExpChain, EveryFractionMatchesDirectExponential) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix d = oracle::random_matrix(rng, 3 + trial % 4, 5.0);
    const auto c = lldp::exp_chain(d, 1.0);
    for (std::size_t f = 0; f < lldp::chain_fraction_count; ++f) {
      const auto frac = static_cast<ChainFraction>(f);
      const DenseMatrix ref = oracle::taylor_expm(d * lldp::chain_fraction_value(frac));
      EXPECT_LT(oracle::relative_gap(c.at(frac), ref), 1e-6) << "fraction " << f;
    }
  }
}

TEST(ExpChain, StableAugmentedBlock) {
  // Augmented layout [[J, f], [0, 0]] with a stable J.
  const DenseMatrix d{{-1.0, 0.5, 0.0, 1.0}, {0.0, -2.0, 0.3, -1.0}, {0.1, 0.0, -3.0, 0.5}, {0.0, 0.0, 0.0, 0.0}};
  const auto c = lldp::exp_chain(d, 0.1);
  EXPECT_LT(oracle::relative_gap(c.at(ChainFraction::one), lldp::expm(d, 0.1).value), 1e-8);
}

TEST(ExpChain, RejectsBadStep) {
  EXPECT_THROW(lldp::exp_chain(DenseMatrix(2, 2), 0.0), lldp::usage_error);
  EXPECT_THROW(lldp::exp_chain(DenseMatrix(2, 2), -1.0), lldp::usage_error);
}
