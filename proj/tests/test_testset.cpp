#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lldp/adaptive.hpp"
#include "lldp/testset.hpp"
#include "oracles.hpp"

using lldp::Vector;
using lldp::testset::make_problem;

TEST(Testset, AllNamesConstruct) {
  for (auto name : lldp::testset::problem_names) {
    const auto np = make_problem(name);
    EXPECT_EQ(np.name, name);
    EXPECT_NO_THROW(np.problem.validate());
    EXPECT_EQ(static_cast<bool>(np.analytic_reference), lldp::testset::has_analytic_reference(name));
  }
  EXPECT_THROW(make_problem("lorenz"), lldp::usage_error);
}

TEST(Testset, DeclaredShapes) {
  EXPECT_EQ(make_problem("stifflin").problem.dimension, 12u);
  EXPECT_EQ(make_problem("fpu").problem.dimension, 12u);
  const auto vdp = make_problem("vdp100").problem;
  EXPECT_EQ(vdp.t0, 0.0);
  EXPECT_EQ(vdp.t_end, 300.0);
  EXPECT_EQ(make_problem("perlin").problem.x0, (Vector{-2.5, 0.0, -1.5, 0.0}));
  const auto fpu = make_problem("fpu").problem.x0;
  EXPECT_EQ(fpu[0], 1.0);
  EXPECT_EQ(fpu[1], 1.0);
  EXPECT_EQ(fpu[2], 1.0 / 50.0);
  EXPECT_EQ(fpu[3], 1.0);
  for (std::size_t i = 4; i < 12; ++i) EXPECT_EQ(fpu[i], 0.0);
}

TEST(Hilbert, Entries) {
  EXPECT_EQ(lldp::testset::hilbert(1), (lldp::DenseMatrix{{1.0}}));
  EXPECT_EQ(lldp::testset::hilbert(2), (lldp::DenseMatrix{{1.0, 0.5}, {0.5, 1.0 / 3.0}}));
  const auto h = lldp::testset::hilbert(12);
  EXPECT_EQ(h(11, 11), 1.0 / 23.0);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(h(i, j), h(j, i));
}

TEST(Testset, FieldSpotValues) {
  std::size_t n = 0;
  const Vector rigid = lldp::eval_f(make_problem("rigid").problem, 0.0, {0.0, 1.0, 1.0}, n);
  EXPECT_EQ(rigid, (Vector{1.0, 0.0, 0.0}));
  const Vector bruss = lldp::eval_f(make_problem("bruss").problem, 0.0, {1.5, 3.0}, n);
  EXPECT_DOUBLE_EQ(bruss[0], 1.75);
  EXPECT_DOUBLE_EQ(bruss[1], -2.25);
  const Vector stiff = lldp::eval_f(make_problem("stifflin").problem, 0.0, Vector(12, -1.0), n);
  EXPECT_EQ(stiff, Vector(12, 0.0));
  const Vector vdp = lldp::eval_f(make_problem("vdp1").problem, 0.0, {2.0, 3.0}, n);
  EXPECT_DOUBLE_EQ(vdp[0], 3.0);
  EXPECT_DOUBLE_EQ(vdp[1], (1.0 - 4.0) * 3.0 - 2.0);
}

TEST(Testset, AnalyticJacobiansMatchFiniteDifferences) {
  for (auto name : lldp::testset::problem_names) {
    const auto p = make_problem(name).problem;
    ASSERT_TRUE(static_cast<bool>(p.jacobian)) << name;
    const auto exact = lldp::eval_jacobian(p, p.t0, p.x0);
    const auto fd = lldp::finite_difference_jacobian(p, p.t0, p.x0);
    for (std::size_t i = 0; i < p.dimension; ++i)
      for (std::size_t j = 0; j < p.dimension; ++j) EXPECT_NEAR(exact(i, j), fd(i, j), 1e-5) << name << " " << i << "," << j;
  }
}

TEST(Testset, JacobiansAwayFromInitialState) {
  for (auto name : {"pernolin", "stiffnolin", "fpu", "chm", "vdp100"}) {
    const auto p = make_problem(name).problem;
    Vector x = p.x0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.1 * static_cast<double>(i % 3) - 0.05;
    const auto exact = lldp::eval_jacobian(p, p.t0, x);
    const auto fd = lldp::finite_difference_jacobian(p, p.t0, x);
    for (std::size_t i = 0; i < p.dimension; ++i)
      for (std::size_t j = 0; j < p.dimension; ++j)
        EXPECT_NEAR(exact(i, j), fd(i, j), 1e-5 * std::max(1.0, std::abs(exact(i, j)))) << name;
  }
}

TEST(Reference, PeriodicLinearClosedForm) {
  const auto np = make_problem("perlin");
  EXPECT_EQ(np.analytic_reference(0.0), np.problem.x0);
  const Vector back = np.analytic_reference(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(back[i], np.problem.x0[i], 1e-14);
}

TEST(Reference, PeriodicLinearSatisfiesOde) {
  const auto np = make_problem("perlin");
  const double dt = 1e-5;
  for (double t : {0.3, 1.7, 4.0, 9.5}) {
    const Vector ahead = np.analytic_reference(t + dt), behind = np.analytic_reference(t - dt);
    const Vector f = np.problem.f(t, np.analytic_reference(t));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR((ahead[i] - behind[i]) / (2 * dt), f[i], 1e-6) << t;
  }
}

TEST(Reference, StiffLinearClosedForm) {
  const auto np = make_problem("stifflin");
  EXPECT_EQ(np.analytic_reference(0.0), Vector(12, 1.0));
  for (double t : {0.01, 0.3, 1.0}) {
    const auto flow = oracle::taylor_expm(lldp::testset::hilbert(12) * (-100.0 * t));
    const Vector ref = np.analytic_reference(t);
    for (std::size_t i = 0; i < 12; ++i) {
      double expected = -1.0;
      for (std::size_t j = 0; j < 12; ++j) expected += 2.0 * flow(i, j);
      EXPECT_NEAR(ref[i], expected, 1e-12 * std::abs(expected)) << t;
    }
  }
  EXPECT_THROW(lldp::testset::analytic_reference("bruss", 1.0), lldp::usage_error);
}

TEST(Invariants, RigidBodyAtRefinedTolerance) {
  const auto p = make_problem("rigid").problem;
  lldp::AdaptiveConfig c;
  c.rtol = 1e-9;
  c.atol = 1e-12;
  const auto path = lldp::integrate(p, c);
  const Vector& x0 = p.x0;
  for (const auto& x : path.states) {
    EXPECT_NEAR(x[0] * x[0] + x[1] * x[1], x0[0] * x0[0] + x0[1] * x0[1], 1e-6);
    EXPECT_NEAR(0.51 * x[0] * x[0] + x[2] * x[2], 0.51 * x0[0] * x0[0] + x0[2] * x0[2], 1e-6);
  }
}

TEST(Invariants, FpuEnergyAtRefinedTolerance) {
  const auto p = make_problem("fpu").problem;
  ASSERT_EQ(p.t_end, 15.0);
  lldp::AdaptiveConfig c;
  c.rtol = 1e-9;
  c.atol = 1e-12;
  const auto path = lldp::integrate(p, c);
  const double e0 = lldp::testset::fpu_hamiltonian(p.x0);
  for (const auto& x : path.states) EXPECT_NEAR(lldp::testset::fpu_hamiltonian(x) / e0, 1.0, 1e-3);
}
