#include <gtest/gtest.h>

#include <random>

#include "iedd/benchmark_models.hpp"
#include "iedd/error.hpp"
#include "iedd/krylov.hpp"
#include "iedd/operators.hpp"
#include "iedd/sources.hpp"
#include "oracle.hpp"

using namespace iedd;

namespace {

std::vector<cplx> random_values(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (cplx& x : v) x = {d(rng), d(rng)};
  return v;
}

LinearMap dense_map(const oracle::Matrix& A) {
  return [&A](std::span<const cplx> x, std::span<cplx> y) {
    const oracle::Vector r = A * oracle::to_vector(x);
    std::copy(r.data(), r.data() + r.size(), y.begin());
  };
}

oracle::Matrix diagonally_dominant(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  oracle::Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(d(rng), d(rng)) / static_cast<double>(n);
  for (int i = 0; i < n; ++i) A(i, i) += cplx(3.0 + d(rng), d(rng));
  return A;
}

double true_residual(const LinearMap& A, std::span<const cplx> x, std::span<const cplx> b) {
  std::vector<cplx> y(b.size());
  A(x, y);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = b[k] - y[k];
  return l2_norm(y) / l2_norm(b);
}

}  // namespace

TEST(Gmres, IdentityConvergesInOneStep) {
  std::mt19937_64 rng(1);
  const auto b = random_values(40, rng);
  const LinearMap id = [](std::span<const cplx> x, std::span<cplx> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
  const GmresResult r = gmres(id, b, {});
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 1);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_LT(std::abs(r.x[k] - b[k]), 1e-14);
}

TEST(Gmres, MatchesDenseLuOnDiagonallyDominantSystem) {
  std::mt19937_64 rng(2);
  const oracle::Matrix A = diagonally_dominant(50, rng);
  const auto b = random_values(50, rng);
  GmresConfig cfg;
  cfg.tol = 1e-10;
  const GmresResult r = gmres(dense_map(A), b, cfg);
  ASSERT_TRUE(r.stats.converged);
  const oracle::Vector ref = oracle::dense_solve(A, oracle::to_vector(b));
  EXPECT_LT(oracle::relative_l2(oracle::to_vector(r.x), ref), 10 * cfg.tol);
  EXPECT_LE(r.stats.final_residual(), cfg.tol);
}

TEST(Gmres, ReportedResidualMatchesRecomputed) {
  std::mt19937_64 rng(3);
  const oracle::Matrix A = diagonally_dominant(60, rng);
  const auto b = random_values(60, rng);
  GmresConfig cfg;
  cfg.tol = 1e-8;
  cfg.restart = 5;
  const LinearMap map = dense_map(A);
  const GmresResult r = gmres(map, b, cfg);
  EXPECT_GT(r.stats.restarts, 0);
  EXPECT_NEAR(r.stats.final_residual(), true_residual(map, r.x, b), 1e-14);
}

TEST(Gmres, ResidualMonotoneWithinCycles) {
  std::mt19937_64 rng(4);
  const oracle::Matrix A = diagonally_dominant(80, rng);
  const auto b = random_values(80, rng);
  GmresConfig cfg;
  cfg.tol = 1e-9;
  cfg.restart = 7;
  const GmresResult r = gmres(dense_map(A), b, cfg);
  const auto& h = r.stats.residual_history;
  ASSERT_FALSE(h.empty());
  // Entry 0 is the initial residual; each cycle contributes `restart` entries.
  for (std::size_t k = 1; k < h.size(); ++k)
    if ((k - 1) % cfg.restart != 0) EXPECT_LE(h[k], h[k - 1] * (1 + 1e-12)) << k;
}

TEST(Gmres, ExactInitialGuessNeedsNoIterations) {
  const Background bg = Background::from_frequency(0.1, 24000.0);
  const Grid g({4, 4, 4}, {0.25, 0.25, 0.25});
  const SystemOperator op(ConductivityModel(g, 0.1), bg);
  const DipoleSource src{{0.5, 0.5, 0.5}, {0, 0, 1}, 24000.0};
  const ComplexVectorField E0 = background_E_on_grid(src, g, bg);
  const LinearMap A = [&op](std::span<const cplx> x, std::span<cplx> y) {
    const ComplexVectorField r = op.apply(ComplexVectorField(op.grid(), {x.begin(), x.end()}));
    std::copy(r.values().begin(), r.values().end(), y.begin());
  };
  const GmresResult r = gmres(A, E0.values(), {}, E0.values());
  EXPECT_TRUE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 0);
  EXPECT_EQ(r.stats.restarts, 0);
}

TEST(Gmres, ReturnsBestIterateWhenCapped) {
  std::mt19937_64 rng(5);
  const oracle::Matrix A = diagonally_dominant(100, rng) + oracle::Matrix::Random(100, 100) * 2.0;
  const auto b = random_values(100, rng);
  GmresConfig cfg;
  cfg.tol = 1e-12;
  cfg.restart = 2;
  cfg.max_outer = 3;
  const LinearMap map = dense_map(A);
  const GmresResult r = gmres(map, b, cfg);
  EXPECT_FALSE(r.stats.converged);
  EXPECT_EQ(r.stats.iterations, 6);
  EXPECT_LT(r.stats.final_residual(), 1.0);
  EXPECT_NEAR(r.stats.final_residual(), true_residual(map, r.x, b), 1e-14);
}

TEST(Gmres, BreakdownOnSingularOperator) {
  const std::vector<cplx> b(10, cplx(1.0, 0.0));
  const LinearMap zero = [](std::span<const cplx>, std::span<cplx> y) {
    std::fill(y.begin(), y.end(), cplx(0.0));
  };
  try {
    gmres(zero, b, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Breakdown);
  }
}

TEST(Gmres, DivergenceOnNonFiniteValues) {
  const std::vector<cplx> b(10, cplx(1.0, 0.0));
  const LinearMap bad = [](std::span<const cplx>, std::span<cplx> y) {
    std::fill(y.begin(), y.end(), cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
  };
  try {
    gmres(bad, b, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergence);
  }
}

TEST(Gmres, ConfigValidation) {
  const std::vector<cplx> b(3, cplx(1.0));
  const LinearMap id = [](std::span<const cplx> x, std::span<cplx> y) {
    std::copy(x.begin(), x.end(), y.begin());
  };
  for (GmresConfig cfg : {GmresConfig{0, 1e-6, 10}, GmresConfig{10, 0.0, 10},
                          GmresConfig{10, 1.0, 10}, GmresConfig{10, 1e-6, 0}}) {
    try {
      gmres(id, b, cfg);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidParameter);
    }
  }
}

TEST(Arnoldi, BasisIsOrthonormal) {
  std::mt19937_64 rng(6);
  const oracle::Matrix A = diagonally_dominant(70, rng);
  const auto v0 = random_values(70, rng);
  const ArnoldiResult r = arnoldi(dense_map(A), v0, 10);
  ASSERT_EQ(r.basis.size(), 11u);
  EXPECT_FALSE(r.breakdown);
  for (std::size_t i = 0; i < r.basis.size(); ++i)
    for (std::size_t j = 0; j < r.basis.size(); ++j) {
      const cplx ip = inner_product(r.basis[i], r.basis[j]);
      EXPECT_LT(std::abs(ip - (i == j ? 1.0 : 0.0)), 1e-8);
    }
  // A·V_k = V_{k+1}·H
  for (std::size_t j = 0; j < 10; ++j) {
    const oracle::Vector Av = A * oracle::to_vector(r.basis[j]);
    oracle::Vector VH = oracle::Vector::Zero(70);
    for (std::size_t i = 0; i <= j + 1; ++i) VH += r.hessenberg[j][i] * oracle::to_vector(r.basis[i]);
    EXPECT_LT((Av - VH).norm(), 1e-12 * Av.norm());
  }
}

TEST(Gmres, WarmStartNeedsNoMoreIterationsThanColdStart) {
  const BenchmarkModel b = build_benchmark_model(BenchmarkName::TwoBlocks, 0.125);
  const Background bg = Background::from_frequency(b.model.sigma0(), b.frequency);
  const SystemOperator op(b.model, bg);
  const LinearMap A = [&op](std::span<const cplx> x, std::span<cplx> y) { op.apply_masked(x, y); };
  auto rhs = [&](const Vec3& pos) {
    const DipoleSource src{pos, b.source_moment, b.frequency};
    ComplexVectorField e0 = background_E_on_grid(src, b.model.grid(), bg);
    op.project(e0.values());
    return e0;
  };
  const ComplexVectorField first = rhs(b.source_position);
  const ComplexVectorField nearby = rhs({b.source_position[0] + 0.05, b.source_position[1], 0.0});
  GmresConfig cfg;
  cfg.tol = 1e-6;
  const GmresResult prev = gmres(A, first.values(), cfg);
  const GmresResult cold = gmres(A, nearby.values(), cfg);
  const GmresResult warm = gmres(A, nearby.values(), cfg, prev.x);
  ASSERT_TRUE(cold.stats.converged && warm.stats.converged);
  EXPECT_LE(warm.stats.iterations, cold.stats.iterations);
}
