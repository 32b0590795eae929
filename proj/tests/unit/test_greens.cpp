#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <random>

#include "iedd/error.hpp"
#include "iedd/greens.hpp"
#include "oracle.hpp"

using namespace iedd;

namespace {

constexpr double kPi = std::numbers::pi;
const Background kBg = Background::from_frequency(0.1, 24000.0);

Vec3 random_offset(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Vec3 d;
  do d = {u(rng), u(rng), u(rng)};
  while (norm(d) < 0.5);
  return d;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Background, WavenumberAndSkinDepth) {
  const cplx k = kBg.k0();
  EXPECT_NEAR(k.real(), 0.0973, 5e-5);
  EXPECT_NEAR(k.imag(), 0.0973, 5e-5);
  EXPECT_NEAR(std::norm(k), kBg.omega * kMu0 * kBg.sigma0, 1e-15);
  EXPECT_NEAR(kBg.skin_depth(), 10.3, 0.05);
  EXPECT_NEAR(kBg.frequency(), 24000.0, 1e-9);
}

TEST(ScalarGreen, StaticLimit) {
  const Background zero{0.1, 0.0};
  EXPECT_NEAR(scalar_green({1, 0, 0}, {0, 0, 0}, zero).real(), 1.0 / (4 * kPi), 1e-15);
  EXPECT_NEAR(scalar_green({0, 2, 0}, {0, 0, 0}, zero).real(), 1.0 / (8 * kPi), 1e-15);
  EXPECT_EQ(scalar_green({0, 2, 0}, {0, 0, 0}, zero).imag(), 0.0);
}

TEST(ScalarGreen, CoincidentPointsThrow) {
  try {
    scalar_green({1, 1, 1}, {1, 1, 1}, kBg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singularity);
  }
}

TEST(GreenDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-4;
  for (int n = 0; n < 10; ++n) {
    const Vec3 d = random_offset(rng);
    const CVec3 grad = green_gradient(d, kBg);
    const auto hess = green_hessian(d, kBg);
    for (int a = 0; a < 3; ++a) {
      Vec3 dp = d, dm = d;
      dp[a] += h;
      dm[a] -= h;
      const cplx fd = (scalar_green(dp, {0, 0, 0}, kBg) - scalar_green(dm, {0, 0, 0}, kBg)) / (2 * h);
      EXPECT_LT(rel(grad[a], fd), 1e-6);
      for (int b = 0; b < 3; ++b) {
        cplx fd2;
        if (a == b) {
          fd2 = (scalar_green(dp, {0, 0, 0}, kBg) - 2.0 * scalar_green(d, {0, 0, 0}, kBg) +
                 scalar_green(dm, {0, 0, 0}, kBg)) / (h * h);
        } else {
          auto g = [&](double sa, double sb) {
            Vec3 x = d;
            x[a] += sa * h;
            x[b] += sb * h;
            return scalar_green(x, {0, 0, 0}, kBg);
          };
          fd2 = (g(1, 1) - g(1, -1) - g(-1, 1) + g(-1, -1)) / (4 * h * h);
        }
        EXPECT_LT(std::abs(hess[3 * a + b] - fd2), 1e-5 * std::abs(hess[3 * a + b]) + 1e-9)
            << a << b;
      }
    }
  }
}

TEST(ElectricTensor, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 10; ++n) {
    const Vec3 d = random_offset(rng);
    const auto G = electric_green_tensor(d, kBg);
    const auto ref = oracle::electric_tensor(d, kBg);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        EXPECT_LT(std::abs(G[3 * p + q] - ref(p, q)), 1e-12 * ref.norm());
        EXPECT_EQ(G[3 * p + q], G[3 * q + p]);
      }
  }
}

TEST(MagneticTensor, IsScaledCurlOfElectricTensor) {
  std::mt19937_64 rng(13);
  const double h = 1e-4;
  const cplx iwm = kBg.i_omega_mu();
  for (int n = 0; n < 5; ++n) {
    const Vec3 d = random_offset(rng);
    const auto GH = magnetic_green_tensor(d, kBg);
    // (∇×G^E)_pq = ε_pkl ∂_k G^E_lq
    std::array<std::array<cplx, 9>, 3> dG;
    for (int k = 0; k < 3; ++k) {
      Vec3 dp = d, dm = d;
      dp[k] += h;
      dm[k] -= h;
      const auto a = electric_green_tensor(dp, kBg), b = electric_green_tensor(dm, kBg);
      for (int e = 0; e < 9; ++e) dG[k][e] = (a[e] - b[e]) / (2 * h);
    }
    double scale = 0.0;
    for (const cplx& v : GH) scale = std::max(scale, std::abs(v));
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        const int k = (p + 1) % 3, l = (p + 2) % 3;
        const cplx curl = dG[k][3 * l + q] - dG[l][3 * k + q];
        EXPECT_LT(std::abs(curl / iwm - GH[3 * p + q]), 1e-6 * scale);
      }
    // Odd under offset negation, antisymmetric in (p,q).
    const auto neg = magnetic_green_tensor({-d[0], -d[1], -d[2]}, kBg);
    for (int e = 0; e < 9; ++e) EXPECT_LT(std::abs(GH[e] + neg[e]), 1e-14 * scale);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) EXPECT_EQ(GH[3 * p + q], -GH[3 * q + p]);
  }
}

TEST(MagneticTensor, StaticLimitPattern) {
  const Background zero{0.1, 0.0};
  const auto GH = magnetic_green_tensor({1, 0, 0}, zero);
  // Unit offset along x: only ∂x g = −1/(4π) survives, in the yz / zy slots.
  EXPECT_NEAR(std::abs(GH[3 * 1 + 2]), 1.0 / (4 * kPi), 1e-15);
  EXPECT_NEAR(std::abs(GH[3 * 2 + 1]), 1.0 / (4 * kPi), 1e-15);
  EXPECT_EQ(GH[0], 0.0);
  EXPECT_EQ(GH[3 * 0 + 1], 0.0);
}

TEST(SelfTerm, MatchesSphericalQuadrature) {
  const double dv = 0.25 * 0.25 * 0.25;
  const cplx closed = electric_self_term(dv, kBg);
  const cplx quad = oracle::electric_self_quadrature(dv, kBg);
  EXPECT_LT(rel(closed, quad), 5e-5);
  // Four significant digits in both parts.
  EXPECT_NEAR(closed.real(), quad.real(), 5e-5 * std::abs(quad.real()));
  EXPECT_NEAR(closed.imag(), quad.imag(), 5e-4 * std::abs(quad.imag()));
}

TEST(SelfTerm, ApproachesDeltaLimitWithOrderAtLeastOne) {
  const cplx limit = -1.0 / (3.0 * kBg.sigma0);
  std::vector<double> err;
  for (double h : {1.0, 0.5, 0.25}) err.push_back(std::abs(electric_self_term(h * h * h, kBg) - limit));
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double order = std::log2(err[k - 1] / err[k]);
    EXPECT_GE(order, 1.0);
  }
}

TEST(Kernel, PaddedShapeAndStorage) {
  const GreenKernel K = assemble_electric_kernel(Grid({2, 2, 2}, {1, 1, 1}), kBg);
  EXPECT_EQ(K.padded_dims(), (Index3{4, 4, 4}));
  EXPECT_EQ(K.padded_size(), 64u);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) EXPECT_EQ(K.spectrum(p, q).size(), 64u);
  EXPECT_EQ(K.stored_spectra(), 6u);
  const GreenKernel H = assemble_magnetic_kernel(Grid({2, 2, 2}, {1, 1, 1}), kBg);
  EXPECT_EQ(H.stored_spectra(), 3u);
}

TEST(Kernel, SamplesAreSymmetricAndSelfTermAtOrigin) {
  const Vec3 h{0.25, 0.25, 0.25};
  const Index3 n{3, 4, 2};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      const SpectralArray a = circulant_samples(KernelKind::Electric, n, h, kBg, p, q);
      const SpectralArray b = circulant_samples(KernelKind::Electric, n, h, kBg, q, p);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
      const cplx expected = p == q ? electric_self_term(h[0] * h[1] * h[2], kBg) : cplx(0.0);
      EXPECT_LT(std::abs(a[0] - expected), 1e-15);
    }
  const auto s = kernel_sample(KernelKind::Magnetic, {0, 0, 0}, h, kBg);
  for (const cplx& v : s) EXPECT_EQ(v, 0.0);
}

TEST(Kernel, SpectraInvertToSpatialSamples) {
  const Grid g({3, 2, 4}, {0.5, 0.25, 0.25});
  for (KernelKind kind : {KernelKind::Electric, KernelKind::Magnetic}) {
    const GreenKernel K = assemble_kernel(kind, g.counts(), g.spacing(), kBg);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        const SpectralArray s = K.spatial_samples(p, q);
        const SpectralArray ref = circulant_samples(kind, g.counts(), g.spacing(), kBg, p, q);
        double num = 0, den = 0;
        for (std::size_t k = 0; k < s.size(); ++k) {
          num += std::norm(s[k] - ref[k]);
          den += std::norm(ref[k]);
        }
        if (den > 0) EXPECT_LT(std::sqrt(num / den), 1e-12);
        else EXPECT_EQ(num, 0.0);
      }
  }
}

TEST(Kernel, SampleMatchesOracleCellKernel) {
  const Vec3 h{0.5, 0.25, 1.0};
  for (KernelKind kind : {KernelKind::Electric, KernelKind::Magnetic})
    for (Index3 off : {Index3{1, 0, 0}, Index3{-2, 3, 1}, Index3{0, 0, 0}}) {
      const auto s = kernel_sample(kind, off, h, kBg);
      const auto ref = oracle::cell_kernel(kind, {off[0] * h[0], off[1] * h[1], off[2] * h[2]}, h, kBg);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          EXPECT_LT(std::abs(s[3 * p + q] - ref(p, q)), 1e-13 * std::max(1.0, ref.norm()));
    }
}

TEST(KernelCache, SaveLoadRoundTrip) {
  const Grid g({3, 2, 2}, {0.25, 0.25, 0.25});
  const auto path = std::filesystem::temp_directory_path() / "iedd_kernel_cache.bin";
  std::filesystem::remove(path);
  const GreenKernel K = load_or_assemble_kernel(path, KernelKind::Electric, g, kBg);
  ASSERT_TRUE(std::filesystem::exists(path));
  const GreenKernel L = load_kernel(path);
  EXPECT_TRUE(L.matches(g.counts(), g.spacing(), kBg));
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      const SpectralArray a = K.spectrum(p, q), b = L.spectrum(p, q);
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
    }
  // A different background invalidates the cache and rewrites it.
  const Background other = Background::from_frequency(0.2, 24000.0);
  const GreenKernel M = load_or_assemble_kernel(path, KernelKind::Electric, g, other);
  EXPECT_TRUE(load_kernel(path).matches(g.counts(), g.spacing(), other));
  std::filesystem::remove(path);
}

TEST(KernelCache, RejectsForeignFile) {
  const auto path = std::filesystem::temp_directory_path() / "iedd_not_a_kernel.bin";
  { std::ofstream(path) << "hello"; }
  try {
    load_kernel(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  std::filesystem::remove(path);
}
