#include "iedd/benchmark_models.hpp"

#include <algorithm>
#include <cmath>

#include "iedd/decomposition.hpp"
#include "iedd/error.hpp"

namespace iedd {

namespace {

constexpr double kCell = 0.25;
constexpr double kToolFrequency = 24000.0;

// Cubic lattice of `n` cells of size kCell centred on the origin.
Grid centred_grid(std::int64_t n) {
  const double lo = -0.5 * static_cast<double>(n) * kCell + 0.5 * kCell;
  return Grid({n, n, n}, {kCell, kCell, kCell}, {lo, lo, lo});
}

std::int64_t scaled_count(double full, double scale) {
  return std::max<std::int64_t>(1, std::llround(full * scale));
}

bool inside(double v, double lo, double hi) { return v >= lo && v < hi; }

// Slab of z-cells whose centroids lie in [zlo, zhi), widened by one cell on
// each side and clamped to the grid; spans the full x and y extent.
IndexBox z_slab(const Grid& g, double zlo, double zhi) {
  std::int64_t first = g.n(2), last = -1;
  for (std::int64_t k = 0; k < g.n(2); ++k) {
    const double z = g.centroid(0, 0, k)[2];
    if (inside(z, zlo, zhi)) {
      first = std::min(first, k);
      last = std::max(last, k);
    }
  }
  if (last < 0) raise(ErrorCode::InvalidParameter, "scale too small: anomaly vanished");
  return {{0, 0, std::max<std::int64_t>(0, first - 1)},
          {g.n(0), g.n(1), std::min(g.n(2), last + 2)}};
}

std::vector<Vec3> snap(const Grid& g, std::initializer_list<Vec3> points) {
  std::vector<Vec3> out;
  for (const Vec3& p : points) out.push_back(g.centroid(g.linear(g.nearest_cell(p))));
  return out;
}

BenchmarkModel two_blocks(double s) {
  const Grid g = centred_grid(scaled_count(128.0, s));
  const double sigma0 = 0.1, sigma = 0.01;
  const double half = 15.0 * s, zin = 5.0 * s, zout = 12.5 * s;
  auto sigma_at = [&](const Vec3& p) {
    const bool xy = inside(p[0], -half, half) && inside(p[1], -half, half);
    const bool z = inside(p[2], zin, zout) || inside(p[2], -zout, -zin);
    return Tensor3x3::isotropic(xy && z ? sigma : sigma0);
  };
  BenchmarkModel b{BenchmarkName::TwoBlocks, s, rasterize(g, sigma0, sigma_at),
                   kToolFrequency / (s * s), {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {}, {}};
  b.boxes = {z_slab(g, zin, zout), z_slab(g, -zout, -zin)};
  const double r = 4.0 * s;
  b.receivers = snap(g, {{r, 0, 0}, {2 * r, 0, 0}, {3 * r, 0, 0}, {-r, 0, 0}, {-2 * r, 0, 0},
                         {0, r, 0}, {0, 2 * r, 0}, {r, r, 0}, {-2 * r, -r, 0}});
  return b;
}

BenchmarkModel faulted_vti(double s) {
  const Grid g = centred_grid(scaled_count(120.0, s));
  const double sigma0 = 0.01, sigma_layer = 0.01;
  const Tensor3x3 vti = rotate_vti_tensor(0.2, 0.1, 0.0, 0.0);
  auto sigma_at = [&](const Vec3& p) {
    const bool layer = p[0] < 0.0 ? inside(p[2], -12.0 * s, -9.0 * s)
                                  : inside(p[2], -10.0 * s, -7.0 * s);
    return layer ? Tensor3x3::isotropic(sigma_layer) : vti;
  };
  BenchmarkModel b{BenchmarkName::FaultedVti, s, rasterize(g, sigma0, sigma_at),
                   kToolFrequency / (s * s), {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {}, {}};
  b.boxes = split_along_axis(g, 3, 2);
  const double r = 4.0 * s;
  b.receivers = snap(g, {{r, 0, 0}, {2 * r, 0, 0}, {-r, 0, 0}, {0, r, 0}, {0, 0, r}});
  b.receivers_embedded = true;
  return b;
}

BenchmarkModel faulted_formation(double s, const FormationParams& formation) {
  const FormationParams fp = formation.scaled(s);
  const Vec3 lo{-100.0 * s, -100.0 * s, -60.0 * s};
  const Vec3 hi{1000.0 * s, 100.0 * s, 140.0 * s};
  const double cell = 2.0;
  Index3 n{};
  Vec3 origin{};
  for (int a = 0; a < 3; ++a) {
    n[a] = std::max<std::int64_t>(1, std::llround((hi[a] - lo[a]) / cell));
    origin[a] = lo[a] + 0.5 * cell;
  }
  const Grid g(n, {cell, cell, cell}, origin);
  const FormationSampler sampler(fp);
  const double sigma0 = 0.1;
  BenchmarkModel b{BenchmarkName::FaultedFormation,
                   s,
                   rasterize(g, sigma0, [&](const Vec3& p) { return sampler.sample(p); }),
                   kToolFrequency / (s * s),
                   {0.0, 0.0, 0.0},
                   {0.0, 0.0, 1.0},
                   split_along_axis(g, 2, 0),
                   {}};
  b.receivers = snap(g, {{0, 0, -7.0 * s}, {0, 0, -15.0 * s}, {0, 0, -30.0 * s}});
  b.receivers_embedded = true;
  return b;
}

}  // namespace

BenchmarkName parse_benchmark_name(const std::string& name) {
  if (name == "two_blocks") return BenchmarkName::TwoBlocks;
  if (name == "faulted_vti") return BenchmarkName::FaultedVti;
  if (name == "faulted_formation") return BenchmarkName::FaultedFormation;
  raise(ErrorCode::InvalidParameter, "unknown benchmark model '" + name + "'");
}

std::string to_string(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::TwoBlocks: return "two_blocks";
    case BenchmarkName::FaultedVti: return "faulted_vti";
    case BenchmarkName::FaultedFormation: return "faulted_formation";
  }
  return "unknown";
}

FormationParams FormationParams::scaled(double s) const {
  FormationParams p = *this;
  for (double& c : p.perturbation_center) c *= s;
  p.perturbation_gamma *= s;
  p.fault_x *= s;
  p.fault_throw *= s;
  for (auto& layer : p.sand_layers) {
    layer[0] *= s;
    layer[1] *= s;
  }
  return p;
}

bool FormationSampler::in_sand(const Vec3& p) const {
  const double shift = p[0] >= params_.fault_x ? params_.fault_throw : 0.0;
  for (const auto& layer : params_.sand_layers)
    if (inside(p[2], layer[0] - shift, layer[1] - shift)) return true;
  return false;
}

Tensor3x3 FormationSampler::sample(const Vec3& p, bool* clamped) const {
  if (clamped) *clamped = false;
  if (!in_sand(p))
    return Tensor3x3::diagonal(params_.shale_sigma_h, params_.shale_sigma_h, params_.shale_sigma_v);
  const double r = norm(p - params_.perturbation_center);
  const double base = params_.sand_sigma;
  return Tensor3x3::isotropic(
      base + params_.perturbation_alpha * base * std::exp(-r / params_.perturbation_gamma));
}

BenchmarkModel build_benchmark_model(BenchmarkName name, double scale,
                                     const FormationParams& formation) {
  if (!(scale > 0.0 && scale <= 1.0))
    raise(ErrorCode::InvalidParameter, "benchmark scale must lie in (0, 1]");
  switch (name) {
    case BenchmarkName::TwoBlocks: return two_blocks(scale);
    case BenchmarkName::FaultedVti: return faulted_vti(scale);
    case BenchmarkName::FaultedFormation: return faulted_formation(scale, formation);
  }
  raise(ErrorCode::InvalidParameter, "unknown benchmark model");
}

}  // namespace iedd
