#include "iedd/greens.hpp"

#include <cmath>
#include <limits>
#include <new>
#include <sstream>

#include "iedd/error.hpp"
#include "iedd/tensor.hpp"

namespace iedd {

using std::numbers::pi;

Background Background::from_frequency(double sigma0, double frequency_hz) {
  if (!(sigma0 > 0.0)) raise(ErrorCode::InvalidParameter, "sigma0 must be positive");
  if (!(frequency_hz >= 0.0)) raise(ErrorCode::InvalidParameter, "frequency must be >= 0");
  return {sigma0, 2.0 * pi * frequency_hz};
}

cplx Background::k0() const {
  // sqrt(i·x) = sqrt(x)·(1 + i)/√2 for x >= 0.
  const double m = std::sqrt(omega * kMu0 * sigma0 / 2.0);
  return {m, m};
}

double Background::skin_depth() const {
  if (omega <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(2.0 / (omega * kMu0 * sigma0));
}

double Background::frequency() const { return omega / (2.0 * pi); }

cplx scalar_green(const Vec3& r, const Vec3& r_prime, const Background& bg) {
  const double R = norm(r - r_prime);
  if (R == 0.0) raise(ErrorCode::Singularity, "scalar Green's function evaluated at r = r'");
  const cplx ik = cplx(0.0, 1.0) * bg.k0();
  return std::exp(ik * R) / (4.0 * pi * R);
}

CVec3 green_gradient(const Vec3& d, const Background& bg) {
  const double R = norm(d);
  if (R == 0.0) raise(ErrorCode::Singularity, "Green's gradient at zero separation");
  const cplx k = bg.k0();
  const cplx ik = cplx(0.0, 1.0) * k;
  const cplx g = std::exp(ik * R) / (4.0 * pi * R);
  const cplx radial = g * (ik - 1.0 / R) / R;  // times d = R·r̂
  return {radial * d[0], radial * d[1], radial * d[2]};
}

std::array<cplx, 9> green_hessian(const Vec3& d, const Background& bg) {
  const double R = norm(d);
  if (R == 0.0) raise(ErrorCode::Singularity, "Green's hessian at zero separation");
  const cplx k = bg.k0();
  const cplx ikR = cplx(0.0, 1.0) * k * R;
  const cplx g = std::exp(ikR) / (4.0 * pi * R);
  const double R2 = R * R;
  const cplx a = g * (3.0 - 3.0 * ikR - k * k * R2) / R2;  // r̂r̂ coefficient
  const cplx b = -g * (1.0 - ikR) / R2;                    // identity coefficient
  const Vec3 u{d[0] / R, d[1] / R, d[2] / R};
  std::array<cplx, 9> h{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) h[3 * p + q] = a * (u[p] * u[q]) + (p == q ? b : cplx(0.0));
  return h;
}

std::array<cplx, 9> electric_green_tensor(const Vec3& d, const Background& bg) {
  std::array<cplx, 9> G = green_hessian(d, bg);
  const double R = norm(d);
  const cplx g = std::exp(cplx(0.0, 1.0) * bg.k0() * R) / (4.0 * pi * R);
  const cplx iwm = bg.i_omega_mu();
  for (int s = 0; s < 9; ++s) G[s] /= bg.sigma0;
  for (int p = 0; p < 3; ++p) G[4 * p] += iwm * g;
  return G;
}

std::array<cplx, 9> magnetic_green_tensor(const Vec3& d, const Background& bg) {
  const CVec3 dg = green_gradient(d, bg);
  const cplx z(0.0);
  // (∇g ×): row p, column q.
  return {z, -dg[2], dg[1], dg[2], z, -dg[0], -dg[1], dg[0], z};
}

cplx electric_self_term(double cell_volume, const Background& bg) {
  if (!(cell_volume > 0.0)) raise(ErrorCode::InvalidParameter, "cell volume must be positive");
  const double a = std::cbrt(3.0 * cell_volume / (4.0 * pi));
  const cplx ika = cplx(0.0, 1.0) * bg.k0() * a;
  return ((2.0 / 3.0) * (1.0 - ika) * std::exp(ika) - 1.0) / bg.sigma0;
}

std::array<cplx, 9> kernel_sample(KernelKind kind, const Index3& offset, const Vec3& spacing,
                                  const Background& bg) {
  const double dv = spacing[0] * spacing[1] * spacing[2];
  if (offset[0] == 0 && offset[1] == 0 && offset[2] == 0) {
    std::array<cplx, 9> s{};
    if (kind == KernelKind::Electric) {
      const cplx self = electric_self_term(dv, bg);
      s[0] = s[4] = s[8] = self;
    }
    return s;
  }
  const Vec3 d{offset[0] * spacing[0], offset[1] * spacing[1], offset[2] * spacing[2]};
  std::array<cplx, 9> G =
      kind == KernelKind::Electric ? electric_green_tensor(d, bg) : magnetic_green_tensor(d, bg);
  for (cplx& v : G) v *= dv;
  return G;
}

// ------------------------------------------------------------- GreenKernel

namespace {

struct Layout {
  std::array<int, 9> slot{};
  std::array<double, 9> sign{};
  int slots = 0;
  // Entry of the 9-vector that feeds each storage slot.
  std::array<int, 6> source{};
};

Layout layout_for(KernelKind kind) {
  Layout l;
  if (kind == KernelKind::Electric) {
    l.slots = 6;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        l.slot[3 * p + q] = Tensor3x3::slot(p, q);
        l.sign[3 * p + q] = 1.0;
      }
    l.source = {0, 4, 8, 1, 2, 5};
  } else {
    // Slots hold ∂x g, ∂y g, ∂z g (entries zy, xz, yx of ∇g×).
    l.slots = 3;
    l.slot = {-1, 2, 1, 2, -1, 0, 1, 0, -1};
    l.sign = {0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0};
    l.source = {7, 2, 3, 0, 0, 0};
  }
  return l;
}

Index3 doubled(const Index3& counts) { return {2 * counts[0], 2 * counts[1], 2 * counts[2]}; }

std::int64_t wrap_offset(std::int64_t idx, std::int64_t n) {
  // Index in a 2n-periodic array -> signed offset; the offset ±n is unused.
  return idx < n ? idx : idx - 2 * n;
}

}  // namespace

std::size_t GreenKernel::padded_size() const {
  return static_cast<std::size_t>(padded_[0] * padded_[1] * padded_[2]);
}

GreenKernel::Component GreenKernel::component(int p, int q) const {
  const int s = slot_of_[3 * p + q];
  if (s < 0) return {};
  return {&slots_[static_cast<std::size_t>(s)], sign_of_[3 * p + q]};
}

SpectralArray GreenKernel::spectrum(int p, int q) const {
  const Component c = component(p, q);
  SpectralArray out(padded_size(), cplx(0.0));
  if (c.spectrum)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = c.sign * (*c.spectrum)[k];
  return out;
}

SpectralArray GreenKernel::spatial_samples(int p, int q) const {
  SpectralArray s = spectrum(p, q);
  Fft3d(padded_).inverse(s);
  return s;
}

cplx GreenKernel::self_term(int p, int q) const { return self_[3 * p + q]; }

bool GreenKernel::matches(const Index3& counts, const Vec3& spacing, const Background& bg) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); };
  if (counts != counts_) return false;
  for (int a = 0; a < 3; ++a)
    if (!close(spacing_[a], spacing[a])) return false;
  return close(bg_.sigma0, bg.sigma0) && close(bg_.omega, bg.omega);
}

SpectralArray circulant_samples(KernelKind kind, const Index3& counts, const Vec3& spacing,
                                const Background& bg, int p, int q) {
  const Index3 P = doubled(counts);
  SpectralArray out(static_cast<std::size_t>(P[0] * P[1] * P[2]), cplx(0.0));
  std::size_t c = 0;
  for (std::int64_t k = 0; k < P[2]; ++k)
    for (std::int64_t j = 0; j < P[1]; ++j)
      for (std::int64_t i = 0; i < P[0]; ++i, ++c) {
        if (i == counts[0] || j == counts[1] || k == counts[2]) continue;
        const Index3 off{wrap_offset(i, counts[0]), wrap_offset(j, counts[1]),
                         wrap_offset(k, counts[2])};
        out[c] = kernel_sample(kind, off, spacing, bg)[3 * p + q];
      }
  return out;
}

GreenKernel assemble_kernel(KernelKind kind, const Index3& counts, const Vec3& spacing,
                            const Background& bg) {
  for (int a = 0; a < 3; ++a)
    if (counts[a] < 1 || !(spacing[a] > 0.0))
      raise(ErrorCode::InvalidParameter, "kernel lattice must be non-empty with positive spacing");
  if (!(bg.sigma0 > 0.0)) raise(ErrorCode::InvalidParameter, "sigma0 must be positive");

  const Layout layout = layout_for(kind);
  GreenKernel K;
  K.kind_ = kind;
  K.counts_ = counts;
  K.spacing_ = spacing;
  K.bg_ = bg;
  K.padded_ = doubled(counts);
  K.slot_of_ = layout.slot;
  K.sign_of_ = layout.sign;

  const std::size_t n = K.padded_size();
  try {
    K.slots_.assign(static_cast<std::size_t>(layout.slots), SpectralArray(n, cplx(0.0)));
  } catch (const std::bad_alloc&) {
    std::ostringstream os;
    os << "cannot allocate Green's kernel spectra: " << layout.slots << " x " << n
       << " complex values (" << layout.slots * n * sizeof(cplx) << " bytes required)";
    raise(ErrorCode::Resource, os.str());
  }

  const Index3& P = K.padded_;
  std::size_t c = 0;
  for (std::int64_t k = 0; k < P[2]; ++k)
    for (std::int64_t j = 0; j < P[1]; ++j)
      for (std::int64_t i = 0; i < P[0]; ++i, ++c) {
        if (i == counts[0] || j == counts[1] || k == counts[2]) continue;
        const Index3 off{wrap_offset(i, counts[0]), wrap_offset(j, counts[1]),
                         wrap_offset(k, counts[2])};
        const std::array<cplx, 9> G = kernel_sample(kind, off, spacing, bg);
        for (int s = 0; s < layout.slots; ++s)
          K.slots_[static_cast<std::size_t>(s)][c] = G[layout.source[s]];
      }
  K.self_ = kernel_sample(kind, {0, 0, 0}, spacing, bg);

  const Fft3d fft(P);
  for (SpectralArray& s : K.slots_) fft.forward(s);
  return K;
}

GreenKernel assemble_electric_kernel(const Grid& grid, const Background& bg) {
  return assemble_kernel(KernelKind::Electric, grid.counts(), grid.spacing(), bg);
}

GreenKernel assemble_magnetic_kernel(const Grid& grid, const Background& bg) {
  return assemble_kernel(KernelKind::Magnetic, grid.counts(), grid.spacing(), bg);
}

}  // namespace iedd
