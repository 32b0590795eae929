#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include "iedd/fft.hpp"
#include "iedd/grid.hpp"
#include "iedd/types.hpp"

namespace iedd {

// Homogeneous isotropic background in the diffusive regime.
struct Background {
  double sigma0 = 0.1;  // S/m
  double omega = 0.0;   // rad/s

  static Background from_frequency(double sigma0, double frequency_hz);

  // sqrt(iωμ₀σ₀), the root with positive real and imaginary parts.
  cplx k0() const;
  cplx i_omega_mu() const { return cplx(0.0, omega * kMu0); }
  double skin_depth() const;
  double frequency() const;
};

// e^{ik₀R} / (4πR); throws Singularity when r == r'.
cplx scalar_green(const Vec3& r, const Vec3& r_prime, const Background& bg);

// Closed-form derivatives of g with respect to r at separation d = r − r'.
CVec3 green_gradient(const Vec3& d, const Background& bg);
// ∂p∂q g as a symmetric 3x3 (row-major, all nine entries).
std::array<cplx, 9> green_hessian(const Vec3& d, const Background& bg);

// Point values of the electric and magnetic Green's tensors at d ≠ 0:
//   G^E = (iωμ₀ I + ∇∇/σ₀) g,   G^H_pq = ε_pkq ∂_k g.
std::array<cplx, 9> electric_green_tensor(const Vec3& d, const Background& bg);
std::array<cplx, 9> magnetic_green_tensor(const Vec3& d, const Background& bg);

// Integral of G^E over a ball of volume `cell_volume` centred on the
// singularity; the result is this scalar times I. With a = (3Δv/4π)^{1/3}:
//   (1/σ₀)·[(2/3)(1 − ik₀a)e^{ik₀a} − 1].
cplx electric_self_term(double cell_volume, const Background& bg);

enum class KernelKind { Electric, Magnetic };

// Δv-weighted kernel tensor between two cells of a lattice with `spacing`
// separated by integer `offset` (target − source). The zero offset carries
// the singular-cell integral (electric) or 0 (magnetic).
std::array<cplx, 9> kernel_sample(KernelKind kind, const Index3& offset, const Vec3& spacing,
                                  const Background& bg);

// Padded spectra of the Green's tensor components for one lattice shape.
// Symmetric (electric) or antisymmetric (magnetic) component pairs share
// storage; spectrum(p,q) always refers to the (p,q) entry including sign.
class GreenKernel {
 public:
  struct Component {
    const SpectralArray* spectrum = nullptr;  // nullptr: identically zero
    double sign = 1.0;
  };

  KernelKind kind() const { return kind_; }
  const Index3& counts() const { return counts_; }
  const Vec3& spacing() const { return spacing_; }
  const Background& background() const { return bg_; }
  const Index3& padded_dims() const { return padded_; }
  std::size_t padded_size() const;

  Component component(int p, int q) const;
  // Materialized (p,q) spectrum, signed; zeros for vanishing components.
  SpectralArray spectrum(int p, int q) const;
  // Inverse FFT of spectrum(p,q): the circulant-embedded spatial samples.
  SpectralArray spatial_samples(int p, int q) const;
  // Kernel value at the zero offset (Δv-weighted), component (p,q).
  cplx self_term(int p, int q) const;

  std::size_t stored_spectra() const { return slots_.size(); }
  std::size_t bytes() const { return slots_.size() * padded_size() * sizeof(cplx); }

  bool matches(const Index3& counts, const Vec3& spacing, const Background& bg) const;

 private:
  friend GreenKernel assemble_kernel(KernelKind, const Index3&, const Vec3&, const Background&);
  friend void save_kernel(const GreenKernel&, const std::filesystem::path&);
  friend GreenKernel load_kernel(const std::filesystem::path&);

  KernelKind kind_ = KernelKind::Electric;
  Index3 counts_{0, 0, 0};
  Vec3 spacing_{0, 0, 0};
  Background bg_;
  Index3 padded_{0, 0, 0};
  std::vector<SpectralArray> slots_;
  std::array<int, 9> slot_of_{};
  std::array<double, 9> sign_of_{};
  std::array<cplx, 9> self_{};
};

// Circulant embedding of the kernel samples for a lattice with `counts`
// cells: offset d sits at index d mod 2n, the unused offset n is zero.
SpectralArray circulant_samples(KernelKind kind, const Index3& counts, const Vec3& spacing,
                                const Background& bg, int p, int q);

GreenKernel assemble_kernel(KernelKind kind, const Index3& counts, const Vec3& spacing,
                            const Background& bg);
GreenKernel assemble_electric_kernel(const Grid& grid, const Background& bg);
GreenKernel assemble_magnetic_kernel(const Grid& grid, const Background& bg);

// Versioned binary cache keyed by (counts, spacing, σ₀, ω, kind).
void save_kernel(const GreenKernel& kernel, const std::filesystem::path& path);
GreenKernel load_kernel(const std::filesystem::path& path);
// Loads `path` when its key matches, otherwise assembles and (re)writes it.
GreenKernel load_or_assemble_kernel(const std::filesystem::path& path, KernelKind kind,
                                    const Grid& grid, const Background& bg);

}  // namespace iedd
