#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

#include "iedd/field.hpp"
#include "iedd/greens.hpp"
#include "iedd/model.hpp"

namespace iedd {

// Σ_q 𝒢_pq(source_q) on the source's lattice through the zero-padded FFT.
ComplexVectorField convolve(const GreenKernel& kernel, const ComplexVectorField& source);

// Δσ·E on mask-true cells, zero elsewhere.
ComplexVectorField contrast_source(std::span<const Tensor3x3> contrast, const AnomalyMask& mask,
                                   const ComplexVectorField& field);

// The discretized operator (I − 𝒢Δσ) on one lattice.
class SystemOperator {
 public:
  SystemOperator(std::shared_ptr<const GreenKernel> kernel, const Grid& grid,
                 ContrastField contrast);
  // Assembles the electric kernel for the model's grid.
  SystemOperator(const ConductivityModel& model, const Background& bg,
                 double threshold = kDefaultAnomalyThreshold);

  const Grid& grid() const { return grid_; }
  const GreenKernel& kernel() const { return *kernel_; }
  std::shared_ptr<const GreenKernel> kernel_ptr() const { return kernel_; }
  const ContrastField& contrast() const { return contrast_; }
  const AnomalyMask& mask() const { return contrast_.mask; }

  // 𝒢ΔσE.
  ComplexVectorField scattered(const ComplexVectorField& E) const;
  // E − 𝒢ΔσE.
  ComplexVectorField apply(const ComplexVectorField& E) const;
  // P(I − 𝒢Δσ)P with P the projection onto mask-true cells, on raw storage.
  void apply_masked(std::span<const cplx> in, std::span<cplx> out) const;
  // Zero every entry outside the mask.
  void project(std::span<cplx> values) const;

 private:
  std::shared_ptr<const GreenKernel> kernel_;
  Grid grid_;
  ContrastField contrast_;
};

ComplexVectorField apply_system(const SystemOperator& op, const ComplexVectorField& E);

// ‖E0 − (I − 𝒢Δσ)E‖ / ‖E0‖ with both norms over the mask-true cells (over the
// whole grid when the mask is empty). Throws UndefinedResidual when ‖E0‖ = 0.
double relative_residual(const SystemOperator& op, const ComplexVectorField& E,
                         const ComplexVectorField& E0);

// E unchanged on mask-true cells, E⁽⁰⁾ + 𝒢ΔσE on every other cell.
ComplexVectorField complete_field(const SystemOperator& op, const ComplexVectorField& E,
                                  const ComplexVectorField& E0);

// Electric kernel between a source box Ω_j and a target box Ω_i of one global
// lattice, embedded in a (n_i + n_j)-periodic array per axis so a single
// zero-padded FFT product yields the field on Ω_i.
class ScatterKernel {
 public:
  ScatterKernel(const Grid& global, const IndexBox& target, const IndexBox& source,
                const Background& bg);

  const Index3& target_counts() const { return target_counts_; }
  const Index3& source_counts() const { return source_counts_; }
  const Index3& padded_dims() const { return padded_; }

  // Field on the target box due to a contrast source J on the source box.
  // Source and result are box-local fields (x-fastest over the box).
  void apply(std::span<const cplx> contrast_source, std::span<cplx> out) const;

 private:
  Index3 target_counts_;
  Index3 source_counts_;
  Index3 padded_;
  std::array<SpectralArray, 6> spectra_;
};

// Scattered field on Ω_i due to the contrast sources Δσ^{(j)}E^{(j)} in Ω_j.
// `contrast_j` and `mask_j` are box-local to Ω_j, `E_j` lives on the Ω_j
// sub-grid and `target_grid` is the Ω_i sub-grid.
ComplexVectorField cross_domain_scatter(const ScatterKernel& kernel_ij,
                                        std::span<const Tensor3x3> contrast_j,
                                        const AnomalyMask& mask_j,
                                        const ComplexVectorField& E_j, const Grid& target_grid);

// Kernel storage shared across solves with identical geometry. Scatter kernels
// are keyed by their offset signature (box extents and relative position), so
// repeated box pairs reuse one padded spectrum set.
class KernelRepository {
 public:
  std::shared_ptr<const GreenKernel> electric(const Index3& counts, const Vec3& spacing,
                                              const Background& bg);
  std::shared_ptr<const ScatterKernel> scatter(const Grid& global, const IndexBox& target,
                                               const IndexBox& source, const Background& bg);

  std::size_t electric_count() const;
  std::size_t scatter_count() const;
  void clear();

 private:
  using Key = std::tuple<Index3, Index3, Index3, Vec3, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const GreenKernel>> electric_;
  std::map<Key, std::shared_ptr<const ScatterKernel>> scatter_;
};

}  // namespace iedd
