#include "iedd/operators.hpp"

#include <algorithm>
#include <cmath>

#include "iedd/error.hpp"

namespace iedd {

namespace {

std::size_t volume(const Index3& n) { return static_cast<std::size_t>(n[0] * n[1] * n[2]); }

// Scatter component `comp` of an interleaved box field into a zeroed padded array.
void embed(std::span<const cplx> field, int comp, const Index3& n, const Index3& P,
           SpectralArray& out) {
  std::fill(out.begin(), out.end(), cplx(0.0));
  std::size_t c = 0;
  for (std::int64_t k = 0; k < n[2]; ++k)
    for (std::int64_t j = 0; j < n[1]; ++j) {
      const std::size_t row = static_cast<std::size_t>(P[0] * (j + P[1] * k));
      for (std::int64_t i = 0; i < n[0]; ++i, ++c)
        out[row + static_cast<std::size_t>(i)] = field[3 * c + comp];
    }
}

// Gather a box of extent n starting at `shift` from a padded array into component `comp`.
void extract(const SpectralArray& in, int comp, const Index3& n, const Index3& P,
             const Index3& shift, std::span<cplx> field) {
  std::size_t c = 0;
  for (std::int64_t k = 0; k < n[2]; ++k)
    for (std::int64_t j = 0; j < n[1]; ++j) {
      const std::size_t row =
          static_cast<std::size_t>(shift[0] + P[0] * ((j + shift[1]) + P[1] * (k + shift[2])));
      for (std::int64_t i = 0; i < n[0]; ++i, ++c)
        field[3 * c + comp] = in[row + static_cast<std::size_t>(i)];
    }
}

}  // namespace

ComplexVectorField convolve(const GreenKernel& kernel, const ComplexVectorField& source) {
  const Grid& grid = source.grid();
  if (grid.counts() != kernel.counts() || !Grid(kernel.counts(), kernel.spacing()).same_spacing(grid))
    raise(ErrorCode::Dimension, "source lattice does not match the kernel lattice");

  const Index3 n = grid.counts();
  const Index3 P = kernel.padded_dims();
  const Fft3d fft(P);
  const std::size_t np = volume(P);

  std::array<SpectralArray, 3> S{SpectralArray(np), SpectralArray(np), SpectralArray(np)};
  for (int q = 0; q < 3; ++q) {
    embed(source.values(), q, n, P, S[q]);
    fft.forward(S[q]);
  }

  ComplexVectorField out(grid);
  SpectralArray acc(np);
  for (int p = 0; p < 3; ++p) {
    std::fill(acc.begin(), acc.end(), cplx(0.0));
    for (int q = 0; q < 3; ++q) {
      const GreenKernel::Component c = kernel.component(p, q);
      if (!c.spectrum) continue;
      const SpectralArray& G = *c.spectrum;
      if (c.sign == 1.0) {
        for (std::size_t k = 0; k < np; ++k) acc[k] += G[k] * S[q][k];
      } else {
        for (std::size_t k = 0; k < np; ++k) acc[k] += c.sign * G[k] * S[q][k];
      }
    }
    fft.inverse(acc);
    extract(acc, p, n, P, {0, 0, 0}, out.values());
  }
  return out;
}

ComplexVectorField contrast_source(std::span<const Tensor3x3> contrast, const AnomalyMask& mask,
                                   const ComplexVectorField& field) {
  const std::size_t n = field.cell_count();
  if (contrast.size() != n || mask.size() != n)
    raise(ErrorCode::Dimension, "contrast does not match the field lattice");
  ComplexVectorField J(field.grid());
  for (std::size_t c = 0; c < n; ++c)
    if (mask[c]) J.set(c, contrast[c].apply(field.vec(c)));
  return J;
}

// ---------------------------------------------------------- SystemOperator

SystemOperator::SystemOperator(std::shared_ptr<const GreenKernel> kernel, const Grid& grid,
                               ContrastField contrast)
    : kernel_(std::move(kernel)), grid_(grid), contrast_(std::move(contrast)) {
  if (!kernel_ || kernel_->kind() != KernelKind::Electric)
    raise(ErrorCode::InvalidParameter, "system operator needs an electric kernel");
  if (kernel_->counts() != grid_.counts() ||
      !Grid(kernel_->counts(), kernel_->spacing()).same_spacing(grid_))
    raise(ErrorCode::Dimension, "kernel lattice does not match the operator grid");
  if (contrast_.contrast.size() != grid_.cell_count() || contrast_.mask.size() != grid_.cell_count())
    raise(ErrorCode::Dimension, "contrast does not match the operator grid");
}

SystemOperator::SystemOperator(const ConductivityModel& model, const Background& bg,
                               double threshold)
    : SystemOperator(std::make_shared<const GreenKernel>(assemble_electric_kernel(model.grid(), bg)),
                     model.grid(), contrast_field(model, threshold)) {}

ComplexVectorField SystemOperator::scattered(const ComplexVectorField& E) const {
  if (E.grid().counts() != grid_.counts())
    raise(ErrorCode::Dimension, "field is not defined on the operator grid");
  return convolve(*kernel_, contrast_source(contrast_.contrast, contrast_.mask, E));
}

ComplexVectorField SystemOperator::apply(const ComplexVectorField& E) const {
  ComplexVectorField out = E;
  out -= scattered(E);
  return out;
}

void SystemOperator::project(std::span<cplx> values) const {
  const AnomalyMask& m = contrast_.mask;
  for (std::size_t c = 0; c < m.size(); ++c)
    if (!m[c]) values[3 * c] = values[3 * c + 1] = values[3 * c + 2] = cplx(0.0);
}

void SystemOperator::apply_masked(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != 3 * grid_.cell_count() || out.size() != in.size())
    raise(ErrorCode::Dimension, "vector length does not match the operator grid");
  ComplexVectorField x(grid_, std::vector<cplx>(in.begin(), in.end()));
  project(x.values());
  const ComplexVectorField s = scattered(x);
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = x.values()[k] - s.values()[k];
  project(out);
}

ComplexVectorField apply_system(const SystemOperator& op, const ComplexVectorField& E) {
  return op.apply(E);
}

double relative_residual(const SystemOperator& op, const ComplexVectorField& E,
                         const ComplexVectorField& E0) {
  if (E0.grid().counts() != op.grid().counts())
    raise(ErrorCode::Dimension, "E0 is not defined on the operator grid");
  const ComplexVectorField AE = op.apply(E);
  const AnomalyMask& mask = op.mask();
  const bool everywhere = !mask.any();
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (!everywhere && !mask[c]) continue;
    for (int p = 0; p < 3; ++p) {
      num += std::norm(E0.at(c, p) - AE.at(c, p));
      den += std::norm(E0.at(c, p));
    }
  }
  if (den == 0.0) raise(ErrorCode::UndefinedResidual, "relative residual undefined: |E0| = 0");
  return std::sqrt(num / den);
}

ComplexVectorField complete_field(const SystemOperator& op, const ComplexVectorField& E,
                                  const ComplexVectorField& E0) {
  if (E.grid().counts() != op.grid().counts() || E0.grid().counts() != op.grid().counts())
    raise(ErrorCode::Dimension, "fields are not defined on the operator grid");
  const ComplexVectorField s = op.scattered(E);
  ComplexVectorField out = E;
  const AnomalyMask& mask = op.mask();
  for (std::size_t c = 0; c < mask.size(); ++c)
    if (!mask[c])
      for (int p = 0; p < 3; ++p) out.at(c, p) = E0.at(c, p) + s.at(c, p);
  return out;
}

// ----------------------------------------------------------- ScatterKernel

ScatterKernel::ScatterKernel(const Grid& global, const IndexBox& target, const IndexBox& source,
                             const Background& bg)
    : target_counts_(target.extents()), source_counts_(source.extents()) {
  const IndexBox all = global.full_box();
  for (const IndexBox* b : {&target, &source})
    if (b->empty() || !all.contains(b->lo) ||
        !all.contains({b->hi[0] - 1, b->hi[1] - 1, b->hi[2] - 1}))
      raise(ErrorCode::UnsupportedLayout,
            "sub-domain " + b->to_string() + " is not a box inside the grid");

  Index3 dmin{};
  for (int a = 0; a < 3; ++a) {
    padded_[a] = target_counts_[a] + source_counts_[a];
    dmin[a] = target.lo[a] - (source.hi[a] - 1);
  }
  const std::size_t np = volume(padded_);
  for (SpectralArray& s : spectra_) s.assign(np, cplx(0.0));

  constexpr std::array<int, 6> entry{0, 4, 8, 1, 2, 5};  // xx yy zz xy xz yz
  std::size_t c = 0;
  for (std::int64_t k = 0; k < padded_[2]; ++k)
    for (std::int64_t j = 0; j < padded_[1]; ++j)
      for (std::int64_t i = 0; i < padded_[0]; ++i, ++c) {
        if (i == padded_[0] - 1 || j == padded_[1] - 1 || k == padded_[2] - 1) continue;
        const std::array<cplx, 9> G = kernel_sample(
            KernelKind::Electric, {dmin[0] + i, dmin[1] + j, dmin[2] + k}, global.spacing(), bg);
        for (int s = 0; s < 6; ++s) spectra_[s][c] = G[entry[s]];
      }
  const Fft3d fft(padded_);
  for (SpectralArray& s : spectra_) fft.forward(s);
}

void ScatterKernel::apply(std::span<const cplx> J, std::span<cplx> out) const {
  if (J.size() != 3 * volume(source_counts_) || out.size() != 3 * volume(target_counts_))
    raise(ErrorCode::UnsupportedLayout, "field does not match the scatter kernel boxes");
  const Fft3d fft(padded_);
  const std::size_t np = volume(padded_);
  std::array<SpectralArray, 3> S{SpectralArray(np), SpectralArray(np), SpectralArray(np)};
  for (int q = 0; q < 3; ++q) {
    embed(J, q, source_counts_, padded_, S[q]);
    fft.forward(S[q]);
  }
  const Index3 shift{source_counts_[0] - 1, source_counts_[1] - 1, source_counts_[2] - 1};
  SpectralArray acc(np);
  for (int p = 0; p < 3; ++p) {
    const SpectralArray& G0 = spectra_[Tensor3x3::slot(p, 0)];
    const SpectralArray& G1 = spectra_[Tensor3x3::slot(p, 1)];
    const SpectralArray& G2 = spectra_[Tensor3x3::slot(p, 2)];
    for (std::size_t k = 0; k < np; ++k) acc[k] = G0[k] * S[0][k] + G1[k] * S[1][k] + G2[k] * S[2][k];
    fft.inverse(acc);
    extract(acc, p, target_counts_, padded_, shift, out);
  }
}

ComplexVectorField cross_domain_scatter(const ScatterKernel& kernel_ij,
                                        std::span<const Tensor3x3> contrast_j,
                                        const AnomalyMask& mask_j, const ComplexVectorField& E_j,
                                        const Grid& target_grid) {
  if (E_j.grid().counts() != kernel_ij.source_counts())
    raise(ErrorCode::UnsupportedLayout, "source field does not span the source sub-domain");
  if (target_grid.counts() != kernel_ij.target_counts())
    raise(ErrorCode::UnsupportedLayout, "target grid does not span the target sub-domain");
  const ComplexVectorField J = contrast_source(contrast_j, mask_j, E_j);
  ComplexVectorField out(target_grid);
  kernel_ij.apply(J.values(), out.values());
  return out;
}

// -------------------------------------------------------- KernelRepository

std::shared_ptr<const GreenKernel> KernelRepository::electric(const Index3& counts,
                                                              const Vec3& spacing,
                                                              const Background& bg) {
  const Key key{counts, {0, 0, 0}, {0, 0, 0}, spacing, bg.sigma0, bg.omega};
  std::lock_guard lock(mutex_);
  auto it = electric_.find(key);
  if (it != electric_.end()) return it->second;
  auto K = std::make_shared<const GreenKernel>(
      assemble_kernel(KernelKind::Electric, counts, spacing, bg));
  electric_.emplace(key, K);
  return K;
}

std::shared_ptr<const ScatterKernel> KernelRepository::scatter(const Grid& global,
                                                               const IndexBox& target,
                                                               const IndexBox& source,
                                                               const Background& bg) {
  const Index3 rel{target.lo[0] - source.lo[0], target.lo[1] - source.lo[1],
                   target.lo[2] - source.lo[2]};
  const Key key{target.extents(), source.extents(), rel, global.spacing(), bg.sigma0, bg.omega};
  std::lock_guard lock(mutex_);
  auto it = scatter_.find(key);
  if (it != scatter_.end()) return it->second;
  auto K = std::make_shared<const ScatterKernel>(global, target, source, bg);
  scatter_.emplace(key, K);
  return K;
}

std::size_t KernelRepository::electric_count() const {
  std::lock_guard lock(mutex_);
  return electric_.size();
}

std::size_t KernelRepository::scatter_count() const {
  std::lock_guard lock(mutex_);
  return scatter_.size();
}

void KernelRepository::clear() {
  std::lock_guard lock(mutex_);
  electric_.clear();
  scatter_.clear();
}

}  // namespace iedd
