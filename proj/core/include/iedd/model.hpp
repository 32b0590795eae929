#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "iedd/grid.hpp"
#include "iedd/tensor.hpp"

namespace iedd {

inline constexpr double kDefaultAnomalyThreshold = 1e-12;  // S/m

// Anything that can report a conductivity tensor at a point in space.
class ConductivitySampler {
 public:
  virtual ~ConductivitySampler() = default;
  // `clamped` is set when the point lies outside the sampler's support and the
  // value had to be taken from the nearest boundary.
  virtual Tensor3x3 sample(const Vec3& p, bool* clamped = nullptr) const = 0;
};

// Boolean per cell; true where the conductivity contrast is non-negligible.
class AnomalyMask {
 public:
  AnomalyMask() = default;
  explicit AnomalyMask(std::vector<bool> flags) : flags_(std::move(flags)) {}
  AnomalyMask(std::size_t n, bool value) : flags_(n, value) {}

  std::size_t size() const { return flags_.size(); }
  bool operator[](std::size_t c) const { return flags_[c]; }
  void set(std::size_t c, bool value) { flags_[c] = value; }
  std::size_t count() const;
  bool any() const { return count() > 0; }

 private:
  std::vector<bool> flags_;
};

class ConductivityModel final : public ConductivitySampler {
 public:
  ConductivityModel(Grid grid, double sigma0);
  ConductivityModel(Grid grid, std::vector<Tensor3x3> tensors, double sigma0);

  const Grid& grid() const { return grid_; }
  double sigma0() const { return sigma0_; }
  const std::vector<Tensor3x3>& tensors() const { return tensors_; }
  const Tensor3x3& tensor(std::size_t c) const { return tensors_[c]; }
  void set_tensor(std::size_t c, const Tensor3x3& t) { tensors_[c] = t; }

  // Nearest-cell lookup; points outside the lattice take the boundary value.
  Tensor3x3 sample(const Vec3& p, bool* clamped = nullptr) const override;

 private:
  Grid grid_;
  std::vector<Tensor3x3> tensors_;
  double sigma0_;
};

struct ContrastField {
  std::vector<Tensor3x3> contrast;
  AnomalyMask mask;
};

// Δσ = σ − σ₀·I per cell and the mask of cells whose contrast exceeds `threshold`.
ContrastField contrast_field(const ConductivityModel& model,
                             double threshold = kDefaultAnomalyThreshold);

// Formation-to-tool rotation of a VTI tensor diag(σh, σh, σv); θ and φ are the
// polar and azimuthal angles of the formation's symmetry axis seen from the
// tool frame.
Tensor3x3 rotate_vti_tensor(double sigma_h, double sigma_v, double theta, double phi);

// σ ← σ + α·σ·exp(−|r − r_c| / γ) on masked cells, componentwise.
ConductivityModel apply_exponential_perturbation(const ConductivityModel& model,
                                                 const AnomalyMask& mask,
                                                 const Vec3& r_c, double alpha,
                                                 double gamma);

// Rasterize a point-wise conductivity description by centroid membership.
ConductivityModel rasterize(const Grid& grid, double sigma0,
                            const std::function<Tensor3x3(const Vec3&)>& sigma_at);

// Flat little-endian export: int64 nx,ny,nz; float64 dx,dy,dz, ox,oy,oz;
// then 6 float64 per cell (xx,yy,zz,xy,xz,yz), x-fastest.
void write_model_binary(const ConductivityModel& model, const std::filesystem::path& path);
ConductivityModel read_model_binary(const std::filesystem::path& path, double sigma0);

}  // namespace iedd
