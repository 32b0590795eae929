#include "iedd/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iedd/error.hpp"

namespace iedd {

// ---------------------------------------------------------------- IndexBox

std::size_t IndexBox::cell_count() const {
  if (empty()) return 0;
  return static_cast<std::size_t>(extent(0) * extent(1) * extent(2));
}

bool IndexBox::empty() const {
  return extent(0) <= 0 || extent(1) <= 0 || extent(2) <= 0;
}

bool IndexBox::contains(const Index3& ijk) const {
  for (int a = 0; a < 3; ++a)
    if (ijk[a] < lo[a] || ijk[a] >= hi[a]) return false;
  return true;
}

bool IndexBox::overlaps(const IndexBox& other) const {
  for (int a = 0; a < 3; ++a)
    if (std::max(lo[a], other.lo[a]) >= std::min(hi[a], other.hi[a])) return false;
  return true;
}

std::string IndexBox::to_string() const {
  std::ostringstream os;
  os << "[" << lo[0] << "," << hi[0] << ")x[" << lo[1] << "," << hi[1] << ")x[" << lo[2]
     << "," << hi[2] << ")";
  return os.str();
}

// -------------------------------------------------------------------- Grid

Grid::Grid(Index3 counts, Vec3 spacing, Vec3 origin)
    : counts_(counts), spacing_(spacing), origin_(origin) {
  for (int a = 0; a < 3; ++a) {
    if (counts_[a] < 1) raise(ErrorCode::InvalidParameter, "grid cell counts must be >= 1");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      raise(ErrorCode::InvalidParameter, "grid spacing must be positive and finite");
    if (!std::isfinite(origin_[a])) raise(ErrorCode::InvalidParameter, "grid origin not finite");
  }
}

Index3 Grid::unravel(std::size_t c) const {
  const auto ci = static_cast<std::int64_t>(c);
  return {ci % counts_[0], (ci / counts_[0]) % counts_[1], ci / (counts_[0] * counts_[1])};
}

Grid Grid::sub_grid(const IndexBox& box) const {
  if (box.empty() || !full_box().contains(box.lo) ||
      !full_box().contains({box.hi[0] - 1, box.hi[1] - 1, box.hi[2] - 1}))
    raise(ErrorCode::Dimension, "box " + box.to_string() + " is not inside the grid");
  return Grid(box.extents(), spacing_, centroid(box.lo[0], box.lo[1], box.lo[2]));
}

Index3 Grid::nearest_cell(const Vec3& p, bool* clamped) const {
  Index3 ijk{};
  bool outside = false;
  for (int a = 0; a < 3; ++a) {
    const double t = (p[a] - origin_[a]) / spacing_[a];
    auto i = static_cast<std::int64_t>(std::floor(t + 0.5));
    // Points within half a cell of the outer face still belong to the lattice.
    if (t < -0.5 - 1e-9 || t > static_cast<double>(counts_[a]) - 0.5 + 1e-9) outside = true;
    ijk[a] = std::clamp<std::int64_t>(i, 0, counts_[a] - 1);
  }
  if (clamped) *clamped = outside;
  return ijk;
}

Vec3 Grid::lower_bound() const {
  return {origin_[0] - 0.5 * spacing_[0], origin_[1] - 0.5 * spacing_[1],
          origin_[2] - 0.5 * spacing_[2]};
}

Vec3 Grid::upper_bound() const {
  return {origin_[0] + (counts_[0] - 0.5) * spacing_[0],
          origin_[1] + (counts_[1] - 0.5) * spacing_[1],
          origin_[2] + (counts_[2] - 0.5) * spacing_[2]};
}

bool Grid::same_spacing(const Grid& other, double rel_tol) const {
  for (int a = 0; a < 3; ++a)
    if (std::abs(spacing_[a] - other.spacing_[a]) > rel_tol * spacing_[a]) return false;
  return true;
}

bool Grid::same_lattice(const Grid& other, double rel_tol) const {
  if (counts_ != other.counts_ || !same_spacing(other, rel_tol)) return false;
  for (int a = 0; a < 3; ++a)
    if (std::abs(origin_[a] - other.origin_[a]) > rel_tol * spacing_[a]) return false;
  return true;
}

// --------------------------------------------------------------- Tensor3x3

Tensor3x3 Tensor3x3::from_matrix(const std::array<std::array<double, 3>, 3>& m) {
  return {{m[0][0], m[1][1], m[2][2], 0.5 * (m[0][1] + m[1][0]), 0.5 * (m[0][2] + m[2][0]),
           0.5 * (m[1][2] + m[2][1])}};
}

std::array<std::array<double, 3>, 3> Tensor3x3::matrix() const {
  return {{{v[0], v[3], v[4]}, {v[3], v[1], v[5]}, {v[4], v[5], v[2]}}};
}

double Tensor3x3::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Tensor3x3 Tensor3x3::operator+(const Tensor3x3& o) const {
  Tensor3x3 r;
  for (int s = 0; s < 6; ++s) r.v[s] = v[s] + o.v[s];
  return r;
}

Tensor3x3 Tensor3x3::operator-(const Tensor3x3& o) const {
  Tensor3x3 r;
  for (int s = 0; s < 6; ++s) r.v[s] = v[s] - o.v[s];
  return r;
}

Tensor3x3 Tensor3x3::operator*(double s) const {
  Tensor3x3 r;
  for (int k = 0; k < 6; ++k) r.v[k] = v[k] * s;
  return r;
}

Tensor3x3 Tensor3x3::to_frame(const std::array<Vec3, 3>& axes) const {
  // T'_ab = axes[a] · T · axes[b]
  const auto m = matrix();
  std::array<std::array<double, 3>, 3> out{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) s += axes[a][p] * m[p][q] * axes[b][q];
      out[a][b] = s;
    }
  return from_matrix(out);
}

Tensor3x3 Tensor3x3::from_frame(const std::array<Vec3, 3>& axes) const {
  // T_pq = Σ_ab axes[a][p] T'_ab axes[b][q]
  const auto m = matrix();
  std::array<std::array<double, 3>, 3> out{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += axes[a][p] * m[a][b] * axes[b][q];
      out[p][q] = s;
    }
  return from_matrix(out);
}

std::array<double, 3> Tensor3x3::eigenvalues() const {
  auto a = matrix();
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off < 1e-300) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
  std::sort(ev.begin(), ev.end());
  return ev;
}

// ------------------------------------------------------------- AnomalyMask

std::size_t AnomalyMask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true));
}

// ------------------------------------------------------- ConductivityModel

ConductivityModel::ConductivityModel(Grid grid, double sigma0)
    : ConductivityModel(grid, std::vector<Tensor3x3>(grid.cell_count(),
                                                     Tensor3x3::isotropic(sigma0)),
                        sigma0) {}

ConductivityModel::ConductivityModel(Grid grid, std::vector<Tensor3x3> tensors, double sigma0)
    : grid_(std::move(grid)), tensors_(std::move(tensors)), sigma0_(sigma0) {
  if (!(sigma0_ > 0.0) || !std::isfinite(sigma0_))
    raise(ErrorCode::InvalidParameter, "background conductivity must be positive");
  if (tensors_.size() != grid_.cell_count())
    raise(ErrorCode::Dimension, "tensor count does not match the grid cell count");
}

Tensor3x3 ConductivityModel::sample(const Vec3& p, bool* clamped) const {
  return tensors_[grid_.linear(grid_.nearest_cell(p, clamped))];
}

ContrastField contrast_field(const ConductivityModel& model, double threshold) {
  const std::size_t n = model.grid().cell_count();
  ContrastField out{std::vector<Tensor3x3>(n), AnomalyMask(n, false)};
  const Tensor3x3 background = Tensor3x3::isotropic(model.sigma0());
  for (std::size_t c = 0; c < n; ++c) {
    out.contrast[c] = model.tensor(c) - background;
    out.mask.set(c, out.contrast[c].max_abs() > threshold);
  }
  return out;
}

Tensor3x3 rotate_vti_tensor(double sigma_h, double sigma_v, double theta, double phi) {
  if (!(sigma_h > 0.0) || !(sigma_v > 0.0))
    raise(ErrorCode::InvalidParameter, "VTI conductivities must be positive");
  const double d = sigma_v - sigma_h;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  Tensor3x3 t;
  t.v[0] = sigma_h + d * st * st * cp * cp;  // xx
  t.v[1] = sigma_h + d * st * st * sp * sp;  // yy
  t.v[2] = sigma_v - d * st * st;            // zz
  t.v[3] = d * st * st * sp * cp;            // xy
  t.v[4] = d * st * ct * cp;                 // xz
  t.v[5] = d * st * ct * sp;                 // yz
  return t;
}

ConductivityModel apply_exponential_perturbation(const ConductivityModel& model,
                                                 const AnomalyMask& mask, const Vec3& r_c,
                                                 double alpha, double gamma) {
  if (!(gamma > 0.0)) raise(ErrorCode::InvalidParameter, "perturbation range must be > 0");
  if (mask.size() != model.grid().cell_count())
    raise(ErrorCode::Dimension, "mask size does not match the model grid");
  ConductivityModel out = model;
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (!mask[c]) continue;
    const double r = norm(model.grid().centroid(c) - r_c);
    out.set_tensor(c, model.tensor(c) * (1.0 + alpha * std::exp(-r / gamma)));
  }
  return out;
}

ConductivityModel rasterize(const Grid& grid, double sigma0,
                            const std::function<Tensor3x3(const Vec3&)>& sigma_at) {
  std::vector<Tensor3x3> tensors(grid.cell_count());
  for (std::size_t c = 0; c < tensors.size(); ++c) tensors[c] = sigma_at(grid.centroid(c));
  return ConductivityModel(grid, std::move(tensors), sigma0);
}

}  // namespace iedd
