#include "iedd/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iedd/error.hpp"

namespace iedd {

void DipoleSource::validate() const {
  if (!(frequency > 0.0)) raise(ErrorCode::InvalidParameter, "source frequency must be positive");
  if (!(norm(moment) > 0.0)) raise(ErrorCode::InvalidParameter, "source moment must be nonzero");
}

namespace {

CVec3 cross_m(const CVec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

CVec3 dipole_E(const Vec3& d, const Vec3& m, const Background& bg) {
  const CVec3 grad = green_gradient(d, bg);
  const CVec3 c = cross_m(grad, m);
  const cplx f = bg.i_omega_mu();
  return {f * c[0], f * c[1], f * c[2]};
}

CVec3 dipole_H(const Vec3& d, const Vec3& m, const Background& bg) {
  const std::array<cplx, 9> hess = green_hessian(d, bg);
  const cplx k = bg.k0();
  const cplx g = std::exp(cplx(0.0, 1.0) * k * norm(d)) / (4.0 * std::numbers::pi * norm(d));
  CVec3 h{};
  for (int p = 0; p < 3; ++p) {
    h[p] = k * k * g * m[p];
    for (int q = 0; q < 3; ++q) h[p] += hess[3 * p + q] * m[q];
  }
  return h;
}

Vec3 separation(const Vec3& r, const DipoleSource& src) {
  const Vec3 d = r - src.position;
  if (norm(d) == 0.0) raise(ErrorCode::Singularity, "field point coincides with the source");
  return d;
}

}  // namespace

std::vector<CVec3> background_E(const DipoleSource& src, std::span<const Vec3> points,
                                const Background& bg) {
  src.validate();
  std::vector<CVec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(dipole_E(separation(p, src), src.moment, bg));
  return out;
}

std::vector<CVec3> background_H(const DipoleSource& src, std::span<const Vec3> points,
                                const Background& bg) {
  src.validate();
  std::vector<CVec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(dipole_H(separation(p, src), src.moment, bg));
  return out;
}

ComplexVectorField background_E_on_grid(const DipoleSource& src, const Grid& grid,
                                        const Background& bg) {
  src.validate();
  ComplexVectorField E(grid);
  const double hmin = std::min({grid.h(0), grid.h(1), grid.h(2)});
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Vec3 d = grid.centroid(c) - src.position;
    if (norm(d) > 1e-9 * hmin) {
      E.set(c, dipole_E(d, src.moment, bg));
      continue;
    }
    CVec3 avg{};
    for (int a = 0; a < 3; ++a)
      for (double s : {-1.0, 1.0}) {
        Vec3 n = d;
        n[a] += s * grid.h(a);
        const CVec3 v = dipole_E(n, src.moment, bg);
        for (int p = 0; p < 3; ++p) avg[p] += v[p] / 6.0;
      }
    E.set(c, avg);
  }
  return E;
}

std::vector<CVec3> receiver_H(const ComplexVectorField& E, const ContrastField& contrast,
                              std::span<const Receiver> receivers, const DipoleSource& src,
                              const Background& bg, ReceiverPlacement placement) {
  const Grid& grid = E.grid();
  if (contrast.contrast.size() != grid.cell_count() || contrast.mask.size() != grid.cell_count())
    raise(ErrorCode::Dimension, "contrast does not match the field grid");
  const double hmin = std::min({grid.h(0), grid.h(1), grid.h(2)});
  const double dv = grid.cell_volume();

  std::vector<CVec3> out;
  out.reserve(receivers.size());
  for (const Receiver& rx : receivers) {
    const Vec3 d0 = separation(rx.position, src);
    CVec3 h = dipole_H(d0, src.moment, bg);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      if (!contrast.mask[c]) continue;
      const Vec3 d = rx.position - grid.centroid(c);
      const double dist = norm(d);
      if (dist < hmin * (1.0 - 1e-9)) {
        if (placement == ReceiverPlacement::Strict)
          raise(ErrorCode::Placement,
                "receiver '" + rx.id + "' is closer than one cell to an anomalous cell");
        if (dist <= 1e-9 * hmin) continue;
      }
      const std::array<cplx, 9> G = magnetic_green_tensor(d, bg);
      const CVec3 J = contrast.contrast[c].apply(E.vec(c));
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) h[p] += G[3 * p + q] * J[q] * dv;
    }
    out.push_back(h);
  }
  return out;
}

}  // namespace iedd
