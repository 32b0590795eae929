#include "oracle.hpp"

#include <cmath>
#include <numbers>

#include "iedd/error.hpp"

namespace iedd::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) raise(ErrorCode::Size, "oracle grid exceeds the cell cap");
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

cplx wavenumber(const Background& bg) {
  return std::sqrt(bg.omega * kMu0 * bg.sigma0 / 2.0) * cplx(1.0, 1.0);
}

Tensor electric_tensor(const Vec3& d, const Background& bg) {
  const Eigen::Vector3d r(d[0], d[1], d[2]);
  const double R = r.norm();
  const Eigen::Vector3d u = r / R;
  const cplx k = wavenumber(bg);
  const cplx g = std::exp(I * k * R) / (4.0 * kPi * R);
  const Tensor uu = (u * u.transpose()).cast<cplx>();
  const Tensor id = Tensor::Identity();
  const Tensor hess = g / (R * R) * ((3.0 - 3.0 * I * k * R - k * k * R * R) * uu - (1.0 - I * k * R) * id);
  return I * bg.omega * kMu0 * g * id + hess / bg.sigma0;
}

Tensor magnetic_tensor(const Vec3& d, const Background& bg) {
  const Eigen::Vector3d r(d[0], d[1], d[2]);
  const double R = r.norm();
  const cplx k = wavenumber(bg);
  const cplx g = std::exp(I * k * R) / (4.0 * kPi * R);
  const Eigen::Vector3cd a = (g * (I * k - 1.0 / R) / R) * r.cast<cplx>();
  Tensor m;
  m << 0.0, -a(2), a(1), a(2), 0.0, -a(0), -a(1), a(0), 0.0;
  return m;
}

cplx electric_self(double cell_volume, const Background& bg) {
  const double a = std::cbrt(3.0 * cell_volume / (4.0 * kPi));
  const cplx ika = I * wavenumber(bg) * a;
  return ((2.0 / 3.0) * (1.0 - ika) * std::exp(ika) - 1.0) / bg.sigma0;
}

cplx electric_self_quadrature(double cell_volume, const Background& bg, int nr) {
  const double a = std::cbrt(3.0 * cell_volume / (4.0 * kPi));
  const double eps = 1e-6 * a;
  std::vector<double> xr, wr, xt, wt;
  gauss_legendre(nr, xr, wr);
  gauss_legendre(16, xt, wt);
  const int nphi = 16;
  // Radial nodes in log r to resolve the 1/r behaviour near ε.
  const double l0 = std::log(eps), l1 = std::log(a);
  cplx sum = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = std::exp(0.5 * (l1 - l0) * xr[i] + 0.5 * (l1 + l0));
    const double wr_i = 0.5 * (l1 - l0) * wr[i] * r;  // dr = r dl
    for (int j = 0; j < 16; ++j) {
      const double ct = xt[j], st = std::sqrt(1.0 - ct * ct);
      for (int m = 0; m < nphi; ++m) {
        const double phi = 2.0 * kPi * (m + 0.5) / nphi;
        const Vec3 d{r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
        sum += electric_tensor(d, bg)(0, 0) * (wr_i * r * r * wt[j] * (2.0 * kPi / nphi));
      }
    }
  }
  return sum - 1.0 / (3.0 * bg.sigma0);
}

Tensor cell_kernel(KernelKind kind, const Vec3& d, const Vec3& spacing, const Background& bg) {
  const double dv = spacing[0] * spacing[1] * spacing[2];
  if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0)
    return kind == KernelKind::Electric ? Tensor(electric_self(dv, bg) * Tensor::Identity())
                                        : Tensor(Tensor::Zero());
  return (kind == KernelKind::Electric ? electric_tensor(d, bg) : magnetic_tensor(d, bg)) * dv;
}

namespace {

Vec3 offset(const Grid& g, const Index3& a, const Index3& b) {
  return {(a[0] - b[0]) * g.h(0), (a[1] - b[1]) * g.h(1), (a[2] - b[2]) * g.h(2)};
}

Eigen::Matrix3d dense_tensor(const Tensor3x3& t) {
  Eigen::Matrix3d m;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) m(p, q) = t(p, q);
  return m;
}

}  // namespace

Matrix dense_assemble(const Grid& grid, const Background& bg, const ContrastField& contrast,
                      std::size_t cap) {
  const std::size_t n = grid.cell_count();
  check_cap(n, cap);
  const auto N = static_cast<Eigen::Index>(3 * n);
  Matrix A = Matrix::Identity(N, N);
  for (std::size_t cs = 0; cs < n; ++cs) {
    if (!contrast.mask[cs]) continue;
    const Eigen::Matrix3cd ds = dense_tensor(contrast.contrast[cs]).cast<cplx>();
    for (std::size_t ct = 0; ct < n; ++ct) {
      const Tensor G = cell_kernel(KernelKind::Electric,
                                   offset(grid, grid.unravel(ct), grid.unravel(cs)),
                                   grid.spacing(), bg);
      A.block<3, 3>(3 * static_cast<Eigen::Index>(ct), 3 * static_cast<Eigen::Index>(cs)) -= G * ds;
    }
  }
  return A;
}

Vector direct_convolve(const Grid& grid, const Background& bg, KernelKind kind,
                       const Vector& source, std::size_t cap) {
  const std::size_t n = grid.cell_count();
  check_cap(n, cap);
  if (static_cast<std::size_t>(source.size()) != 3 * n)
    raise(ErrorCode::Dimension, "source length mismatch");
  Vector out = Vector::Zero(source.size());
  for (std::size_t ct = 0; ct < n; ++ct)
    for (std::size_t cs = 0; cs < n; ++cs) {
      const Tensor G =
          cell_kernel(kind, offset(grid, grid.unravel(ct), grid.unravel(cs)), grid.spacing(), bg);
      out.segment<3>(3 * static_cast<Eigen::Index>(ct)) +=
          G * source.segment<3>(3 * static_cast<Eigen::Index>(cs));
    }
  return out;
}

Vector direct_scatter(const Grid& global, const IndexBox& target, const IndexBox& source,
                      const Background& bg, const Vector& J) {
  const Grid tg = global.sub_grid(target), sg = global.sub_grid(source);
  if (static_cast<std::size_t>(J.size()) != 3 * sg.cell_count())
    raise(ErrorCode::Dimension, "source length mismatch");
  Vector out = Vector::Zero(static_cast<Eigen::Index>(3 * tg.cell_count()));
  for (std::size_t a = 0; a < tg.cell_count(); ++a) {
    const Index3 ia = tg.unravel(a);
    const Index3 ga{ia[0] + target.lo[0], ia[1] + target.lo[1], ia[2] + target.lo[2]};
    for (std::size_t b = 0; b < sg.cell_count(); ++b) {
      const Index3 ib = sg.unravel(b);
      const Index3 gb{ib[0] + source.lo[0], ib[1] + source.lo[1], ib[2] + source.lo[2]};
      const Tensor G = cell_kernel(KernelKind::Electric, offset(global, ga, gb), global.spacing(), bg);
      out.segment<3>(3 * static_cast<Eigen::Index>(a)) +=
          G * J.segment<3>(3 * static_cast<Eigen::Index>(b));
    }
  }
  return out;
}

Vector dense_solve(const Matrix& A, const Vector& b) {
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) raise(ErrorCode::Singularity, "dense matrix is singular");
  return lu.solve(b);
}

std::vector<Eigen::Index> box_dofs(const Grid& grid, const IndexBox& box) {
  std::vector<Eigen::Index> out;
  for (std::int64_t k = box.lo[2]; k < box.hi[2]; ++k)
    for (std::int64_t j = box.lo[1]; j < box.hi[1]; ++j)
      for (std::int64_t i = box.lo[0]; i < box.hi[0]; ++i)
        for (int p = 0; p < 3; ++p)
          out.push_back(static_cast<Eigen::Index>(3 * grid.linear(i, j, k) + p));
  return out;
}

Matrix submatrix(const Matrix& A, const std::vector<Eigen::Index>& rows,
                 const std::vector<Eigen::Index>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = A(rows[r], cols[c]);
  return out;
}

std::vector<Vector> dense_gs_step(const Blocks& A, const std::vector<Vector>& E0,
                                  const std::vector<Vector>& E) {
  const std::size_t M = A.size();
  std::vector<Vector> out = E;
  for (std::size_t i = 0; i < M; ++i) {
    Vector rhs = E0[i];
    for (std::size_t j = 0; j < M; ++j)
      if (j != i) rhs -= A[i][j] * out[j];  // out[j] is new for j < i, old for j > i
    out[i] = dense_solve(A[i][i], rhs);
  }
  return out;
}

namespace {

std::vector<Eigen::Index> offsets(const Blocks& A) {
  std::vector<Eigen::Index> off{0};
  for (const auto& row : A) off.push_back(off.back() + row.front().rows());
  return off;
}

}  // namespace

std::vector<Vector> explicit_gs_step(const Blocks& A, const std::vector<Vector>& E0,
                                     const std::vector<Vector>& E) {
  const std::size_t M = A.size();
  const std::vector<Eigen::Index> off = offsets(A);
  Matrix DL = Matrix::Zero(off.back(), off.back());
  Vector rhs(off.back());
  for (std::size_t i = 0; i < M; ++i) {
    rhs.segment(off[i], off[i + 1] - off[i]) = E0[i];
    for (std::size_t j = 0; j < M; ++j) {
      if (j <= i)
        DL.block(off[i], off[j], A[i][j].rows(), A[i][j].cols()) = A[i][j];
      else
        rhs.segment(off[i], off[i + 1] - off[i]) -= A[i][j] * E[j];
    }
  }
  const Vector x = dense_solve(DL, rhs);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < M; ++i) out.push_back(x.segment(off[i], off[i + 1] - off[i]));
  return out;
}

Vector joint_solve(const Blocks& A, const std::vector<Vector>& E0) {
  const std::size_t M = A.size();
  const std::vector<Eigen::Index> off = offsets(A);
  Matrix full(off.back(), off.back());
  Vector rhs(off.back());
  for (std::size_t i = 0; i < M; ++i) {
    rhs.segment(off[i], off[i + 1] - off[i]) = E0[i];
    for (std::size_t j = 0; j < M; ++j)
      full.block(off[i], off[j], A[i][j].rows(), A[i][j].cols()) = A[i][j];
  }
  return dense_solve(full, rhs);
}

Vector to_vector(std::span<const cplx> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = v[k];
  return out;
}

std::vector<cplx> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

double relative_l2(const Vector& a, const Vector& ref) { return (a - ref).norm() / ref.norm(); }

}  // namespace iedd::oracle
