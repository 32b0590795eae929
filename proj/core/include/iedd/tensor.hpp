#pragma once

#include <array>

#include "iedd/types.hpp"

namespace iedd {

// Symmetric 3x3 real tensor in S/m, stored as (xx, yy, zz, xy, xz, yz).
struct Tensor3x3 {
  std::array<double, 6> v{0, 0, 0, 0, 0, 0};

  static Tensor3x3 diagonal(double xx, double yy, double zz) {
    return {{xx, yy, zz, 0.0, 0.0, 0.0}};
  }
  static Tensor3x3 isotropic(double s) { return diagonal(s, s, s); }
  // Symmetric part of a full matrix.
  static Tensor3x3 from_matrix(const std::array<std::array<double, 3>, 3>& m);

  double xx() const { return v[0]; }
  double yy() const { return v[1]; }
  double zz() const { return v[2]; }
  double xy() const { return v[3]; }
  double xz() const { return v[4]; }
  double yz() const { return v[5]; }

  double operator()(int p, int q) const { return v[slot(p, q)]; }

  std::array<std::array<double, 3>, 3> matrix() const;
  double trace() const { return v[0] + v[1] + v[2]; }
  double max_abs() const;

  Tensor3x3 operator+(const Tensor3x3& o) const;
  Tensor3x3 operator-(const Tensor3x3& o) const;
  Tensor3x3 operator*(double s) const;

  CVec3 apply(const CVec3& e) const {
    return {v[0] * e[0] + v[3] * e[1] + v[4] * e[2],
            v[3] * e[0] + v[1] * e[1] + v[5] * e[2],
            v[4] * e[0] + v[5] * e[1] + v[2] * e[2]};
  }

  // Qᵀ·T·Q where the columns of Q are the new axes in the old frame.
  Tensor3x3 to_frame(const std::array<Vec3, 3>& axes) const;
  // Inverse of to_frame: Q·T·Qᵀ.
  Tensor3x3 from_frame(const std::array<Vec3, 3>& axes) const;

  // Sorted eigenvalues (symmetric Jacobi iteration).
  std::array<double, 3> eigenvalues() const;

  static constexpr int slot(int p, int q) {
    if (p == q) return p;
    const int s = p + q;  // 1 -> xy, 2 -> xz, 3 -> yz
    return 2 + s;
  }
};

}  // namespace iedd
