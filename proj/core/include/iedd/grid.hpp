#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "iedd/types.hpp"

namespace iedd {

using Index3 = std::array<std::int64_t, 3>;

// Half-open index box [lo, hi) on a global lattice.
struct IndexBox {
  Index3 lo{0, 0, 0};
  Index3 hi{0, 0, 0};

  std::int64_t extent(int axis) const { return hi[axis] - lo[axis]; }
  Index3 extents() const { return {extent(0), extent(1), extent(2)}; }
  std::size_t cell_count() const;
  bool empty() const;
  bool contains(const Index3& ijk) const;
  bool overlaps(const IndexBox& other) const;
  std::string to_string() const;

  friend bool operator==(const IndexBox&, const IndexBox&) = default;
};

// Regular lattice of uniform cells. Cell (i,j,k) has its centroid at
// origin + (i*dx, j*dy, k*dz); storage order is x-fastest.
class Grid {
 public:
  Grid() = default;
  Grid(Index3 counts, Vec3 spacing, Vec3 origin = {0.0, 0.0, 0.0});

  const Index3& counts() const { return counts_; }
  std::int64_t n(int axis) const { return counts_[axis]; }
  const Vec3& spacing() const { return spacing_; }
  double h(int axis) const { return spacing_[axis]; }
  const Vec3& origin() const { return origin_; }

  std::size_t cell_count() const {
    return static_cast<std::size_t>(counts_[0] * counts_[1] * counts_[2]);
  }
  double cell_volume() const { return spacing_[0] * spacing_[1] * spacing_[2]; }

  std::size_t linear(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return static_cast<std::size_t>(i + counts_[0] * (j + counts_[1] * k));
  }
  std::size_t linear(const Index3& ijk) const { return linear(ijk[0], ijk[1], ijk[2]); }
  Index3 unravel(std::size_t c) const;

  Vec3 centroid(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return {origin_[0] + i * spacing_[0], origin_[1] + j * spacing_[1],
            origin_[2] + k * spacing_[2]};
  }
  Vec3 centroid(std::size_t c) const {
    const Index3 ijk = unravel(c);
    return centroid(ijk[0], ijk[1], ijk[2]);
  }

  IndexBox full_box() const { return {{0, 0, 0}, counts_}; }
  // Lattice restricted to `box`, sharing spacing and global centroid positions.
  Grid sub_grid(const IndexBox& box) const;
  // Nearest cell index of an arbitrary point, clamped into the lattice.
  Index3 nearest_cell(const Vec3& p, bool* clamped = nullptr) const;
  // Lower / upper physical bounds (cell faces).
  Vec3 lower_bound() const;
  Vec3 upper_bound() const;

  bool same_lattice(const Grid& other, double rel_tol = 1e-12) const;
  bool same_spacing(const Grid& other, double rel_tol = 1e-12) const;

 private:
  Index3 counts_{1, 1, 1};
  Vec3 spacing_{1.0, 1.0, 1.0};
  Vec3 origin_{0.0, 0.0, 0.0};
};

}  // namespace iedd
