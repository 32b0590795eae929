#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "iedd/grid.hpp"
#include "iedd/types.hpp"

namespace iedd {

// One complex 3-vector per cell of a grid, stored interleaved as
// (x, y, z) per cell in x-fastest cell order.
class ComplexVectorField {
 public:
  ComplexVectorField() = default;
  explicit ComplexVectorField(Grid grid);
  ComplexVectorField(Grid grid, std::vector<cplx> values);

  const Grid& grid() const { return grid_; }
  std::size_t cell_count() const { return grid_.cell_count(); }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  std::vector<cplx>& storage() { return values_; }
  const std::vector<cplx>& storage() const { return values_; }

  cplx& at(std::size_t cell, int comp) { return values_[3 * cell + comp]; }
  cplx at(std::size_t cell, int comp) const { return values_[3 * cell + comp]; }
  CVec3 vec(std::size_t cell) const {
    return {values_[3 * cell], values_[3 * cell + 1], values_[3 * cell + 2]};
  }
  void set(std::size_t cell, const CVec3& v) {
    values_[3 * cell] = v[0];
    values_[3 * cell + 1] = v[1];
    values_[3 * cell + 2] = v[2];
  }

  double norm() const;
  bool all_finite() const;

  ComplexVectorField& operator+=(const ComplexVectorField& o);
  ComplexVectorField& operator-=(const ComplexVectorField& o);
  ComplexVectorField& operator*=(cplx s);

  // Copy of the cells inside `box` as a field on grid.sub_grid(box).
  ComplexVectorField restrict_to(const IndexBox& box) const;
  // Overwrite the cells of `box` with `part` (defined on grid.sub_grid(box)).
  void assign_box(const IndexBox& box, const ComplexVectorField& part);

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

ComplexVectorField operator+(ComplexVectorField a, const ComplexVectorField& b);
ComplexVectorField operator-(ComplexVectorField a, const ComplexVectorField& b);

double relative_l2_difference(std::span<const cplx> a, std::span<const cplx> reference);

// Little-endian field export: the grid header of write_model_binary followed by
// 6 float64 per cell (re/im of x, y, z), x-fastest.
void write_field_binary(const ComplexVectorField& field, const std::filesystem::path& path);
ComplexVectorField read_field_binary(const std::filesystem::path& path);

}  // namespace iedd
