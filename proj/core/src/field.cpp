#include "iedd/field.hpp"

#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "iedd/error.hpp"

namespace iedd {

ComplexVectorField::ComplexVectorField(Grid grid)
    : grid_(std::move(grid)), values_(3 * grid_.cell_count(), cplx(0.0, 0.0)) {}

ComplexVectorField::ComplexVectorField(Grid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != 3 * grid_.cell_count())
    raise(ErrorCode::Dimension, "field storage does not match 3 x cell count");
}

double ComplexVectorField::norm() const {
  double s = 0.0;
  for (const cplx& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexVectorField::all_finite() const {
  for (const cplx& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

namespace {
void require_same(const ComplexVectorField& a, const ComplexVectorField& b) {
  if (a.size() != b.size() || a.grid().counts() != b.grid().counts())
    raise(ErrorCode::Dimension, "field shapes differ");
}
}  // namespace

ComplexVectorField& ComplexVectorField::operator+=(const ComplexVectorField& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ComplexVectorField& ComplexVectorField::operator-=(const ComplexVectorField& o) {
  require_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ComplexVectorField& ComplexVectorField::operator*=(cplx s) {
  for (cplx& v : values_) v *= s;
  return *this;
}

ComplexVectorField ComplexVectorField::restrict_to(const IndexBox& box) const {
  ComplexVectorField out(grid_.sub_grid(box));
  const Index3 e = box.extents();
  std::size_t c = 0;
  for (std::int64_t k = 0; k < e[2]; ++k)
    for (std::int64_t j = 0; j < e[1]; ++j)
      for (std::int64_t i = 0; i < e[0]; ++i, ++c) {
        const std::size_t g = grid_.linear(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k);
        for (int p = 0; p < 3; ++p) out.values_[3 * c + p] = values_[3 * g + p];
      }
  return out;
}

void ComplexVectorField::assign_box(const IndexBox& box, const ComplexVectorField& part) {
  if (part.grid().counts() != box.extents())
    raise(ErrorCode::Dimension, "box field does not match box " + box.to_string());
  const Index3 e = box.extents();
  std::size_t c = 0;
  for (std::int64_t k = 0; k < e[2]; ++k)
    for (std::int64_t j = 0; j < e[1]; ++j)
      for (std::int64_t i = 0; i < e[0]; ++i, ++c) {
        const std::size_t g = grid_.linear(box.lo[0] + i, box.lo[1] + j, box.lo[2] + k);
        for (int p = 0; p < 3; ++p) values_[3 * g + p] = part.values_[3 * c + p];
      }
}

ComplexVectorField operator+(ComplexVectorField a, const ComplexVectorField& b) {
  a += b;
  return a;
}

ComplexVectorField operator-(ComplexVectorField a, const ComplexVectorField& b) {
  a -= b;
  return a;
}

double relative_l2_difference(std::span<const cplx> a, std::span<const cplx> reference) {
  if (a.size() != reference.size()) raise(ErrorCode::Dimension, "vector sizes differ");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a[k] - reference[k]);
    den += std::norm(reference[k]);
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

void write_field_binary(const ComplexVectorField& field, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  io::put_grid(os, field.grid());
  for (const cplx& v : field.values()) {
    io::put<double>(os, v.real());
    io::put<double>(os, v.imag());
  }
  if (!os) raise(ErrorCode::Io, "write failed: " + path.string());
}

ComplexVectorField read_field_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorCode::Io, "cannot open " + path.string());
  const Grid grid = io::get_grid(is);
  std::vector<cplx> values(3 * grid.cell_count());
  for (cplx& v : values) {
    const double re = io::get<double>(is);
    const double im = io::get<double>(is);
    v = cplx(re, im);
  }
  return ComplexVectorField(grid, std::move(values));
}

}  // namespace iedd
