#include <fstream>

#include "binary_io.hpp"
#include "iedd/model.hpp"

namespace iedd {

void write_model_binary(const ConductivityModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  io::put_grid(os, model.grid());
  for (const Tensor3x3& t : model.tensors())
    for (double x : t.v) io::put<double>(os, x);
  if (!os) raise(ErrorCode::Io, "write failed: " + path.string());
}

ConductivityModel read_model_binary(const std::filesystem::path& path, double sigma0) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorCode::Io, "cannot open " + path.string());
  const Grid grid = io::get_grid(is);
  std::vector<Tensor3x3> tensors(grid.cell_count());
  for (Tensor3x3& t : tensors)
    for (double& x : t.v) x = io::get<double>(is);
  return ConductivityModel(grid, std::move(tensors), sigma0);
}

}  // namespace iedd
