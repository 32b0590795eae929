#include <array>
#include <fstream>

#include "binary_io.hpp"
#include "iedd/greens.hpp"

namespace iedd {

namespace {
constexpr std::array<char, 8> kMagic{'I', 'E', 'D', 'D', 'K', 'R', 'N', 'L'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_kernel(const GreenKernel& kernel, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  io::put<std::uint32_t>(os, kVersion);
  io::put<std::uint32_t>(os, kernel.kind_ == KernelKind::Electric ? 0u : 1u);
  for (int a = 0; a < 3; ++a) io::put<std::int64_t>(os, kernel.counts_[a]);
  for (int a = 0; a < 3; ++a) io::put<double>(os, kernel.spacing_[a]);
  io::put<double>(os, kernel.bg_.sigma0);
  io::put<double>(os, kernel.bg_.omega);
  io::put<std::int64_t>(os, static_cast<std::int64_t>(kernel.slots_.size()));
  for (int e = 0; e < 9; ++e) {
    io::put<std::int64_t>(os, kernel.slot_of_[e]);
    io::put<double>(os, kernel.sign_of_[e]);
  }
  for (const cplx& s : kernel.self_) {
    io::put<double>(os, s.real());
    io::put<double>(os, s.imag());
  }
  for (const SpectralArray& slot : kernel.slots_)
    for (const cplx& v : slot) {
      io::put<double>(os, v.real());
      io::put<double>(os, v.imag());
    }
  if (!os) raise(ErrorCode::Io, "write failed: " + path.string());
}

GreenKernel load_kernel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorCode::Io, "cannot open " + path.string());
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic)
    raise(ErrorCode::Io, path.string() + " is not a kernel cache file");
  if (io::get<std::uint32_t>(is) != kVersion)
    raise(ErrorCode::Io, path.string() + ": unsupported kernel cache version");

  GreenKernel K;
  K.kind_ = io::get<std::uint32_t>(is) == 0u ? KernelKind::Electric : KernelKind::Magnetic;
  for (int a = 0; a < 3; ++a) K.counts_[a] = io::get<std::int64_t>(is);
  for (int a = 0; a < 3; ++a) K.spacing_[a] = io::get<double>(is);
  K.bg_.sigma0 = io::get<double>(is);
  K.bg_.omega = io::get<double>(is);
  const auto nslots = io::get<std::int64_t>(is);
  if (nslots < 0 || nslots > 9) raise(ErrorCode::Io, "corrupt kernel cache header");
  for (int e = 0; e < 9; ++e) {
    K.slot_of_[e] = static_cast<int>(io::get<std::int64_t>(is));
    K.sign_of_[e] = io::get<double>(is);
  }
  for (cplx& s : K.self_) {
    const double re = io::get<double>(is);
    s = cplx(re, io::get<double>(is));
  }
  K.padded_ = {2 * K.counts_[0], 2 * K.counts_[1], 2 * K.counts_[2]};
  K.slots_.assign(static_cast<std::size_t>(nslots), SpectralArray(K.padded_size()));
  for (SpectralArray& slot : K.slots_)
    for (cplx& v : slot) {
      const double re = io::get<double>(is);
      v = cplx(re, io::get<double>(is));
    }
  return K;
}

GreenKernel load_or_assemble_kernel(const std::filesystem::path& path, KernelKind kind,
                                    const Grid& grid, const Background& bg) {
  if (std::filesystem::exists(path)) {
    try {
      GreenKernel K = load_kernel(path);
      if (K.kind() == kind && K.matches(grid.counts(), grid.spacing(), bg)) return K;
    } catch (const Error&) {
      // Stale or unreadable cache: rebuild below.
    }
  }
  GreenKernel K = assemble_kernel(kind, grid.counts(), grid.spacing(), bg);
  save_kernel(K, path);
  return K;
}

}  // namespace iedd
