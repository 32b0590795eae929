#include "iedd/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "iedd/error.hpp"

namespace iedd {

namespace detail {

void* fft_alloc(std::size_t bytes) {
  void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
  if (!p) throw std::bad_alloc();
  return p;
}

void fft_free(void* p) noexcept { fftw_free(p); }

}  // namespace detail

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW's planner is not re-entrant; plan execution on distinct arrays is.
// FFTW_ESTIMATE keeps plan selection deterministic from run to run.
PlanPair plans_for(const Index3& dims) {
  static std::mutex mutex;
  static std::map<Index3, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(dims);
  if (it != cache.end()) return it->second;

  const std::size_t n = static_cast<std::size_t>(dims[0] * dims[1] * dims[2]);
  SpectralArray scratch(n);
  auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
  // FFTW is row-major with the last index fastest; our arrays are x-fastest.
  const int n0 = static_cast<int>(dims[2]);
  const int n1 = static_cast<int>(dims[1]);
  const int n2 = static_cast<int>(dims[0]);
  PlanPair pair;
  pair.forward = fftw_plan_dft_3d(n0, n1, n2, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  pair.inverse = fftw_plan_dft_3d(n0, n1, n2, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!pair.forward || !pair.inverse) raise(ErrorCode::Resource, "FFTW planning failed");
  cache.emplace(dims, pair);
  return pair;
}

}  // namespace

Fft3d::Fft3d(Index3 dims) : dims_(dims) {
  for (int a = 0; a < 3; ++a)
    if (dims_[a] < 1) raise(ErrorCode::Dimension, "FFT dimensions must be >= 1");
  size_ = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  const PlanPair pair = plans_for(dims_);
  forward_plan_ = pair.forward;
  inverse_plan_ = pair.inverse;
}

namespace {

// Plans were made on fftw_malloc storage; other buffers go through a copy.
void execute(void* plan, std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  if (fftw_alignment_of(reinterpret_cast<double*>(p)) == 0) {
    fftw_execute_dft(static_cast<fftw_plan>(plan), p, p);
    return;
  }
  SpectralArray tmp(data.begin(), data.end());
  auto* q = reinterpret_cast<fftw_complex*>(tmp.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan), q, q);
  std::copy(tmp.begin(), tmp.end(), data.begin());
}

}  // namespace

void Fft3d::forward(std::span<cplx> data) const {
  if (data.size() != size_) raise(ErrorCode::Dimension, "FFT buffer size mismatch");
  execute(forward_plan_, data);
}

void Fft3d::inverse(std::span<cplx> data) const {
  if (data.size() != size_) raise(ErrorCode::Dimension, "FFT buffer size mismatch");
  execute(inverse_plan_, data);
  const double scale = 1.0 / static_cast<double>(size_);
  for (cplx& v : data) v *= scale;
}

}  // namespace iedd
