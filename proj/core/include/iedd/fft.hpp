#pragma once

#include <cstddef>
#include <limits>
#include <new>
#include <span>
#include <vector>

#include "iedd/grid.hpp"
#include "iedd/types.hpp"

namespace iedd {

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

// Allocator returning SIMD-aligned storage, so any buffer can be handed to a
// cached FFT plan.
template <class T>
struct FftAllocator {
  using value_type = T;
  FftAllocator() = default;
  template <class U>
  FftAllocator(const FftAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_array_new_length();
    return static_cast<T*>(detail::fft_alloc(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }

  template <class U>
  bool operator==(const FftAllocator<U>&) const noexcept { return true; }
};

using SpectralArray = std::vector<cplx, FftAllocator<cplx>>;

// In-place 3D transforms over x-fastest arrays. Plans are created once per
// shape (under a lock) and executed lock-free, so a Fft3d may be used from
// several threads as long as each thread works on its own buffer.
class Fft3d {
 public:
  explicit Fft3d(Index3 dims);

  const Index3& dims() const { return dims_; }
  std::size_t size() const { return size_; }

  void forward(std::span<cplx> data) const;
  // Normalized inverse (includes the 1/N factor).
  void inverse(std::span<cplx> data) const;

 private:
  Index3 dims_;
  std::size_t size_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace iedd
