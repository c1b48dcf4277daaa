#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "qkdv/grid.hpp"

namespace qkdv::detail {

// Half-spectrum real transform on a GridSpec lattice. Coefficients follow
// F_k = (1/n) sum_j f_j exp(-i xi_k x_j) with x_j = -L + j h, so the grid
// offset shows up as a (-1)^k phase relative to the raw DFT.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t half() const { return n_ / 2 + 1; }

  // in: n reals, out: n/2 + 1 coefficients.
  void forward(const double* in, cplx* out) const;
  // in: n/2 + 1 coefficients (not modified), out: n reals.
  void inverse(const cplx* in, double* out) const;

 private:
  std::size_t n_;
  void* fwd_;
  void* inv_;
};

// Cached transform for size n. Plans are created once under a lock and then
// executed through the thread-safe new-array interface.
const RealFft& fft_for(std::size_t n);

}  // namespace qkdv::detail
