#include "fft.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace qkdv::detail {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  std::vector<double> r(n);
  std::vector<fftw_complex> c(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), r.data(), c.data(), flags);
  inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c.data(), r.data(), flags);
}

RealFft::~RealFft() {
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(inv_));
}

void RealFft::forward(const double* in, cplx* out) const {
  // r2c plans preserve their input by default.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t k = 0; k < half(); ++k) out[k] *= (k % 2 ? -inv_n : inv_n);
}

void RealFft::inverse(const cplx* in, double* out) const {
  thread_local std::vector<cplx> scratch;
  scratch.assign(in, in + half());
  for (std::size_t k = 1; k < half(); k += 2) scratch[k] = -scratch[k];
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_), reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

const RealFft& fft_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<RealFft>(n)).first;
  return *it->second;
}

}  // namespace qkdv::detail
