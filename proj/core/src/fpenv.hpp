#pragma once

#if defined(__SSE__) || defined(__x86_64__)
#include <xmmintrin.h>
#define QKDV_HAVE_MXCSR 1
#endif

namespace qkdv::detail {

// Flushes denormals to zero for the lifetime of the guard. Decayed viscous
// modes otherwise sit in the denormal range and slow every step.
class FlushDenormals {
 public:
  FlushDenormals() {
#ifdef QKDV_HAVE_MXCSR
    saved_ = _mm_getcsr();
    _mm_setcsr(saved_ | 0x8040u);  // FTZ | DAZ
#endif
  }
  ~FlushDenormals() {
#ifdef QKDV_HAVE_MXCSR
    _mm_setcsr(saved_);
#endif
  }
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

}  // namespace qkdv::detail
