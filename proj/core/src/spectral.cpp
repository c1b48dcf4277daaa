#include "qkdv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "qkdv/error.hpp"

namespace qkdv {

namespace {

constexpr double kRoundoffFloor = 1e-14;

cplx ipow(double xi, int m) {
  // (i xi)^m
  static const cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return phases[m % 4] * std::pow(xi, m);
}

// Multiplies a half spectrum in place. At the Nyquist slot only the real part
// of the symmetrized symbol survives.
template <class Symbol>
void multiply_half(const GridSpec& g, std::span<cplx> F, Symbol&& m) {
  const std::size_t n = g.n_points;
  for (std::size_t k = 0; k < n / 2; ++k) F[k] *= m(g.wavenumber(k));
  const double xn = g.nyquist();
  F[n / 2] *= 0.5 * (m(xn) + m(-xn)).real();
}

void drop_below(std::span<cplx> F, double rel) {
  double peak = 0.0;
  for (const cplx& z : F) peak = std::max(peak, std::abs(z));
  for (cplx& z : F)
    if (std::abs(z) < rel * peak) z = 0.0;
}

}  // namespace

namespace series {

std::vector<cplx> half_spectrum(const GridSpec& g, std::span<const double> f) {
  if (f.size() != g.n_points) throw DimensionError("series length does not match grid");
  const auto& fft = detail::fft_for(g.n_points);
  std::vector<cplx> F(fft.half());
  fft.forward(f.data(), F.data());
  return F;
}

std::vector<double> from_half_spectrum(const GridSpec& g, std::span<const cplx> F) {
  const auto& fft = detail::fft_for(g.n_points);
  if (F.size() != fft.half()) throw DimensionError("half spectrum length does not match grid");
  std::vector<double> f(g.n_points);
  fft.inverse(F.data(), f.data());
  return f;
}

std::vector<double> derivative(const GridSpec& g, std::span<const double> f, int order, double floor_rel) {
  if (order < 0 || order > 20) throw DimensionError("derivative order must be in [0, 20]");
  if (order == 0 && floor_rel <= 0.0) return {f.begin(), f.end()};
  auto F = half_spectrum(g, f);
  if (floor_rel > 0.0) drop_below(F, floor_rel);
  multiply_half(g, F, [order](double xi) { return ipow(xi, order); });
  return from_half_spectrum(g, F);
}

std::vector<double> dealias(const GridSpec& g, std::span<const double> f) {
  auto F = half_spectrum(g, f);
  const double cut = g.dealiased_cutoff();
  multiply_half(g, F, [cut](double xi) { return cplx(std::abs(xi) <= cut ? 1.0 : 0.0, 0.0); });
  return from_half_spectrum(g, F);
}

std::vector<double> dealiased_product(const GridSpec& g, std::span<const double> a,
                                      std::span<const double> b) {
  auto da = dealias(g, a);
  auto db = dealias(g, b);
  for (std::size_t j = 0; j < da.size(); ++j) da[j] *= db[j];
  return dealias(g, da);
}

double sobolev_norm(const GridSpec& g, std::span<const double> f, double s) {
  const auto F = half_spectrum(g, f);
  double peak = 0.0;
  for (const cplx& c : F) peak = std::max(peak, std::abs(c));
  if (peak == 0.0) return 0.0;
  const double floor = kRoundoffFloor * peak;
  const std::size_t n = g.n_points;
  double acc = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double a = std::abs(F[k]);
    if (a < floor) continue;
    const double xi = k == n / 2 ? g.nyquist() : g.wavenumber(k);
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    acc += mult * std::pow(1.0 + xi * xi, s) * a * a;
  }
  return std::sqrt(2.0 * g.half_length * acc);
}

}  // namespace series

SpectralField forward_transform(const Field& f) {
  const GridSpec& g = f.grid();
  SpectralField out(g);
  const std::size_t n = g.n_points;
  for (std::size_t c = 0; c < g.n_components; ++c) {
    const auto F = series::half_spectrum(g, f.component(c));
    auto dst = out.component(c);
    for (std::size_t k = 0; k <= n / 2; ++k) dst[k] = F[k];
    for (std::size_t k = n / 2 + 1; k < n; ++k) dst[k] = std::conj(F[n - k]);
  }
  return out;
}

Field inverse_transform(const SpectralField& F) {
  const GridSpec& g = F.grid();
  Field out(g);
  const std::size_t n = g.n_points;
  std::vector<cplx> half(n / 2 + 1);
  for (std::size_t c = 0; c < g.n_components; ++c) {
    auto src = F.component(c);
    // Project onto the real-valued subspace.
    half[0] = src[0].real();
    for (std::size_t k = 1; k < n / 2; ++k) half[k] = 0.5 * (src[k] + std::conj(src[n - k]));
    half[n / 2] = src[n / 2].real();
    const auto f = series::from_half_spectrum(g, half);
    std::copy(f.begin(), f.end(), out.component(c).begin());
  }
  return out;
}

Field apply_multiplier(const Field& f, const std::function<cplx(double)>& m) {
  const GridSpec& g = f.grid();
  Field out(g);
  for (std::size_t c = 0; c < g.n_components; ++c) {
    auto F = series::half_spectrum(g, f.component(c));
    multiply_half(g, F, m);
    const auto r = series::from_half_spectrum(g, F);
    std::copy(r.begin(), r.end(), out.component(c).begin());
  }
  return out;
}

Field derivative(const Field& f, int order, double floor_rel) {
  if (order < 0 || order > 20) throw DimensionError("derivative order must be in [0, 20]");
  if (floor_rel <= 0.0) {
    if (order == 0) return f;
    return apply_multiplier(f, [order](double xi) { return ipow(xi, order); });
  }
  const GridSpec& g = f.grid();
  Field out(g);
  for (std::size_t c = 0; c < g.n_components; ++c) {
    const auto r = series::derivative(g, f.component(c), order, floor_rel);
    std::copy(r.begin(), r.end(), out.component(c).begin());
  }
  return out;
}

Field bessel_multiplier(const Field& f, double s) {
  if (std::abs(s) > 30.0) throw DimensionError("Bessel potential order must satisfy |s| <= 30");
  if (s == 0.0) return f;
  return apply_multiplier(f, [s](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.5 * s), 0.0); });
}

Field dealias(const Field& f) {
  const double cut = f.grid().dealiased_cutoff();
  return apply_multiplier(f, [cut](double xi) { return cplx(std::abs(xi) <= cut ? 1.0 : 0.0, 0.0); });
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v * v;
  return std::sqrt(f.grid().spacing() * acc);
}

Field denoise(const Field& f, double rel) {
  const GridSpec& g = f.grid();
  Field out(g);
  for (std::size_t c = 0; c < f.components(); ++c) {
    auto F = series::half_spectrum(g, f.component(c));
    drop_below(F, rel);
    const auto v = series::from_half_spectrum(g, F);
    std::copy(v.begin(), v.end(), out.component(c).begin());
  }
  return out;
}

double sobolev_norm(const Field& f, double s) {
  double acc = 0.0;
  for (std::size_t c = 0; c < f.components(); ++c) {
    const double v = series::sobolev_norm(f.grid(), f.component(c), s);
    acc += v * v;
  }
  return std::sqrt(acc);
}

double exact_sobolev_norm(const SpectralField& F, double s) {
  const GridSpec& g = F.grid();
  double acc = 0.0;
  for (std::size_t c = 0; c < g.n_components; ++c)
    for (std::size_t k = 0; k < g.n_points; ++k) {
      const double xi = g.wavenumber(k);
      acc += std::pow(1.0 + xi * xi, s) * std::norm(F(c, k));
    }
  return std::sqrt(2.0 * g.half_length * acc);
}

double difference_norm(const Field& a, const Field& b, double s) {
  if (!(a.grid() == b.grid())) throw DimensionError("difference of fields on different grids");
  const GridSpec& g = a.grid();
  const std::size_t n = g.n_points;
  double acc = 0.0;
  for (std::size_t c = 0; c < a.components(); ++c) {
    const auto A = series::half_spectrum(g, a.component(c));
    const auto B = series::half_spectrum(g, b.component(c));
    double peak = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) peak = std::max({peak, std::abs(A[k]), std::abs(B[k])});
    const double floor = kRoundoffFloor * peak;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double d = std::abs(A[k] - B[k]);
      if (d < floor) continue;
      const double xi = k == n / 2 ? g.nyquist() : g.wavenumber(k);
      const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
      acc += mult * std::pow(1.0 + xi * xi, s) * d * d;
    }
  }
  return std::sqrt(2.0 * g.half_length * acc);
}

double boundary_mass_fraction(const Field& f) {
  const GridSpec& g = f.grid();
  double edge = 0.0, total = 0.0;
  for (std::size_t c = 0; c < f.components(); ++c)
    for (std::size_t j = 0; j < g.n_points; ++j) {
      const double v = f(c, j) * f(c, j);
      total += v;
      if (std::abs(g.x(j)) > 0.9 * g.half_length) edge += v;
    }
  return total > 0.0 ? std::sqrt(edge / total) : 0.0;
}

NormReport weighted_sobolev_norm(const Field& f, int s, int k) {
  if (k < 0 || k > 2) throw DimensionError("weight order must be 0, 1 or 2, got " + std::to_string(k));
  if (s < 0) throw DimensionError("Sobolev index must be nonnegative");
  NormReport rep;
  rep.s = s;
  rep.weight_order = k;
  for (int j = 0; j <= k; ++j) {
    const int p = k - j;
    const Field w = p == 0 ? f : f.times([p](double x) { return std::pow(1.0 + x * x, 0.5 * p); });
    const double term = sobolev_norm(w, s + 3 * j);
    rep.terms.emplace_back(j, term);
    rep.value += term;
  }
  rep.boundary_warning = k > 0 && boundary_mass_fraction(f) > 1e-8;
  return rep;
}

double h_s2_norm(const Field& f, int s) { return weighted_sobolev_norm(f, s, 2).value; }

}  // namespace qkdv
