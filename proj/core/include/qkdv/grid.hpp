#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qkdv {

using cplx = std::complex<double>;

// Periodic truncation [-L, L) of the real line sampled at n equispaced points.
struct GridSpec {
  double half_length = 40.0;
  std::size_t n_points = 512;
  std::size_t n_components = 1;

  double spacing() const { return 2.0 * half_length / static_cast<double>(n_points); }
  double x(std::size_t j) const { return -half_length + spacing() * static_cast<double>(j); }
  // Signed integer wavenumber of FFT slot k (k in [0, n)).
  long mode(std::size_t k) const;
  double wavenumber(std::size_t k) const;
  // Largest representable |xi|.
  double nyquist() const;
  // Largest |xi| kept by the 2/3 dealiasing rule.
  double dealiased_cutoff() const;

  GridSpec with_components(std::size_t n) const;
  GridSpec with_points(std::size_t n) const;

  void validate() const;
  bool operator==(const GridSpec& o) const = default;
};

// n_components x n_points real samples, component-major.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid);
  Field(const GridSpec& grid, std::vector<double> values);

  static Field from_function(const GridSpec& grid,
                             const std::function<double(std::size_t comp, double x)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::size_t components() const { return grid_.n_components; }
  std::size_t points() const { return grid_.n_points; }

  std::span<double> component(std::size_t i);
  std::span<const double> component(std::size_t i) const;
  double& operator()(std::size_t comp, std::size_t j) { return values_[comp * grid_.n_points + j]; }
  double operator()(std::size_t comp, std::size_t j) const { return values_[comp * grid_.n_points + j]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  // Pointwise multiplication by a scalar function of x, applied to every component.
  Field times(const std::function<double(double)>& w) const;
  double max_abs() const;
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// Complex Fourier coefficients F_k with f(x_j) = sum_k F_k exp(i xi_k x_j),
// stored component-major in FFT slot order.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::span<cplx> component(std::size_t i);
  std::span<const cplx> component(std::size_t i) const;
  cplx& operator()(std::size_t comp, std::size_t k) { return coeffs_[comp * grid_.n_points + k]; }
  cplx operator()(std::size_t comp, std::size_t k) const { return coeffs_[comp * grid_.n_points + k]; }
  std::vector<cplx>& coeffs() { return coeffs_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  // max_k |F_k - conj(F_{-k})| relative to max_k |F_k|.
  double conjugate_symmetry_defect() const;

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

// An n x n matrix at every grid point, row-major per point.
class MatrixField {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Map = Eigen::Map<Matrix>;
  using ConstMap = Eigen::Map<const Matrix>;

  MatrixField() = default;
  MatrixField(const GridSpec& grid, std::size_t n);

  const GridSpec& grid() const { return grid_; }
  std::size_t dim() const { return n_; }
  std::size_t points() const { return grid_.n_points; }

  Map at(std::size_t j) { return Map(data_.data() + j * n_ * n_, n_, n_); }
  ConstMap at(std::size_t j) const { return ConstMap(data_.data() + j * n_ * n_, n_, n_); }
  double& entry(std::size_t j, std::size_t r, std::size_t c) { return data_[(j * n_ + r) * n_ + c]; }
  double entry(std::size_t j, std::size_t r, std::size_t c) const { return data_[(j * n_ + r) * n_ + c]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // Entry (r, c) as a scalar field over the grid.
  std::vector<double> entry_series(std::size_t r, std::size_t c) const;
  void set_entry_series(std::size_t r, std::size_t c, const std::vector<double>& v);

  MatrixField transpose() const;
  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator*=(double s);
  friend MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
  friend MatrixField operator*(double s, MatrixField a) { return a *= s; }
  // Pointwise scaling by a scalar field.
  MatrixField scaled(const std::vector<double>& w) const;
  // Spectral derivative of every entry.
  MatrixField derivative(int order) const;
  // max over points of the largest absolute entry.
  double max_abs_entry() const;
  bool all_finite() const;

  static MatrixField constant(const GridSpec& grid, const Matrix& m);

 private:
  GridSpec grid_;
  std::size_t n_ = 0;
  std::vector<double> data_;
};

MatrixField symmetric_part(const MatrixField& m);
MatrixField antisymmetric_part(const MatrixField& m);

}  // namespace qkdv
