#include "qkdv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qkdv/error.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

long GridSpec::mode(std::size_t k) const {
  const long n = static_cast<long>(n_points);
  const long kk = static_cast<long>(k);
  return kk < n / 2 ? kk : kk - n;
}

double GridSpec::wavenumber(std::size_t k) const {
  return std::numbers::pi * static_cast<double>(mode(k)) / half_length;
}

double GridSpec::nyquist() const {
  return std::numbers::pi * static_cast<double>(n_points / 2) / half_length;
}

double GridSpec::dealiased_cutoff() const { return 2.0 * nyquist() / 3.0; }

GridSpec GridSpec::with_components(std::size_t n) const {
  GridSpec g = *this;
  g.n_components = n;
  return g;
}

GridSpec GridSpec::with_points(std::size_t n) const {
  GridSpec g = *this;
  g.n_points = n;
  return g;
}

void GridSpec::validate() const {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw DimensionError("grid half length must be positive");
  if (n_points < 4 || (n_points & (n_points - 1)) != 0)
    throw DimensionError("grid size must be a power of two >= 4, got " + std::to_string(n_points));
  if (n_components == 0) throw DimensionError("grid needs at least one component");
}

Field::Field(const GridSpec& grid) : grid_(grid), values_(grid.n_components * grid.n_points, 0.0) {
  grid_.validate();
}

Field::Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.n_components * grid_.n_points)
    throw DimensionError("field has " + std::to_string(values_.size()) + " samples, grid expects " +
                         std::to_string(grid_.n_components * grid_.n_points));
}

Field Field::from_function(const GridSpec& grid,
                           const std::function<double(std::size_t, double)>& fn) {
  Field f(grid);
  for (std::size_t c = 0; c < grid.n_components; ++c)
    for (std::size_t j = 0; j < grid.n_points; ++j) f(c, j) = fn(c, grid.x(j));
  return f;
}

std::span<double> Field::component(std::size_t i) {
  if (i >= components()) throw DimensionError("component index out of range");
  return {values_.data() + i * grid_.n_points, grid_.n_points};
}

std::span<const double> Field::component(std::size_t i) const {
  if (i >= components()) throw DimensionError("component index out of range");
  return {values_.data() + i * grid_.n_points, grid_.n_points};
}

static void require_same(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw DimensionError("fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same(grid_, o.grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field Field::times(const std::function<double(double)>& w) const {
  Field out = *this;
  for (std::size_t j = 0; j < points(); ++j) {
    const double wj = w(grid_.x(j));
    for (std::size_t c = 0; c < components(); ++c) out(c, j) *= wj;
  }
  return out;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(grid.n_components * grid.n_points, cplx(0.0, 0.0)) {
  grid_.validate();
}

std::span<cplx> SpectralField::component(std::size_t i) {
  if (i >= grid_.n_components) throw DimensionError("component index out of range");
  return {coeffs_.data() + i * grid_.n_points, grid_.n_points};
}

std::span<const cplx> SpectralField::component(std::size_t i) const {
  if (i >= grid_.n_components) throw DimensionError("component index out of range");
  return {coeffs_.data() + i * grid_.n_points, grid_.n_points};
}

double SpectralField::conjugate_symmetry_defect() const {
  const std::size_t n = grid_.n_points;
  double peak = 0.0, defect = 0.0;
  for (std::size_t c = 0; c < grid_.n_components; ++c) {
    auto F = component(c);
    for (std::size_t k = 0; k < n; ++k) {
      peak = std::max(peak, std::abs(F[k]));
      defect = std::max(defect, std::abs(F[k] - std::conj(F[(n - k) % n])));
    }
  }
  return peak > 0.0 ? defect / peak : 0.0;
}

MatrixField::MatrixField(const GridSpec& grid, std::size_t n)
    : grid_(grid.with_components(n)), n_(n), data_(grid.n_points * n * n, 0.0) {}

std::vector<double> MatrixField::entry_series(std::size_t r, std::size_t c) const {
  std::vector<double> v(points());
  for (std::size_t j = 0; j < points(); ++j) v[j] = entry(j, r, c);
  return v;
}

void MatrixField::set_entry_series(std::size_t r, std::size_t c, const std::vector<double>& v) {
  for (std::size_t j = 0; j < points(); ++j) entry(j, r, c) = v[j];
}

MatrixField MatrixField::transpose() const {
  MatrixField out(grid_, n_);
  for (std::size_t j = 0; j < points(); ++j) out.at(j) = at(j).transpose();
  return out;
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  if (o.n_ != n_ || o.points() != points()) throw DimensionError("matrix field shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

MatrixField& MatrixField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

MatrixField MatrixField::scaled(const std::vector<double>& w) const {
  MatrixField out = *this;
  for (std::size_t j = 0; j < points(); ++j) out.at(j) *= w[j];
  return out;
}

MatrixField MatrixField::derivative(int order) const {
  MatrixField out(grid_, n_);
  GridSpec scalar = grid_.with_components(1);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t c = 0; c < n_; ++c)
      out.set_entry_series(r, c, series::derivative(scalar, entry_series(r, c), order));
  return out;
}

double MatrixField::max_abs_entry() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool MatrixField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

MatrixField MatrixField::constant(const GridSpec& grid, const Matrix& m) {
  MatrixField out(grid, static_cast<std::size_t>(m.rows()));
  for (std::size_t j = 0; j < out.points(); ++j) out.at(j) = m;
  return out;
}

MatrixField symmetric_part(const MatrixField& m) {
  MatrixField out(m.grid(), m.dim());
  for (std::size_t j = 0; j < m.points(); ++j) out.at(j) = 0.5 * (m.at(j) + m.at(j).transpose());
  return out;
}

MatrixField antisymmetric_part(const MatrixField& m) {
  MatrixField out(m.grid(), m.dim());
  for (std::size_t j = 0; j < m.points(); ++j) out.at(j) = 0.5 * (m.at(j) - m.at(j).transpose());
  return out;
}

}  // namespace qkdv
