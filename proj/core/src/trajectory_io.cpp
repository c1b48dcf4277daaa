#include "qkdv/trajectory_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "qkdv/error.hpp"
#include "qkdv/spectral.hpp"

namespace qkdv {

namespace {

constexpr char kMagic[8] = {'Q', 'K', 'D', 'V', 'T', 'R', 'J', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  v = to_le(v);
  out.write(reinterpret_cast<const char*>(&v), 8);
}

void put_f64(std::ostream& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8)) throw UsageError("trajectory file is truncated");
  return to_le(v);
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj) {
  out.write(kMagic, 8);
  put_u64(out, traj.grid.n_points);
  put_u64(out, traj.grid.n_components);
  put_f64(out, traj.grid.half_length);
  put_f64(out, traj.config.eps);
  put_u64(out, traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put_f64(out, traj.times[k]);
    for (double v : traj.states[k].values()) put_f64(out, v);
  }
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  write_trajectory(out, traj);
  if (!out) throw UsageError("write failed for " + path.string());
}

Trajectory read_trajectory(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw UsageError("not a trajectory file");
  Trajectory t;
  const std::uint64_t n = get_u64(in), c = get_u64(in);
  t.grid.half_length = get_f64(in);
  t.config.eps = get_f64(in);
  const std::uint64_t times = get_u64(in);
  if (n == 0 || c == 0 || n > (1u << 26) || c > 64 || times > (1u << 24))
    throw UsageError("trajectory header is implausible");
  t.grid.n_points = n;
  t.grid.n_components = c;
  t.times.reserve(times);
  t.states.reserve(times);
  for (std::uint64_t k = 0; k < times; ++k) {
    t.times.push_back(get_f64(in));
    Field f(t.grid);
    for (double& v : f.values()) v = get_f64(in);
    t.states.push_back(std::move(f));
  }
  if (!t.times.empty()) t.config.t_final = t.times.back();
  t.config.samples = t.times.size();
  return t;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  return read_trajectory(in);
}

CsvTable trajectory_norms_table(const Trajectory& traj) {
  CsvTable t({"t", "l2", "h82", "smoothing_integrand"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Field& u = traj.states[k];
    const double s = l2_norm(bessel_multiplier(u, 1.0).times([](double x) { return 1.0 / std::sqrt(1.0 + x * x); }));
    t.row() << traj.times[k] << l2_norm(u) << h_s2_norm(u, 8) << s * s;
  }
  return t;
}

}  // namespace qkdv
