#pragma once

#include <filesystem>
#include <iosfwd>

#include "qkdv/csv.hpp"
#include "qkdv/linear.hpp"

namespace qkdv {

// Full-state dump, little-endian regardless of the host:
//
//   offset  size  field
//   0       8     magic "QKDVTRJ1"
//   8       8     u64 n_points
//   16      8     u64 n_components
//   24      8     f64 half_length
//   32      8     f64 eps
//   40      8     u64 n_times
//   48      ...   per time: f64 t, then n_components arrays of n_points f64
//
// Forcing samples are not stored.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);
// Bad magic, truncation or implausible sizes -> UsageError.
Trajectory read_trajectory(std::istream& in);
Trajectory read_trajectory(const std::filesystem::path& path);

// (t, l2, h82, smoothing_integrand) with the integrand ||<x>^{-1} <d> u(t)||^2.
CsvTable trajectory_norms_table(const Trajectory& traj);

}  // namespace qkdv
