#pragma once

// Random projection batches and the projection accuracy/timing table.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "caprsoc/rsoc_projection.hpp"

namespace caprsoc {

/// n three-dimensional points with coordinates uniform on [-2, 2].
std::vector<RsocVector> gen_random_points(std::size_t n, std::uint64_t seed);

struct ProjBenchConfig {
  std::vector<std::size_t> sizes = {10, 50, 100, 200, 300, 500, 800, 900, 1000};
  int reps = 100;
  std::uint64_t seed = 0;
  double cap = 1.0;
  /// Random feasible points per certificate (the structured witnesses are
  /// always added).
  std::size_t cert_samples = 32;
  unsigned threads = 1;
};

struct ProjBenchRow {
  std::size_t n = 0;
  double time_mean = 0.0;  // seconds per batch
  double time_std = 0.0;
  double infeas_mean = 0.0;  // largest violation in the batch
  double infeas_std = 0.0;
  double cert_mean = 0.0;  // largest certificate in the batch
  double cert_std = 0.0;
};

std::vector<ProjBenchRow> proj_bench(const ProjBenchConfig& cfg);

void write_proj_bench_csv(std::ostream& out, const std::vector<ProjBenchRow>& rows);
/// Inverse of write_proj_bench_csv(); throws Parse on a header mismatch.
std::vector<ProjBenchRow> read_proj_bench_csv(std::istream& in);

}  // namespace caprsoc
