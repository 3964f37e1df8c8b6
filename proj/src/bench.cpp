#include "caprsoc/bench.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "caprsoc/error.hpp"
#include "caprsoc/projection_oracle.hpp"

namespace caprsoc {
namespace {

constexpr const char* kHeader = "n,time_mean_s,time_std_s,infeas_mean,infeas_std,cert_gap_mean,cert_gap_std";

struct Stats {
  double mean = 0.0;
  double std = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) s.std += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(s.std / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::vector<RsocVector> gen_random_points(std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "need at least one point");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::vector<RsocVector> out(n);
  for (auto& v : out) {
    v.x = Eigen::VectorXd::Constant(1, unif(rng));
    v.y = unif(rng);
    v.z = unif(rng);
  }
  return out;
}

std::vector<ProjBenchRow> proj_bench(const ProjBenchConfig& cfg) {
  if (cfg.reps < 1) fail(ErrorCode::InvalidArgument, "reps must be positive");
  const CappedRsoc set(cfg.cap, 1);
  std::vector<ProjBenchRow> rows;
  for (std::size_t n : cfg.sizes) {
    std::vector<double> times, infeas, certs;
    for (int rep = 0; rep < cfg.reps; ++rep) {
      const std::uint64_t s = mix(cfg.seed, n, static_cast<std::uint64_t>(rep));
      const auto pts = gen_random_points(n, s);
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = project_cartesian(pts, set, cfg.threads);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      double worst = 0.0;
      double cert = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, infeasibility(res[i].point, set));
        cert = std::max(cert, projection_certificate(pts[i], res[i].point, set, cfg.cert_samples, s + i));
      }
      infeas.push_back(worst);
      certs.push_back(cert);
    }
    const Stats t = stats(times), f = stats(infeas), c = stats(certs);
    rows.push_back({n, t.mean, t.std, f.mean, f.std, c.mean, c.std});
  }
  return rows;
}

void write_proj_bench_csv(std::ostream& out, const std::vector<ProjBenchRow>& rows) {
  out << kHeader << '\n';
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.n << ',' << r.time_mean << ',' << r.time_std << ',' << r.infeas_mean << ',' << r.infeas_std << ','
         << r.cert_mean << ',' << r.cert_std << '\n';
    out << line.str();
  }
}

std::vector<ProjBenchRow> read_proj_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) fail(ErrorCode::Parse, "unexpected proj-bench header");
  std::vector<ProjBenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ProjBenchRow r;
    char c1, c2, c3, c4, c5, c6;
    ss >> r.n >> c1 >> r.time_mean >> c2 >> r.time_std >> c3 >> r.infeas_mean >> c4 >> r.infeas_std >> c5 >>
        r.cert_mean >> c6 >> r.cert_std;
    if (!ss || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',')
      fail(ErrorCode::Parse, "malformed proj-bench row: " + line);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace caprsoc
