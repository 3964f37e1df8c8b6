#include <doctest.h>

#include <sstream>

#include "caprsoc/bench.hpp"
#include "caprsoc/error.hpp"
#include "caprsoc/solvers.hpp"

using namespace caprsoc;

TEST_CASE("random points") {
  const auto a = gen_random_points(1000, 3);
  const auto b = gen_random_points(1000, 3);
  REQUIRE(a.size() == 1000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x.size() == 1);
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].z == b[i].z);
    for (double c : {a[i].x[0], a[i].y, a[i].z}) {
      CHECK(c >= -2.0);
      CHECK(c <= 2.0);
    }
  }
  const auto big = gen_random_points(100000 / 3 + 1, 4);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : big) {
    sum += v.x[0] + v.y + v.z;
    count += 3;
  }
  CHECK(std::abs(sum / count) <= 0.02);
}

TEST_CASE("projection benchmark table") {
  ProjBenchConfig cfg;
  cfg.sizes = {10, 50};
  cfg.reps = 100;
  cfg.cert_samples = 8;
  const auto rows = proj_bench(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 10);
  for (const auto& r : rows) {
    CHECK(r.time_mean > 0.0);
    CHECK(r.time_std >= 0.0);
    CHECK(r.infeas_mean <= 1e-11);
    CHECK(r.infeas_mean + 10 * r.infeas_std <= 1e-11);
    CHECK(r.infeas_std >= 0.0);
    CHECK(r.cert_mean <= 1e-9);
  }

  // Non-timing columns depend only on (config, seed).
  const auto again = proj_bench(cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(again[i].infeas_mean == rows[i].infeas_mean);
    CHECK(again[i].cert_mean == rows[i].cert_mean);
    CHECK(again[i].cert_std == rows[i].cert_std);
  }

  std::stringstream io;
  write_proj_bench_csv(io, rows);
  std::string header;
  std::getline(io, header);
  CHECK(header == "n,time_mean_s,time_std_s,infeas_mean,infeas_std,cert_gap_mean,cert_gap_std");
  io.seekg(0);
  const auto back = read_proj_bench_csv(io);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].time_mean == rows[i].time_mean);
    CHECK(back[i].time_std == rows[i].time_std);
    CHECK(back[i].infeas_mean == rows[i].infeas_mean);
    CHECK(back[i].infeas_std == rows[i].infeas_std);
    CHECK(back[i].cert_mean == rows[i].cert_mean);
    CHECK(back[i].cert_std == rows[i].cert_std);
  }

  std::istringstream bad("n,time\n1,2\n");
  try {
    read_proj_bench_csv(bad);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
  }
  cfg.reps = 0;
  CHECK_THROWS_AS(proj_bench(cfg), Error);
}

TEST_CASE("synthetic instance edge cases") {
  SynthOptions opt;
  opt.t = 20;
  opt.n = 8;
  opt.sparsity = 0;
  opt.noise = 0.0;
  CHECK(synth_instance(opt).b.norm() == 0.0);

  // Noiseless recovery with vanishing penalties.
  opt.t = 40;
  opt.n = 10;
  opt.sparsity = 3;
  auto p = synth_instance(opt);
  p.gamma1 = p.gamma2 = 1e-8;
  SolverConfig c;
  c.max_iter = 20000;
  c.stop.mode = StopMode::FixedPointResidual;
  c.stop.residual_tol = 1e-12;
  const auto r = solve(p, c);
  CHECK((p.A * r.point.x - p.b).norm() <= 1e-3);
}

TEST_CASE("group solve with four groups") {
  SynthOptions opt;
  opt.t = 60;
  opt.n = 40;
  opt.sparsity = 5;
  opt.seed = 2;
  auto p = synth_instance(opt);
  p.groups = consecutive_groups(40, 4);
  SolverConfig c;
  c.max_iter = 20000;
  c.stop.mode = StopMode::FixedPointResidual;
  c.stop.residual_tol = 1e-7;
  const auto r = solve_grouped(p, c);
  CHECK(r.residual <= 1e-6);
  CHECK(point_is_feasible(p, r.point));
}
