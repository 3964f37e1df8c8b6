// caprsoc_cli: projection benchmarks and regression solves.
//
//   caprsoc_cli --cmd proj-bench --n 10,100,1000 --reps 100 --out runs
//   caprsoc_cli --cmd reg-solve --t 100 --n 200 --method fista --step backtrack
//   caprsoc_cli --cmd group-solve --n 40 --q 4
//   caprsoc_cli --cmd trace --data data/toy.csv --schema "region:categorical,..."
//
// Every run writes into <out>/<cmd>-<seed>/: config.ini, a results CSV and,
// for solver commands, trace CSVs. On failure the last line on stderr is
//   error: code=<name> message="<text>"
// and the exit status is nonzero.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "caprsoc/caprsoc.h"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string cmd = "proj-bench";
  std::vector<size_t> n = {};
  size_t t = 100;
  size_t q = 0;
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  uint64_t seed = 0;
  std::string method = "fista";
  std::string step = "backtrack";
  int max_iter = 1000;
  double stop_gap = 1e-3;
  std::string data;
  std::string schema;
  std::string out = "runs";
  int reps = 100;
  size_t cert_samples = 32;
  size_t sparsity = 10;
  double noise = 0.1;
  int ref_factor = 50;
  double ref_residual = 1e-12;
};

struct Failure {
  caprsoc_status status;
  std::string message;
};

void check(caprsoc_status s) {
  if (s != CAPRSOC_OK) throw Failure{s, caprsoc_last_error()};
}

std::string quote(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o.push_back('\\');
    o.push_back(c == '\n' ? ' ' : c);
  }
  return o;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Failure{CAPRSOC_IO, "cannot write '" + p.string() + "'"};
  f.precision(17);
  return f;
}

struct Problem {
  caprsoc_problem* p = nullptr;
  Problem() = default;
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;
  ~Problem() { caprsoc_problem_free(p); }
};

struct Report {
  caprsoc_report* r = nullptr;
  Report() = default;
  Report(Report&& o) noexcept : r(o.r) { o.r = nullptr; }
  Report(const Report&) = delete;
  ~Report() { caprsoc_report_free(r); }
};

size_t first_n(const Options& o, size_t fallback) { return o.n.empty() ? fallback : o.n.front(); }

void load_problem(const Options& o, Problem& prob, const fs::path& dir) {
  if (!o.data.empty()) {
    if (o.schema.empty()) throw Failure{CAPRSOC_INVALID_ARGUMENT, "--data needs --schema"};
    std::string schema = o.schema;
    if (fs::is_regular_file(schema)) {
      std::ifstream in(schema);
      std::stringstream ss;
      ss << in.rdbuf();
      schema = ss.str();
    }
    check(caprsoc_problem_from_csv(o.data.c_str(), schema.c_str(), o.gamma1, o.gamma2, &prob.p));
    open_out(dir / "encoding.json") << caprsoc_problem_encoding_report(prob.p);
  } else {
    const size_t n = first_n(o, 200);
    check(caprsoc_problem_synthetic(o.t, n, std::min(o.sparsity, n), o.noise, o.seed, o.gamma1, o.gamma2, &prob.p));
  }
}

caprsoc_solver_config solver_config(const Options& o, const std::string& method, const std::string& step) {
  caprsoc_solver_config c;
  caprsoc_solver_config_default(&c);
  c.method = method == "pg" ? CAPRSOC_PG : CAPRSOC_FISTA;
  c.step_mode = step == "const" ? CAPRSOC_STEP_CONSTANT : CAPRSOC_STEP_BACKTRACKING;
  c.max_iter = o.max_iter;
  c.seed = o.seed;
  return c;
}

// Long FISTA-backtracking run whose objective serves as the target.
Report reference_run(const Options& o, const Problem& prob) {
  caprsoc_solver_config c = solver_config(o, "fista", "backtrack");
  c.max_iter = o.ref_factor * o.max_iter;
  c.stop_mode = CAPRSOC_STOP_FIXED_POINT_RESIDUAL;
  c.residual_tol = o.ref_residual;
  Report rep;
  check(caprsoc_solve(prob.p, &c, &rep.r));
  return rep;
}

Report targeted_run(const Options& o, const Problem& prob, const std::string& method, const std::string& step,
                    double target) {
  caprsoc_solver_config c = solver_config(o, method, step);
  if (o.stop_gap > 0.0) {
    c.stop_mode = CAPRSOC_STOP_OBJECTIVE_TARGET;
    c.target = target;
    c.rel_gap = o.stop_gap;
  }
  Report rep;
  check(caprsoc_solve(prob.p, &c, &rep.r));
  return rep;
}

constexpr const char* kSummaryHeader =
    "command,method,step,t,n,q,iterations,time_ms,objective,residual,reference_objective,rel_gap,termination";

void summary_row(std::ostream& out, const Options& o, const Problem& prob, const std::string& method,
                 const std::string& step, const Report& rep, double ref) {
  size_t t = 0, n = 0, q = 0;
  check(caprsoc_problem_dims(prob.p, &t, &n, &q));
  const double f = caprsoc_report_objective(rep.r);
  const double gap = ref != 0.0 ? (f - ref) / std::abs(ref) : f - ref;
  out << o.cmd << ',' << method << ',' << step << ',' << t << ',' << n << ',' << q << ','
      << caprsoc_report_iterations(rep.r) << ',' << caprsoc_report_time_ms(rep.r) << ',' << f << ','
      << caprsoc_report_residual(rep.r) << ',' << ref << ',' << gap << ',' << caprsoc_report_termination(rep.r)
      << '\n';
}

void write_trace(const Report& rep, const fs::path& p) { check(caprsoc_report_write_trace_csv(rep.r, p.string().c_str())); }

void cmd_proj_bench(const Options& o, const fs::path& dir) {
  std::vector<size_t> sizes = o.n;
  const fs::path csv = dir / "proj_bench.csv";
  check(caprsoc_proj_bench(sizes.empty() ? nullptr : sizes.data(), sizes.size(), o.reps, o.seed, o.cert_samples,
                           csv.string().c_str()));
}

void cmd_solve(const Options& o, const fs::path& dir, bool grouped) {
  Problem prob;
  load_problem(o, prob, dir);
  if (grouped) {
    if (o.q == 0) throw Failure{CAPRSOC_INVALID_ARGUMENT, "group-solve needs --q"};
    check(caprsoc_problem_set_consecutive_groups(prob.p, o.q));
  }
  const Report ref = reference_run(o, prob);
  write_trace(ref, dir / "reference_trace.csv");
  const double target = caprsoc_report_objective(ref.r);
  const Report rep = targeted_run(o, prob, o.method, o.step, target);
  write_trace(rep, dir / "trace.csv");
  auto out = open_out(dir / "summary.csv");
  out << kSummaryHeader << '\n';
  summary_row(out, o, prob, o.method, o.step, rep, target);
}

void cmd_trace(const Options& o, const fs::path& dir) {
  Problem prob;
  load_problem(o, prob, dir);
  if (o.q > 0) check(caprsoc_problem_set_consecutive_groups(prob.p, o.q));
  const Report ref = reference_run(o, prob);
  const double target = caprsoc_report_objective(ref.r);
  auto out = open_out(dir / "summary.csv");
  out << kSummaryHeader << '\n';
  for (const char* method : {"fista", "pg"}) {
    for (const char* step : {"backtrack", "const"}) {
      const Report rep = targeted_run(o, prob, method, step, target);
      write_trace(rep, dir / (std::string("trace-") + method + "-" + step + ".csv"));
      summary_row(out, o, prob, method, step, rep, target);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projection onto the capped rotated second-order cone: benchmarks and regression solves"};
  Options o;
  app.set_config("--config", "", "key=value file; flags on the command line win");
  app.option_defaults()->always_capture_default();
  app.add_option("--cmd", o.cmd, "Command")->check(CLI::IsMember({"proj-bench", "reg-solve", "group-solve", "trace"}));
  app.add_option("--n", o.n, "Features (solves) or comma-separated batch sizes (proj-bench)")->delimiter(',');
  app.add_option("--t", o.t, "Observations of the synthetic instance")->check(CLI::PositiveNumber);
  app.add_option("--q", o.q, "Number of consecutive groups");
  app.add_option("--gamma1", o.gamma1, "Sparsity penalty")->check(CLI::NonNegativeNumber);
  app.add_option("--gamma2", o.gamma2, "Ridge penalty")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--method", o.method, "Solver")->check(CLI::IsMember({"pg", "fista"}));
  app.add_option("--step", o.step, "Step rule")->check(CLI::IsMember({"const", "backtrack"}));
  app.add_option("--max-iter", o.max_iter, "Iteration budget")->check(CLI::NonNegativeNumber);
  app.add_option("--stop-gap", o.stop_gap, "Relative gap to the reference objective (0: run the full budget)");
  app.add_option("--data", o.data, "CSV file with a header row");
  app.add_option("--schema", o.schema, "Column types, name:type,... or a file holding them");
  app.add_option("--out", o.out, "Output root");
  app.add_option("--reps", o.reps, "proj-bench repetitions per size")->check(CLI::PositiveNumber);
  app.add_option("--cert-samples", o.cert_samples, "proj-bench random certificate witnesses");
  app.add_option("--sparsity", o.sparsity, "Planted nonzeros of the synthetic instance (capped at n)");
  app.add_option("--noise", o.noise, "Noise level of the synthetic instance")->check(CLI::NonNegativeNumber);
  app.add_option("--ref-factor", o.ref_factor, "Reference run budget as a multiple of --max-iter")
      ->check(CLI::PositiveNumber);
  app.add_option("--ref-residual", o.ref_residual, "Reference run residual stop")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: code=invalid_argument message=\"" << quote(e.what()) << "\"\n";
    return 2;
  }

  try {
    const fs::path dir = fs::path(o.out) / (o.cmd + "-" + std::to_string(o.seed));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure{CAPRSOC_IO, "cannot create '" + dir.string() + "': " + ec.message()};
    open_out(dir / "config.ini") << app.config_to_str(true, false);

    if (o.cmd == "proj-bench") cmd_proj_bench(o, dir);
    else if (o.cmd == "reg-solve") cmd_solve(o, dir, false);
    else if (o.cmd == "group-solve") cmd_solve(o, dir, true);
    else cmd_trace(o, dir);
    std::cout << dir.string() << '\n';
  } catch (const Failure& f) {
    std::cerr << "error: code=" << caprsoc_status_name(f.status) << " message=\"" << quote(f.message) << "\"\n";
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: code=unknown message=\"" << quote(e.what()) << "\"\n";
    return static_cast<int>(CAPRSOC_UNKNOWN);
  }
  return 0;
}
