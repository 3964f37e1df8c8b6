#include "caprsoc/caprsoc.h"

#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "caprsoc/bench.hpp"
#include "caprsoc/dataset.hpp"
#include "caprsoc/error.hpp"
#include "caprsoc/projection_oracle.hpp"
#include "caprsoc/solvers.hpp"

struct caprsoc_problem {
  caprsoc::SparseRegressionProblem problem;
  std::string report_json;
};

struct caprsoc_report {
  caprsoc::SolveReport report;
};

namespace {

thread_local std::string g_last_error;

caprsoc_status to_status(caprsoc::ErrorCode c) {
  switch (c) {
    case caprsoc::ErrorCode::InvalidArgument: return CAPRSOC_INVALID_ARGUMENT;
    case caprsoc::ErrorCode::DimensionMismatch: return CAPRSOC_DIMENSION_MISMATCH;
    case caprsoc::ErrorCode::Unsupported: return CAPRSOC_UNSUPPORTED;
    case caprsoc::ErrorCode::InternalInconsistency: return CAPRSOC_INTERNAL_INCONSISTENCY;
    case caprsoc::ErrorCode::StepFailure: return CAPRSOC_STEP_FAILURE;
    case caprsoc::ErrorCode::Io: return CAPRSOC_IO;
    case caprsoc::ErrorCode::Parse: return CAPRSOC_PARSE;
  }
  return CAPRSOC_UNKNOWN;
}

template <class F>
caprsoc_status guarded(F&& f) noexcept {
  try {
    f();
    return CAPRSOC_OK;
  } catch (const caprsoc::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return CAPRSOC_UNKNOWN;
}

void require(bool ok, const char* what) {
  if (!ok) caprsoc::fail(caprsoc::ErrorCode::InvalidArgument, what);
}

caprsoc::RsocVector make_point(size_t m, const double* x, double y, double z) {
  require(m >= 1 && x != nullptr, "x-block must be non-empty");
  return {Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(m)), y, z};
}

}  // namespace

extern "C" {

const char* caprsoc_version(void) { return "0.1.0"; }

const char* caprsoc_status_name(caprsoc_status status) {
  switch (status) {
    case CAPRSOC_OK: return "ok";
    case CAPRSOC_INVALID_ARGUMENT: return "invalid_argument";
    case CAPRSOC_DIMENSION_MISMATCH: return "dimension_mismatch";
    case CAPRSOC_UNSUPPORTED: return "unsupported";
    case CAPRSOC_INTERNAL_INCONSISTENCY: return "internal_inconsistency";
    case CAPRSOC_STEP_FAILURE: return "step_failure";
    case CAPRSOC_IO: return "io";
    case CAPRSOC_PARSE: return "parse";
    case CAPRSOC_UNKNOWN: break;
  }
  return "unknown";
}

const char* caprsoc_case_name(caprsoc_case c) {
  return caprsoc::to_string(static_cast<caprsoc::ProjectionCase>(c)).data();  // literals, NUL-terminated
}

const char* caprsoc_last_error(void) { return g_last_error.c_str(); }

caprsoc_status caprsoc_project(double u, size_t m, const double* x, double y, double z, double* x_out,
                               double* y_out, double* z_out, caprsoc_case* case_out, double* multiplier_out) {
  return guarded([&] {
    require(x_out && y_out && z_out, "output pointers must not be null");
    const caprsoc::CappedRsoc set(u, static_cast<Eigen::Index>(m));
    const auto r = caprsoc::project(make_point(m, x, y, z), set);
    Eigen::Map<Eigen::VectorXd>(x_out, static_cast<Eigen::Index>(m)) = r.point.x;
    *y_out = r.point.y;
    *z_out = r.point.z;
    if (case_out) *case_out = static_cast<caprsoc_case>(r.kind);
    if (multiplier_out) *multiplier_out = r.multiplier;
  });
}

caprsoc_status caprsoc_project_batch(double u, size_t count, const double* xyz, double* out, caprsoc_case* cases,
                                     unsigned threads) {
  return guarded([&] {
    require(count == 0 || (xyz && out), "batch pointers must not be null");
    const caprsoc::CappedRsoc set(u, 1);
    std::vector<caprsoc::RsocVector> batch(count);
    for (size_t i = 0; i < count; ++i) batch[i] = {Eigen::VectorXd::Constant(1, xyz[3 * i]), xyz[3 * i + 1], xyz[3 * i + 2]};
    const auto res = caprsoc::project_cartesian(batch, set, threads);
    for (size_t i = 0; i < count; ++i) {
      out[3 * i] = res[i].point.x[0];
      out[3 * i + 1] = res[i].point.y;
      out[3 * i + 2] = res[i].point.z;
      if (cases) cases[i] = static_cast<caprsoc_case>(res[i].kind);
    }
  });
}

caprsoc_status caprsoc_oracle_project(double u, size_t m, const double* x, double y, double z, double* x_out,
                                      double* y_out, double* z_out) {
  return guarded([&] {
    require(x_out && y_out && z_out, "output pointers must not be null");
    const caprsoc::CappedRsoc set(u, static_cast<Eigen::Index>(m));
    const auto p = caprsoc::oracle_project(make_point(m, x, y, z), set);
    Eigen::Map<Eigen::VectorXd>(x_out, static_cast<Eigen::Index>(m)) = p.x;
    *y_out = p.y;
    *z_out = p.z;
  });
}

caprsoc_status caprsoc_certificate(double u, size_t m, const double* vx, double vy, double vz, const double* px,
                                   double py, double pz, size_t samples, uint64_t seed, double* cert_out) {
  return guarded([&] {
    require(cert_out != nullptr, "output pointer must not be null");
    const caprsoc::CappedRsoc set(u, static_cast<Eigen::Index>(m));
    *cert_out = caprsoc::projection_certificate(make_point(m, vx, vy, vz), make_point(m, px, py, pz), set, samples, seed);
  });
}

caprsoc_status caprsoc_gen_points(size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer must not be null");
    const auto pts = caprsoc::gen_random_points(n, seed);
    for (size_t i = 0; i < n; ++i) {
      out[3 * i] = pts[i].x[0];
      out[3 * i + 1] = pts[i].y;
      out[3 * i + 2] = pts[i].z;
    }
  });
}

caprsoc_status caprsoc_proj_bench(const size_t* sizes, size_t nsizes, int reps, uint64_t seed, size_t cert_samples,
                                  const char* csv_path) {
  return guarded([&] {
    require(csv_path != nullptr, "csv path must not be null");
    caprsoc::ProjBenchConfig cfg;
    if (sizes && nsizes > 0) cfg.sizes.assign(sizes, sizes + nsizes);
    for (size_t n : cfg.sizes) require(n >= 1, "batch sizes must be positive");
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.cert_samples = cert_samples;
    const auto rows = caprsoc::proj_bench(cfg);
    std::ofstream out(csv_path);
    if (!out) caprsoc::fail(caprsoc::ErrorCode::Io, std::string("cannot write '") + csv_path + "'");
    caprsoc::write_proj_bench_csv(out, rows);
    if (!out) caprsoc::fail(caprsoc::ErrorCode::Io, std::string("write to '") + csv_path + "' failed");
  });
}

caprsoc_status caprsoc_problem_create(size_t t, size_t n, const double* a, const double* b, double gamma1,
                                      double gamma2, caprsoc_problem** out) {
  return guarded([&] {
    require(out && a && b, "pointers must not be null");
    auto h = std::make_unique<caprsoc_problem>();
    const auto rows = static_cast<Eigen::Index>(t), cols = static_cast<Eigen::Index>(n);
    h->problem.A = Eigen::Map<const Eigen::MatrixXd>(a, rows, cols);
    h->problem.b = Eigen::Map<const Eigen::VectorXd>(b, rows);
    h->problem.gamma1 = gamma1;
    h->problem.gamma2 = gamma2;
    caprsoc::validate(h->problem);
    *out = h.release();
  });
}

caprsoc_status caprsoc_problem_synthetic(size_t t, size_t n, size_t sparsity, double noise, uint64_t seed,
                                         double gamma1, double gamma2, caprsoc_problem** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer must not be null");
    auto h = std::make_unique<caprsoc_problem>();
    caprsoc::SynthOptions opt;
    opt.t = static_cast<Eigen::Index>(t);
    opt.n = static_cast<Eigen::Index>(n);
    opt.sparsity = static_cast<Eigen::Index>(sparsity);
    opt.noise = noise;
    opt.seed = seed;
    h->problem = caprsoc::synth_instance(opt);
    h->problem.gamma1 = gamma1;
    h->problem.gamma2 = gamma2;
    caprsoc::validate(h->problem);
    *out = h.release();
  });
}

caprsoc_status caprsoc_problem_from_csv(const char* path, const char* schema, double gamma1, double gamma2,
                                        caprsoc_problem** out) {
  return guarded([&] {
    require(out && path && schema, "pointers must not be null");
    const auto enc = caprsoc::encode_dataset(caprsoc::read_csv_file(path), caprsoc::parse_schema(schema));
    if (!enc.response) caprsoc::fail(caprsoc::ErrorCode::InvalidArgument, "schema declares no response column");
    auto h = std::make_unique<caprsoc_problem>();
    h->problem.A = enc.matrix;
    h->problem.b = *enc.response;
    h->problem.gamma1 = gamma1;
    h->problem.gamma2 = gamma2;
    h->report_json = enc.report.to_json();
    caprsoc::validate(h->problem);
    *out = h.release();
  });
}

caprsoc_status caprsoc_problem_set_consecutive_groups(caprsoc_problem* p, size_t q) {
  return guarded([&] {
    require(p != nullptr, "problem must not be null");
    p->problem.groups = caprsoc::consecutive_groups(p->problem.n(), static_cast<Eigen::Index>(q));
  });
}

caprsoc_status caprsoc_problem_dims(const caprsoc_problem* p, size_t* t, size_t* n, size_t* q) {
  return guarded([&] {
    require(p != nullptr, "problem must not be null");
    if (t) *t = static_cast<size_t>(p->problem.t());
    if (n) *n = static_cast<size_t>(p->problem.n());
    if (q) *q = static_cast<size_t>(p->problem.q());
  });
}

const char* caprsoc_problem_encoding_report(const caprsoc_problem* p) { return p ? p->report_json.c_str() : ""; }

void caprsoc_problem_free(caprsoc_problem* p) { delete p; }

void caprsoc_solver_config_default(caprsoc_solver_config* cfg) {
  if (!cfg) return;
  const caprsoc::SolverConfig d;
  cfg->method = CAPRSOC_FISTA;
  cfg->step_mode = CAPRSOC_STEP_BACKTRACKING;
  cfg->lipschitz = 0.0;
  cfg->s0 = 0.0;
  cfg->alpha = d.alpha;
  cfg->beta_pg = d.beta_pg;
  cfg->beta_fista = d.beta_fista;
  cfg->max_iter = d.max_iter;
  cfg->stop_mode = CAPRSOC_STOP_MAX_ITER;
  cfg->target = 0.0;
  cfg->rel_gap = 1e-3;
  cfg->residual_tol = 1e-8;
  cfg->seed = d.seed;
}

caprsoc_status caprsoc_solve(const caprsoc_problem* p, const caprsoc_solver_config* cfg, caprsoc_report** out) {
  return guarded([&] {
    require(p && cfg && out, "pointers must not be null");
    caprsoc::SolverConfig c;
    c.method = cfg->method == CAPRSOC_PG ? caprsoc::Method::PG : caprsoc::Method::FISTA;
    c.step_mode = cfg->step_mode == CAPRSOC_STEP_CONSTANT ? caprsoc::StepMode::Constant
                                                           : caprsoc::StepMode::Backtracking;
    if (cfg->lipschitz > 0.0) c.L = cfg->lipschitz;
    if (cfg->s0 > 0.0) c.s0 = cfg->s0;
    c.alpha = cfg->alpha;
    c.beta_pg = cfg->beta_pg;
    c.beta_fista = cfg->beta_fista;
    c.max_iter = cfg->max_iter;
    c.seed = cfg->seed;
    switch (cfg->stop_mode) {
      case CAPRSOC_STOP_OBJECTIVE_TARGET:
        c.stop.mode = caprsoc::StopMode::ObjectiveTarget;
        c.stop.target = cfg->target;
        c.stop.rel_gap = cfg->rel_gap;
        break;
      case CAPRSOC_STOP_FIXED_POINT_RESIDUAL:
        c.stop.mode = caprsoc::StopMode::FixedPointResidual;
        c.stop.residual_tol = cfg->residual_tol;
        break;
      case CAPRSOC_STOP_MAX_ITER:
        c.stop.mode = caprsoc::StopMode::MaxIter;
        break;
      default:
        caprsoc::fail(caprsoc::ErrorCode::InvalidArgument, "unknown stop mode");
    }
    auto r = std::make_unique<caprsoc_report>();
    r->report = caprsoc::solve(p->problem, c);
    *out = r.release();
  });
}

double caprsoc_report_objective(const caprsoc_report* r) { return r ? r->report.objective : 0.0; }
double caprsoc_report_residual(const caprsoc_report* r) { return r ? r->report.residual : 0.0; }
double caprsoc_report_lipschitz(const caprsoc_report* r) { return r ? r->report.lipschitz : 0.0; }
double caprsoc_report_time_ms(const caprsoc_report* r) { return r ? r->report.time_ms : 0.0; }
int caprsoc_report_iterations(const caprsoc_report* r) { return r ? r->report.iterations : 0; }

const char* caprsoc_report_termination(const caprsoc_report* r) {
  return r ? caprsoc::to_string(r->report.reason).data() : "";
}

size_t caprsoc_report_trace_length(const caprsoc_report* r) { return r ? r->report.trace.size() : 0; }

caprsoc_status caprsoc_report_trace_row(const caprsoc_report* r, size_t k, caprsoc_trace_row* row) {
  return guarded([&] {
    require(r && row, "pointers must not be null");
    require(k < r->report.trace.size(), "trace row out of range");
    const auto& t = r->report.trace[k];
    *row = {t.k, t.f, t.step, t.residual, t.time_ms};
  });
}

caprsoc_status caprsoc_report_solution(const caprsoc_report* r, double* x, size_t n) {
  return guarded([&] {
    require(r && x, "pointers must not be null");
    if (static_cast<Eigen::Index>(n) != r->report.point.x.size())
      caprsoc::fail(caprsoc::ErrorCode::DimensionMismatch, "solution has a different length");
    Eigen::Map<Eigen::VectorXd>(x, static_cast<Eigen::Index>(n)) = r->report.point.x;
  });
}

caprsoc_status caprsoc_report_write_trace_csv(const caprsoc_report* r, const char* path) {
  return guarded([&] {
    require(r && path, "pointers must not be null");
    std::ofstream out(path);
    if (!out) caprsoc::fail(caprsoc::ErrorCode::Io, std::string("cannot write '") + path + "'");
    caprsoc::write_trace_csv(out, r->report);
    if (!out) caprsoc::fail(caprsoc::ErrorCode::Io, std::string("write to '") + path + "' failed");
  });
}

void caprsoc_report_free(caprsoc_report* r) { delete r; }

}  // extern "C"
