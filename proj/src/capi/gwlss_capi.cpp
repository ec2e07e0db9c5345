#include "gwlss/gwlss.h"

#include <cstdlib>
#include <cstring>
#include <functional>
#include <memory>
#include <new>
#include <string>

#include "gwlss/commands.hpp"
#include "gwlss/config.hpp"
#include "gwlss/ensemble.hpp"
#include "gwlss/error.hpp"
#include "gwlss/functionals.hpp"
#include "gwlss/harness.hpp"
#include "gwlss/io.hpp"
#include "gwlss/profile.hpp"
#include "gwlss/testfn.hpp"

struct gwlss_profile {
  std::shared_ptr<const gwlss::VarianceProfile> p;
};

struct gwlss_testfn {
  gwlss::TestFunction f;
};

struct gwlss_ensemble {
  gwlss::EnsembleSpec spec;
};

struct gwlss_experiment {
  gwlss::ExperimentConfig cfg;
  bool progress = false;
};

namespace {

thread_local std::string g_last_error;

gwlss_status status_for(gwlss::ErrorKind k) {
  switch (k) {
    case gwlss::ErrorKind::InvalidArgument:
      return GWLSS_ERR_INVALID_ARGUMENT;
    case gwlss::ErrorKind::Config:
      return GWLSS_ERR_CONFIG;
    case gwlss::ErrorKind::Numerical:
      return GWLSS_ERR_NUMERICAL;
    case gwlss::ErrorKind::Io:
      return GWLSS_ERR_IO;
  }
  return GWLSS_ERR_INTERNAL;
}

template <class F>
gwlss_status guarded(F&& body) {
  try {
    body();
    return GWLSS_OK;
  } catch (const gwlss::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return GWLSS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GWLSS_ERR_INTERNAL;
  }
}

gwlss_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return GWLSS_ERR_INVALID_ARGUMENT;
}

gwlss::EntryDistribution family(gwlss_family f, double p) {
  switch (f) {
    case GWLSS_GAUSSIAN:
      return gwlss::EntryDistribution::gaussian();
    case GWLSS_RADEMACHER:
      return gwlss::EntryDistribution::rademacher();
    case GWLSS_TWO_POINT:
      return gwlss::EntryDistribution::two_point(p);
    case GWLSS_UNIFORM:
      return gwlss::EntryDistribution::uniform();
  }
  gwlss::fail(gwlss::ErrorKind::InvalidArgument, "unknown entry family");
}

Eigen::MatrixXd from_row_major(const double* s, long n) {
  gwlss::require(n >= 2, "matrix size must be >= 2");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      s, n, n);
}

gwlss_status wrap_profile(gwlss_profile** out, const std::function<gwlss::VarianceProfile()>& make) {
  if (!out) return null_arg("out");
  return guarded([&] {
    auto h = std::make_unique<gwlss_profile>();
    h->p = std::make_shared<const gwlss::VarianceProfile>(make());
    *out = h.release();
  });
}

void fill_report(const gwlss::ProfileReport& r, gwlss_profile_report* out) {
  out->row_sum_err = r.row_sum_err;
  out->min_entry_n = r.min_entry_n;
  out->max_entry_n = r.max_entry_n;
  out->spectral_gap = r.spectral_gap;
}

}  // namespace

extern "C" {

const char* gwlss_last_error(void) { return g_last_error.c_str(); }

const char* gwlss_version(void) { return "0.1.0"; }

void gwlss_string_free(char* s) { std::free(s); }

gwlss_status gwlss_profile_flat(long n, gwlss_profile** out) {
  return wrap_profile(out, [&] { return gwlss::profile_flat(n); });
}

gwlss_status gwlss_profile_band(long n, long w, gwlss_profile** out) {
  return wrap_profile(out, [&] { return gwlss::profile_band(n, w); });
}

gwlss_status gwlss_profile_random(long n, uint64_t seed, double roughness, gwlss_profile** out) {
  return wrap_profile(out, [&] { return gwlss::profile_random_ds(n, seed, roughness); });
}

gwlss_status gwlss_profile_from_matrix(const double* s, long n, gwlss_profile** out) {
  if (!s) return null_arg("s");
  return wrap_profile(out, [&] { return gwlss::VarianceProfile(from_row_major(s, n)); });
}

gwlss_status gwlss_profile_read_csv(const char* path, gwlss_profile** out) {
  if (!path) return null_arg("path");
  return wrap_profile(out, [&] {
    gwlss::ProfileDescriptor d{"matrix"};
    d.path = path;
    return gwlss::profile_from_descriptor(d);
  });
}

gwlss_status gwlss_profile_write_csv(const gwlss_profile* p, const char* path) {
  if (!p || !path) return null_arg("profile/path");
  return guarded([&] { gwlss::write_text(path, gwlss::matrix_csv(p->p->matrix())); });
}

void gwlss_profile_free(gwlss_profile* p) { delete p; }

long gwlss_profile_size(const gwlss_profile* p) { return p ? p->p->size() : 0; }

gwlss_status gwlss_profile_get_report(const gwlss_profile* p, gwlss_profile_report* out) {
  if (!p || !out) return null_arg("profile/out");
  fill_report(p->p->report(), out);
  return GWLSS_OK;
}

gwlss_status gwlss_profile_matrix(const gwlss_profile* p, double* out) {
  if (!p || !out) return null_arg("profile/out");
  const auto& S = p->p->matrix();
  const long n = p->p->size();
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out[i * n + j] = S(i, j);
  return GWLSS_OK;
}

gwlss_status gwlss_profile_trace_powers(const gwlss_profile* p, int J, double* out) {
  if (!p || !out) return null_arg("profile/out");
  return guarded([&] {
    const auto tr = p->p->trace_powers(J);
    std::memcpy(out, tr.data(), sizeof(double) * tr.size());
  });
}

gwlss_status gwlss_profile_resolvent_trace(const gwlss_profile* p, double m_re, double m_im,
                                           double* out_re, double* out_im) {
  if (!p || !out_re || !out_im) return null_arg("profile/out");
  return guarded([&] {
    const auto v = p->p->resolvent_trace({m_re, m_im});
    *out_re = v.real();
    *out_im = v.imag();
  });
}

gwlss_status gwlss_validate_matrix(const double* s, long n, gwlss_profile_report* out) {
  if (!s || !out) return null_arg("s/out");
  return guarded([&] { fill_report(gwlss::validate(from_row_major(s, n)), out); });
}

gwlss_status gwlss_testfn_parse(const char* descriptor, gwlss_testfn** out) {
  if (!descriptor || !out) return null_arg("descriptor/out");
  return guarded([&] { *out = new gwlss_testfn{gwlss::TestFunction::parse(descriptor)}; });
}

void gwlss_testfn_free(gwlss_testfn* f) { delete f; }

gwlss_status gwlss_testfn_eval(const gwlss_testfn* f, double x, double* out) {
  if (!f || !out) return null_arg("testfn/out");
  return guarded([&] { *out = f->f(x); });
}

gwlss_status gwlss_testfn_cheb_coeffs(const gwlss_testfn* f, int J, double* out,
                                      double* tail_estimate) {
  if (!f || !out) return null_arg("testfn/out");
  return guarded([&] {
    const auto c = gwlss::cheb_coeffs(f->f, J, std::max(2048, 2 * J));
    std::memcpy(out, c.t.data(), sizeof(double) * c.t.size());
    if (tail_estimate) *tail_estimate = c.tail_estimate;
  });
}

gwlss_status gwlss_ensemble_create(const gwlss_profile* p, int beta, gwlss_family offdiag,
                                   double offdiag_p, gwlss_family diag, double diag_p,
                                   gwlss_ensemble** out) {
  if (!p || !out) return null_arg("profile/out");
  return guarded([&] {
    gwlss::EnsembleSpec spec;
    spec.beta = beta;
    spec.profile = p->p;
    spec.offdiag = family(offdiag, offdiag_p);
    spec.diag = family(diag, diag_p);
    spec.check();
    *out = new gwlss_ensemble{spec};
  });
}

void gwlss_ensemble_free(gwlss_ensemble* e) { delete e; }

gwlss_status gwlss_predict(const gwlss_ensemble* e, const gwlss_testfn* f, int with_integral,
                           gwlss_prediction* out) {
  if (!e || !f || !out) return null_arg("ensemble/testfn/out");
  return guarded([&] {
    gwlss::PredictOptions opt;
    opt.with_integral = with_integral != 0;
    const auto p = gwlss::predict(f->f, e->spec, opt);
    *out = gwlss_prediction{p.V,          p.E,           p.B,          p.beta,
                            p.J,          p.tail_estimate, p.tail_warning, p.has_integral,
                            p.V_integral, p.paths_agree};
  });
}

gwlss_status gwlss_simulate_lss(const gwlss_ensemble* e, const gwlss_testfn* f, uint64_t seed,
                                long replicas, int threads, double* out) {
  if (!e || !f || !out) return null_arg("ensemble/testfn/out");
  return guarded([&] {
    gwlss::RunConfig rc;
    rc.spec = e->spec;
    rc.fns = {f->f};
    rc.replicas = replicas;
    rc.master_seed = seed;
    rc.threads = threads;
    rc.attach_prediction = false;
    rc.lambda_grid.clear();
    const auto r = gwlss::run_ensemble(rc);
    std::memcpy(out, r.functions[0].samples.data(), sizeof(double) * replicas);
  });
}

gwlss_status gwlss_experiment_load(const char* path, const gwlss_overrides* overrides,
                                   gwlss_experiment** out) {
  if (!path || !out) return null_arg("path/out");
  return guarded([&] {
    auto x = std::make_unique<gwlss_experiment>();
    gwlss::CommandOptions opt;
    if (overrides) {
      if (overrides->has_seed) opt.seed = overrides->seed;
      if (overrides->threads >= 0) opt.threads = overrides->threads;
      if (overrides->replicas > 0) opt.replicas = overrides->replicas;
      if (overrides->out_dir) opt.out_dir = overrides->out_dir;
      opt.quick = overrides->quick != 0;
      x->progress = overrides->progress != 0;
    }
    x->cfg = gwlss::apply_overrides(gwlss::load_config(path), opt);
    *out = x.release();
  });
}

void gwlss_experiment_free(gwlss_experiment* x) { delete x; }

gwlss_status gwlss_experiment_run(gwlss_experiment* x, const char* command, char** report) {
  if (!x || !command || !report) return null_arg("experiment/command/report");
  *report = nullptr;
  int code = 0;
  const gwlss_status st = guarded([&] {
    const auto res = gwlss::run_command(command, x->cfg, x->progress);
    code = res.status;
    *report = static_cast<char*>(std::malloc(res.report.size() + 1));
    if (!*report) throw std::bad_alloc();
    std::memcpy(*report, res.report.c_str(), res.report.size() + 1);
  });
  if (st != GWLSS_OK) return st;
  return code == gwlss::kExitVerifyFailed ? GWLSS_VERIFY_FAILED : GWLSS_OK;
}

}  // extern "C"
