#include "weibullpd/c_api.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

#include "weibullpd/detection.hpp"
#include "weibullpd/errors.hpp"
#include "weibullpd/fox_h.hpp"
#include "weibullpd/monte_carlo.hpp"
#include "weibullpd/weibull_sum.hpp"

struct wpd_context {
  std::string last_error;
};

namespace {

wpd::WeibullParams to_cpp(const wpd_weibull& p) { return {p.alpha_tilde, p.omega_tilde}; }
wpd::AlphaMuParams to_cpp(const wpd_alpha_mu& q) { return {q.alpha, q.mu, q.omega}; }
wpd::DetectorConfig to_cpp(const wpd_detector& d) { return {d.n_pulses, d.sigma2, d.gamma}; }

void to_c(const wpd::EvalResult& r, wpd_eval* out) {
  out->value = r.value;
  out->unclamped = r.unclamped;
  out->terms_used = r.terms_used;
  out->truncation_estimate = r.truncation_estimate;
  out->wall_time = r.wall_time;
  out->imag_residue = r.imag_residue;
}

template <class F>
int guarded(wpd_context* ctx, F&& f) {
  if (!ctx) return WPD_E_NULL_ARGUMENT;
  try {
    f();
    ctx->last_error.clear();
    return WPD_OK;
  } catch (const wpd::Error& e) {
    ctx->last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return WPD_E_INTERNAL;
  } catch (...) {
    ctx->last_error = "unknown failure";
    return WPD_E_INTERNAL;
  }
}

int null_arg(wpd_context* ctx) {
  if (ctx) ctx->last_error = "null argument";
  return WPD_E_NULL_ARGUMENT;
}

}  // namespace

extern "C" {

const char* wpd_version(void) { return "1.0.0"; }

const char* wpd_status_name(int status) {
  switch (status) {
    case WPD_E_NULL_ARGUMENT:
      return "NullArgument";
    case WPD_E_INTERNAL:
      return "Internal";
    default:
      if (status >= 0 && status <= WPD_E_IMAGINARY_RESIDUE)
        return wpd::error_name(static_cast<wpd::ErrorCode>(status));
      return "Unknown";
  }
}

int wpd_context_create(wpd_context** out) {
  if (!out) return WPD_E_NULL_ARGUMENT;
  *out = new (std::nothrow) wpd_context;
  return *out ? WPD_OK : WPD_E_INTERNAL;
}

void wpd_context_destroy(wpd_context* ctx) { delete ctx; }

const char* wpd_last_error(const wpd_context* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

int wpd_sum_moments(wpd_context* ctx, const wpd_weibull* pulse, int n, wpd_moments* out) {
  if (!pulse || !out) return null_arg(ctx);
  return guarded(ctx, [&] {
    auto m = wpd::sum_moments(to_cpp(*pulse), n);
    *out = {m.m1, m.m2, m.m4};
  });
}

int wpd_fit_alpha_mu(wpd_context* ctx, const wpd_moments* m, wpd_alpha_mu* out,
                     double* residual) {
  if (!m || !out) return null_arg(ctx);
  return guarded(ctx, [&] {
    wpd::FitDiagnostics diag;
    auto q = wpd::fit_alpha_mu(wpd::MomentSet{m->m1, m->m2, m->m4}, &diag);
    *out = {q.alpha, q.mu, q.omega};
    if (residual) *residual = diag.residual;
  });
}

int wpd_weibull_pdf(wpd_context* ctx, const wpd_weibull* p, double xi, double* out) {
  if (!p || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::weibull_pdf(to_cpp(*p), xi); });
}

int wpd_exact_sum_pdf(wpd_context* ctx, const wpd_weibull* pulse, int n, double eta,
                      double tol, double* out, int* terms) {
  if (!pulse || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::exact_sum_pdf(to_cpp(*pulse), n, eta, tol, terms); });
}

int wpd_alpha_mu_pdf(wpd_context* ctx, const wpd_alpha_mu* q, double eta, double* out) {
  if (!q || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::alpha_mu_pdf(to_cpp(*q), eta); });
}

int wpd_alpha_mu_cdf(wpd_context* ctx, const wpd_alpha_mu* q, double eta, double* out) {
  if (!q || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::alpha_mu_cdf(to_cpp(*q), eta); });
}

int wpd_pfa(wpd_context* ctx, const wpd_detector* d, double* out) {
  if (!d || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::pfa(to_cpp(*d)); });
}

int wpd_threshold_for_pfa(wpd_context* ctx, int n, double pfa, double* out) {
  if (!out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::threshold_for_pfa(n, pfa); });
}

int wpd_snr(wpd_context* ctx, const wpd_weibull* p, int n, double sigma2, double* out) {
  if (!p || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::snr_of(to_cpp(*p), n, sigma2); });
}

int wpd_omega_for_snr(wpd_context* ctx, double alpha_tilde, int n, double sigma2,
                      double snr, double* out) {
  if (!out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::omega_for_snr(alpha_tilde, n, sigma2, snr); });
}

int wpd_pd_nonfluctuating(wpd_context* ctx, const wpd_detector* d, double zeta,
                          double* out) {
  if (!d || !out) return null_arg(ctx);
  return guarded(ctx, [&] { *out = wpd::pd_nonfluctuating(to_cpp(*d), zeta); });
}

int wpd_series_precondition(wpd_context* ctx, const wpd_detector* d,
                            const wpd_alpha_mu* q, int* usable, char* buf,
                            size_t buf_len) {
  if (!d || !q || !usable) return null_arg(ctx);
  return guarded(ctx, [&] {
    auto why = wpd::series_precondition(to_cpp(*d), to_cpp(*q));
    *usable = why ? 0 : 1;
    if (buf && buf_len > 0) {
      std::string s = why ? *why : "";
      std::size_t k = std::min(s.size(), buf_len - 1);
      std::memcpy(buf, s.data(), k);
      buf[k] = '\0';
    }
  });
}

int wpd_pd_series(wpd_context* ctx, const wpd_detector* d, const wpd_alpha_mu* q,
                  double tol, wpd_eval* out) {
  if (!d || !q || !out) return null_arg(ctx);
  return guarded(ctx, [&] { to_c(wpd::pd_series(to_cpp(*d), to_cpp(*q), tol), out); });
}

int wpd_pd_quadrature(wpd_context* ctx, const wpd_detector* d, const wpd_alpha_mu* q,
                      wpd_eval* out) {
  if (!d || !q || !out) return null_arg(ctx);
  return guarded(ctx, [&] { to_c(wpd::pd_quadrature(to_cpp(*d), to_cpp(*q)), out); });
}

int wpd_pd_fox(wpd_context* ctx, const wpd_detector* d, const wpd_alpha_mu* q,
               double tol, wpd_eval* out) {
  if (!d || !q || !out) return null_arg(ctx);
  return guarded(ctx, [&] { to_c(wpd::fox::pd_fox(to_cpp(*d), to_cpp(*q), tol), out); });
}

int wpd_mc_run(wpd_context* ctx, const wpd_mc_config* cfg, wpd_mc_result* out) {
  if (!cfg || !out) return null_arg(ctx);
  return guarded(ctx, [&] {
    wpd::mc::SimConfig sim;
    sim.trials = static_cast<long>(cfg->trials);
    sim.seed = cfg->seed;
    sim.cfg = to_cpp(cfg->detector);
    sim.threads = cfg->threads;
    switch (cfg->target_kind) {
      case WPD_TARGET_NONE:
        break;
      case WPD_TARGET_WEIBULL:
        sim.target = to_cpp(cfg->weibull);
        break;
      case WPD_TARGET_ALPHA_MU:
        sim.target = to_cpp(cfg->alpha_mu);
        break;
      default:
        throw wpd::DomainError("unknown target kind");
    }
    auto r = wpd::mc::run(sim);
    *out = {r.estimate, r.half_width_99, r.trials};
  });
}

}  // extern "C"
