#ifndef WEIBULLPD_C_API_H
#define WEIBULLPD_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WPD_API __declspec(dllexport)
#else
#define WPD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wpd_status {
  WPD_OK = 0,
  WPD_E_POLE = 1,
  WPD_E_DOMAIN = 2,
  WPD_E_NO_CONVERGENCE = 3,
  WPD_E_OVERFLOW_GUARD = 4,
  WPD_E_SERIES_DIVERGENCE = 5,
  WPD_E_QUADRATURE_FAILURE = 6,
  WPD_E_NOT_CONVERGED = 7,
  WPD_E_NO_FEASIBLE_OFFSET = 8,
  WPD_E_IMAGINARY_RESIDUE = 9,
  WPD_E_NULL_ARGUMENT = 20,
  WPD_E_INTERNAL = 21
} wpd_status;

typedef struct wpd_context wpd_context;

typedef struct wpd_weibull {
  double alpha_tilde;
  double omega_tilde;
} wpd_weibull;

typedef struct wpd_alpha_mu {
  double alpha;
  double mu;
  double omega;
} wpd_alpha_mu;

typedef struct wpd_detector {
  int n_pulses;
  double sigma2;
  double gamma;
} wpd_detector;

typedef struct wpd_moments {
  double m1, m2, m4;
} wpd_moments;

typedef struct wpd_eval {
  double value;
  double unclamped;
  long long terms_used;
  double truncation_estimate;
  double wall_time;
  double imag_residue;
} wpd_eval;

typedef enum wpd_target_kind {
  WPD_TARGET_NONE = 0,
  WPD_TARGET_WEIBULL = 1,
  WPD_TARGET_ALPHA_MU = 2
} wpd_target_kind;

typedef struct wpd_mc_config {
  long long trials;
  uint64_t seed;
  wpd_detector detector;
  int target_kind;
  wpd_weibull weibull;
  wpd_alpha_mu alpha_mu;
  int threads;  /* 0: hardware concurrency */
} wpd_mc_config;

typedef struct wpd_mc_result {
  double estimate;
  double half_width_99;
  long long trials;
} wpd_mc_result;

WPD_API const char* wpd_version(void);
WPD_API const char* wpd_status_name(int status);

WPD_API int wpd_context_create(wpd_context** out);
WPD_API void wpd_context_destroy(wpd_context* ctx);
/* Message of the last failed call on this context, "" after success. */
WPD_API const char* wpd_last_error(const wpd_context* ctx);

WPD_API int wpd_sum_moments(wpd_context* ctx, const wpd_weibull* pulse, int n,
                            wpd_moments* out);
WPD_API int wpd_fit_alpha_mu(wpd_context* ctx, const wpd_moments* m,
                             wpd_alpha_mu* out, double* residual);

WPD_API int wpd_weibull_pdf(wpd_context* ctx, const wpd_weibull* p, double xi,
                            double* out);
WPD_API int wpd_exact_sum_pdf(wpd_context* ctx, const wpd_weibull* pulse, int n,
                              double eta, double tol, double* out, int* terms);
WPD_API int wpd_alpha_mu_pdf(wpd_context* ctx, const wpd_alpha_mu* q, double eta,
                             double* out);
WPD_API int wpd_alpha_mu_cdf(wpd_context* ctx, const wpd_alpha_mu* q, double eta,
                             double* out);

WPD_API int wpd_pfa(wpd_context* ctx, const wpd_detector* d, double* out);
WPD_API int wpd_threshold_for_pfa(wpd_context* ctx, int n, double pfa, double* out);
WPD_API int wpd_snr(wpd_context* ctx, const wpd_weibull* p, int n, double sigma2,
                    double* out);
WPD_API int wpd_omega_for_snr(wpd_context* ctx, double alpha_tilde, int n,
                              double sigma2, double snr, double* out);
WPD_API int wpd_pd_nonfluctuating(wpd_context* ctx, const wpd_detector* d,
                                  double zeta, double* out);

/* *usable = 1 if the series applies; otherwise the reason goes to buf. */
WPD_API int wpd_series_precondition(wpd_context* ctx, const wpd_detector* d,
                                    const wpd_alpha_mu* q, int* usable, char* buf,
                                    size_t buf_len);
WPD_API int wpd_pd_series(wpd_context* ctx, const wpd_detector* d,
                          const wpd_alpha_mu* q, double tol, wpd_eval* out);
WPD_API int wpd_pd_quadrature(wpd_context* ctx, const wpd_detector* d,
                              const wpd_alpha_mu* q, wpd_eval* out);
WPD_API int wpd_pd_fox(wpd_context* ctx, const wpd_detector* d, const wpd_alpha_mu* q,
                       double tol, wpd_eval* out);

WPD_API int wpd_mc_run(wpd_context* ctx, const wpd_mc_config* cfg, wpd_mc_result* out);

#ifdef __cplusplus
}
#endif

#endif
