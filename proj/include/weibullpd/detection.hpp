#pragma once

#include <optional>
#include <string>

#include "weibullpd/weibull_sum.hpp"

namespace wpd {

struct DetectorConfig {
  int n_pulses;
  double sigma2;  // per-component noise power
  double gamma;   // threshold on T / (2 sigma2)
};

struct EvalResult {
  double value = 0.0;
  long terms_used = 0;
  double truncation_estimate = 0.0;
  double wall_time = 0.0;  // seconds
  double unclamped = 0.0;
  double imag_residue = 0.0;
};

void validate(const DetectorConfig& cfg);

double pfa(const DetectorConfig& cfg);
double threshold_for_pfa(int n, double target_pfa);
double snr_of(const WeibullParams& p, int n, double sigma2);
double omega_for_snr(double alpha_tilde, int n, double sigma2, double snr);
double pd_nonfluctuating(const DetectorConfig& cfg, double zeta);

// mu (2 sigma2)^alpha / Omega
double series_psi(const DetectorConfig& cfg, const AlphaMuParams& q);

// Reason the residue series cannot be used, if any.
std::optional<std::string> series_precondition(const DetectorConfig& cfg,
                                               const AlphaMuParams& q);

struct SeriesOptions {
  double tol = 1e-4;
  int max_fronts = 10000;
  bool reverse_fronts = false;
};

EvalResult pd_series(const DetectorConfig& cfg, const AlphaMuParams& q,
                     const SeriesOptions& opt);
EvalResult pd_series(const DetectorConfig& cfg, const AlphaMuParams& q,
                     double tol);

EvalResult pd_quadrature(const DetectorConfig& cfg, const AlphaMuParams& q);

}  // namespace wpd
