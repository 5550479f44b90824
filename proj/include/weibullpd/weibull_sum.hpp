#pragma once

#include <span>

namespace wpd {

struct WeibullParams {
  double alpha_tilde;
  double omega_tilde;  // E[xi^alpha_tilde]
};

struct AlphaMuParams {
  double alpha;
  double mu;
  double omega;  // E[eta^alpha]
};

struct MomentSet {
  double m1, m2, m4;
};

struct FitDiagnostics {
  double residual = 0.0;
  int starts_converged = 0;
};

void validate(const WeibullParams& p);
void validate(const AlphaMuParams& q);

double weibull_moment(const WeibullParams& p, double k);
double weibull_pdf(const WeibullParams& p, double xi);
double weibull_cdf(const WeibullParams& p, double xi);

// E[eta^p] for eta the sum of independent Weibull pulses.
double sum_moment(std::span<const WeibullParams> pulses, int p);
MomentSet sum_moments(const WeibullParams& p, int n);
MomentSet sum_moments(std::span<const WeibullParams> pulses);

AlphaMuParams fit_alpha_mu(const MomentSet& m, FitDiagnostics* diag = nullptr);
AlphaMuParams fit_alpha_mu(const WeibullParams& p, int n,
                           FitDiagnostics* diag = nullptr);

// Left sides of the two ratio equations for an alpha-mu law.
double alpha_mu_ratio1(double alpha, double mu);
double alpha_mu_ratio2(double alpha, double mu);
double alpha_mu_moment(const AlphaMuParams& q, double k);

double alpha_mu_pdf(const AlphaMuParams& q, double eta);
double alpha_mu_cdf(const AlphaMuParams& q, double eta);

// Laguerre-series density of the sum of n i.i.d. pulses.
double exact_sum_pdf(const WeibullParams& p, int n, double eta,
                     double tol = 1e-6, int* terms_used = nullptr);
double exact_sum_pdf(std::span<const WeibullParams> pulses, double eta,
                     double tol = 1e-6, int* terms_used = nullptr);

}  // namespace wpd
