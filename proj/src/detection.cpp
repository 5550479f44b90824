#include "weibullpd/detection.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "weibullpd/errors.hpp"
#include "weibullpd/quadrature.hpp"
#include "weibullpd/special_functions.hpp"
#include "weibullpd/summation.hpp"

namespace wpd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kUnitAlphaBand = 1e-9;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// log of the regularized lower incomplete gamma, without underflow
double ln_regularized_p(double a, double x) {
  if (x == 0.0) return -INFINITY;
  if (x >= a + 1.0) return std::log(regularized_p(a, x));
  double ap = a, del = 1.0 / a, sum = del;
  for (int i = 0; i < 1000000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (del < sum * 1e-17) break;
  }
  return std::log(sum) - x + a * std::log(x) - ln_gamma(a);
}

}  // namespace

void validate(const DetectorConfig& cfg) {
  if (cfg.n_pulses < 1) throw DomainError("pulse count must be positive");
  if (!(cfg.sigma2 > 0.0) || !std::isfinite(cfg.sigma2))
    throw DomainError("noise power must be positive");
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma))
    throw DomainError("threshold must be non-negative");
}

double pfa(const DetectorConfig& cfg) {
  validate(cfg);
  return regularized_q(cfg.n_pulses, cfg.gamma);
}

double threshold_for_pfa(int n, double target_pfa) {
  if (n < 1) throw DomainError("pulse count must be positive");
  if (!(target_pfa > 0.0 && target_pfa <= 1.0))
    throw DomainError("target PFA must lie in (0, 1]");
  return inverse_regularized_q(n, target_pfa);
}

double snr_of(const WeibullParams& p, int n, double sigma2) {
  validate(p);
  if (n < 1) throw DomainError("pulse count must be positive");
  if (!(sigma2 > 0.0)) throw DomainError("noise power must be positive");
  return n * weibull_moment(p, 1.0) / (2.0 * sigma2);
}

double omega_for_snr(double alpha_tilde, int n, double sigma2, double snr) {
  if (!(alpha_tilde > 0.0)) throw DomainError("shape must be positive");
  if (n < 1) throw DomainError("pulse count must be positive");
  if (!(sigma2 > 0.0)) throw DomainError("noise power must be positive");
  if (!(snr > 0.0)) throw DomainError("SNR must be positive");
  double mean = 2.0 * sigma2 * snr / n;
  return std::exp(alpha_tilde *
                  (std::log(mean) - ln_gamma(1.0 + 1.0 / alpha_tilde)));
}

double pd_nonfluctuating(const DetectorConfig& cfg, double zeta) {
  validate(cfg);
  if (!(zeta >= 0.0)) throw DomainError("zeta must be non-negative");
  return marcum_q(cfg.n_pulses, std::sqrt(2.0 * zeta), std::sqrt(2.0 * cfg.gamma));
}

double series_psi(const DetectorConfig& cfg, const AlphaMuParams& q) {
  return q.mu * std::pow(2.0 * cfg.sigma2, q.alpha) / q.omega;
}

std::optional<std::string> series_precondition(const DetectorConfig& cfg,
                                               const AlphaMuParams& q) {
  if (!(cfg.gamma > 0.0)) return "series requires gamma > 0";
  if (q.alpha > 1.0 + kUnitAlphaBand)
    return "series diverges for fitted alpha > 1";
  return std::nullopt;
}

EvalResult pd_series(const DetectorConfig& cfg, const AlphaMuParams& q,
                     const SeriesOptions& opt) {
  const auto t0 = Clock::now();
  validate(cfg);
  validate(q);
  if (!(opt.tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!(cfg.gamma > 0.0)) throw DomainError("series requires gamma > 0");
  if (q.alpha > 1.0 + kUnitAlphaBand)
    throw SeriesDivergence("k-series diverges for alpha > 1");

  const int n = cfg.n_pulses;
  const double psi = series_psi(cfg, q);
  const double lpsi = std::log(psi);
  const bool unit_alpha = std::fabs(q.alpha - 1.0) <= kUnitAlphaBand;
  const double lpre = std::log(q.alpha) + q.mu * lpsi - ln_gamma(q.mu);
  const double l1psi = std::log1p(psi);

  // P = 1 - pre * sum_{k,l} P(l+N, gamma) Gamma(l + k alpha + alpha mu)
  //                         (-psi)^k / (k! l!)
  std::vector<double> lp;  // ln P(l+N, gamma) / l!
  auto lp_at = [&](int l) {
    while (static_cast<int>(lp.size()) <= l) {
      int ll = static_cast<int>(lp.size());
      lp.push_back(ln_regularized_p(n + ll, cfg.gamma) - ln_gamma(ll + 1.0));
    }
    return lp[l];
  };

  NeumaierSum total;
  EvalResult r;
  int quiet = 0;
  double l1 = 0.0;  // sum of |terms|, for the roundoff bound
  for (int f = 0; f < opt.max_fronts; ++f) {
    NeumaierSum front;
    if (unit_alpha) {
      // k-sum in closed form: Gamma(l+mu) (1+psi)^-(l+mu)
      double t = std::exp(lpre + lp_at(f) + ln_gamma(f + q.mu) - (f + q.mu) * l1psi);
      front.add(t);
      l1 += t;
      r.terms_used += 1;
    } else {
      for (int i = 0; i <= f; ++i) {
        int k = opt.reverse_fronts ? f - i : i;
        int l = f - k;
        double lt = lpre + lp_at(l) + ln_gamma(l + k * q.alpha + q.alpha * q.mu) +
                    k * lpsi - ln_gamma(k + 1.0);
        double t = std::exp(lt);
        front.add(k % 2 ? -t : t);
        l1 += t;
      }
      r.terms_used += f + 1;
    }
    double fv = front.value();
    if (!std::isfinite(fv) || std::fabs(fv) > 1e12)
      throw NoConvergence("residue series terms grow without bound");
    if (kEps * l1 >= 1.0)
      throw NoConvergence("residue series cancellation leaves no significant digits");
    total.add(fv);
    double partial = 1.0 - total.value();
    r.truncation_estimate = std::fabs(fv);
    if (std::fabs(fv) < opt.tol * std::fabs(partial))
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 3) {
      if (64.0 * kEps * l1 > opt.tol * std::fabs(partial))
        throw NoConvergence("residue series lost its accuracy to cancellation");
      r.unclamped = partial;
      r.value = std::clamp(partial, 0.0, 1.0);
      r.wall_time = seconds_since(t0);
      return r;
    }
  }
  throw NoConvergence("residue series did not settle within the front budget");
}

EvalResult pd_series(const DetectorConfig& cfg, const AlphaMuParams& q,
                     double tol) {
  SeriesOptions opt;
  opt.tol = tol;
  return pd_series(cfg, q, opt);
}

EvalResult pd_quadrature(const DetectorConfig& cfg, const AlphaMuParams& q) {
  const auto t0 = Clock::now();
  validate(cfg);
  validate(q);
  EvalResult r;
  if (cfg.gamma == 0.0) {
    r.value = r.unclamped = 1.0;
    r.wall_time = seconds_since(t0);
    return r;
  }
  // u = mu (2 sigma2 zeta)^alpha / Omega ~ Gamma(mu, 1); integrate in w = ln u
  const int n = cfg.n_pulses;
  const double b = std::sqrt(2.0 * cfg.gamma);
  const double lgm = ln_gamma(q.mu);
  auto integrand = [&](double w) {
    double u = std::exp(w);
    double lg = q.mu * w - u - lgm;
    if (lg < -745.0) return 0.0;
    double zeta = std::pow(u * q.omega / q.mu, 1.0 / q.alpha) / (2.0 * cfg.sigma2);
    return marcum_q(n, std::sqrt(2.0 * zeta), b) * std::exp(lg);
  };

  const double w_lo = (std::log(1e-13) + ln_gamma(q.mu + 1.0)) / q.mu;
  const double w_hi = std::log(inverse_regularized_q(q.mu, 1e-14));
  std::vector<double> breaks{w_lo, w_hi};
  auto add_break = [&](double u) {
    if (u > 0.0 && std::log(u) > w_lo && std::log(u) < w_hi)
      breaks.push_back(std::log(u));
  };
  add_break(q.mu - 1.0 / q.alpha);  // density mode
  add_break(q.mu);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  constexpr long kBudget = 1000000;
  auto res = quad::integrate(integrand, breaks, 1e-8, 0.0, kBudget);
  if (!res.converged)
    throw QuadratureFailure("PD quadrature exhausted its evaluation budget");
  r.unclamped = res.value;
  r.value = std::clamp(res.value, 0.0, 1.0);
  r.terms_used = res.evaluations;
  r.truncation_estimate = res.error;
  r.wall_time = seconds_since(t0);
  return r;
}

}  // namespace wpd
