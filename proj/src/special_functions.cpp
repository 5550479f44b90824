#include "weibullpd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "weibullpd/errors.hpp"

namespace wpd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kTailCut = 1e-17;

// Lanczos coefficients, g = 671/128.
constexpr double kLanczos[14] = {
    57.1562356658629235,     -59.5979603554754912,
    14.1360979747417471,     -0.491913816097620199,
    .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,
    -.210264441724104883e-3, .217439618115212643e-3,
    -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

Complex ln_gamma_right(Complex z) {
  Complex tmp = z + 5.24218750000000000;
  tmp = (z + 0.5) * std::log(tmp) - tmp;
  Complex ser = 0.999999999999997092;
  Complex y = z;
  for (double c : kLanczos) {
    y += 1.0;
    ser += c / y;
  }
  return tmp + std::log(2.5066282746310005 * ser) - std::log(z);
}

// log sin(pi z) continued analytically from the upper half plane.
Complex log_sin_pi_upper(Complex z) {
  const Complex i(0.0, 1.0);
  Complex e = std::exp(2.0 * kPi * i * z);
  return -i * kPi * z + std::log(1.0 - e) - std::log(2.0) + i * (kPi / 2);
}

double log_prefactor(double a, double x) {
  return -x + a * std::log(x) - ln_gamma(a);
}

double p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 1000000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps)
      return sum * std::exp(log_prefactor(a, x));
  }
  throw NoConvergence("incomplete gamma series did not converge");
}

double q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      return std::exp(log_prefactor(a, x)) * h;
  }
  throw NoConvergence("incomplete gamma continued fraction did not converge");
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw DomainError("incomplete gamma requires a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma requires x >= 0");
}

}  // namespace

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::pole: return "PoleError";
    case ErrorCode::domain: return "DomainError";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::overflow_guard: return "OverflowGuard";
    case ErrorCode::series_divergence: return "SeriesDivergence";
    case ErrorCode::quadrature_failure: return "QuadratureFailure";
    case ErrorCode::not_converged: return "NotConverged";
    case ErrorCode::no_feasible_offset: return "NoFeasibleOffset";
    case ErrorCode::imaginary_residue: return "ImaginaryResidue";
  }
  return "Unknown";
}

Complex ln_gamma(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("ln_gamma of non-finite argument");
  if (std::fabs(z.imag()) < 1e-12 && z.real() <= 0.5) {
    double r = std::round(z.real());
    if (r <= 0.0 && std::fabs(z.real() - r) < 1e-12)
      throw PoleError("ln_gamma at a non-positive integer");
  }
  if (z.real() >= 0.5) return ln_gamma_right(z);
  if (z.imag() < 0.0) return std::conj(ln_gamma(std::conj(z)));
  // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
  return std::log(kPi) - log_sin_pi_upper(z) - ln_gamma_right(1.0 - z);
}

double ln_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double regularized_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - p_series(a, x);
  return q_fraction(a, x);
}

double regularized_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return p_series(a, x);
  return 1.0 - q_fraction(a, x);
}

double upper_gamma(double a, double x) {
  check_gamma_args(a, x);
  return std::exp(ln_gamma(a)) * regularized_q(a, x);
}

double inverse_regularized_q(double a, double p) {
  if (!(a > 0.0)) throw DomainError("inverse_regularized_q requires a > 0");
  if (!(p > 0.0 && p <= 1.0))
    throw DomainError("inverse_regularized_q requires p in (0, 1]");
  if (p == 1.0) return 0.0;

  double lo = 0.0;
  double hi = std::max(1.0, a);
  while (regularized_q(a, hi) > p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NoConvergence("inverse_regularized_q bracket failed");
  }
  const double lp = std::log(p);
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    double q = regularized_q(a, x);
    if (q > p)
      lo = x;
    else
      hi = x;
    if (q == p) return x;
    double xn;
    if (q > 0.0) {
      // Newton on log Q
      double dlq = -std::exp(log_prefactor(a, x) - std::log(x)) / q;
      xn = x - (std::log(q) - lp) / dlq;
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    } else {
      xn = 0.5 * (lo + hi);
    }
    if (std::fabs(xn - x) <= 4 * kEps * xn || hi - lo <= 4 * kEps * hi)
      return xn;
    x = xn;
  }
  return x;
}

double kummer_1f1(double a, double b, double z) {
  if (b <= 0.0 && std::fabs(b - std::round(b)) < 1e-12)
    throw PoleError("kummer_1f1 with b a non-positive integer");
  if (z == 0.0) return 1.0;
  if (z < 0.0) return std::exp(z) * kummer_1f1(b - a, b, -z);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < 100000; ++k) {
    term *= (a + k) / (b + k) * z / (k + 1);
    sum += term;
    if (term == 0.0 || std::fabs(term) < kEps * std::fabs(sum)) return sum;
  }
  throw NoConvergence("kummer_1f1 series did not converge");
}

double marcum_q(int n, double a, double b) {
  if (n < 1) throw DomainError("marcum_q order must be positive");
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("marcum_q needs a, b >= 0");
  if (b == 0.0) return 1.0;
  const double lambda = 0.5 * a * a;
  const double x = 0.5 * b * b;
  if (lambda == 0.0) return regularized_q(n, x);
  const double lnx = std::log(x);
  const double lnl = std::log(lambda);

  // Poisson(lambda) upper tail beyond k, bounded geometrically once k > lambda
  auto log_pois = [&](int k) { return -lambda + k * lnl - ln_gamma(k + 1.0); };
  auto pois_tail_small = [&](int k) {
    double m = k + 1.0;
    if (m + 1.0 <= lambda) return false;
    return log_pois(k + 1) + std::log((m + 1.0) / (m + 1.0 - lambda)) <
           std::log(kTailCut);
  };

  if (n + lambda > x) {
    // complement: 1 - Q = sum_k pois(k) P(n+k, x), P decreasing in k
    auto p_small = [&](int k) {
      double m = n + k + 1.0;
      if (m + 1.0 <= x) return false;
      return m * lnx - x - ln_gamma(m + 1.0) +
                 std::log((m + 1.0) / (m + 1.0 - x)) <
             std::log(kTailCut);
    };
    int kmax = 0;
    while (!p_small(kmax) && !pois_tail_small(kmax)) ++kmax;
    double pk = regularized_p(n + kmax, x);
    double s = 0.0;
    for (int k = kmax; k >= 0; --k) {
      s += std::exp(log_pois(k)) * pk;
      double am1 = n + k - 1.0;
      if (k > 0) pk += std::exp(am1 * lnx - x - ln_gamma(am1 + 1.0));
    }
    return std::clamp(1.0 - s, 0.0, 1.0);
  }

  double qk = regularized_q(n, x);
  double lp = -lambda;
  double s = 0.0;
  for (int k = 0;; ++k) {
    s += std::exp(lp) * qk;
    if (k > lambda && pois_tail_small(k)) break;
    double am = n + k;
    qk += std::exp(am * lnx - x - ln_gamma(am + 1.0));
    qk = std::min(qk, 1.0);
    lp += lnl - std::log(k + 1.0);
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace wpd
