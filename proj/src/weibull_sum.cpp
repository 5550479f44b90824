#include "weibullpd/weibull_sum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "weibullpd/errors.hpp"
#include "weibullpd/special_functions.hpp"
#include "weibullpd/summation.hpp"

namespace wpd {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

double log_weibull_moment(const WeibullParams& p, double k) {
  return k / p.alpha_tilde * std::log(p.omega_tilde) +
         ln_gamma(1.0 + k / p.alpha_tilde);
}

double log_binomial(int n, int k) {
  return ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
}

double log_add(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

}  // namespace

void validate(const WeibullParams& p) {
  if (!positive_finite(p.alpha_tilde) || !positive_finite(p.omega_tilde))
    throw DomainError("Weibull parameters must be positive and finite");
}

void validate(const AlphaMuParams& q) {
  if (!positive_finite(q.alpha) || !positive_finite(q.mu) ||
      !positive_finite(q.omega))
    throw DomainError("alpha-mu parameters must be positive and finite");
}

double weibull_moment(const WeibullParams& p, double k) {
  validate(p);
  if (!(k >= 0.0)) throw DomainError("moment order must be >= 0");
  if (k == 0.0) return 1.0;
  return std::exp(log_weibull_moment(p, k));
}

double weibull_pdf(const WeibullParams& p, double xi) {
  validate(p);
  if (xi < 0.0) return 0.0;
  if (xi == 0.0) {
    if (p.alpha_tilde < 1.0) return INFINITY;
    return p.alpha_tilde == 1.0 ? 1.0 / p.omega_tilde : 0.0;
  }
  double t = std::pow(xi, p.alpha_tilde) / p.omega_tilde;
  return p.alpha_tilde * t / xi * std::exp(-t);
}

double weibull_cdf(const WeibullParams& p, double xi) {
  validate(p);
  if (xi <= 0.0) return 0.0;
  return -std::expm1(-std::pow(xi, p.alpha_tilde) / p.omega_tilde);
}

double sum_moment(std::span<const WeibullParams> pulses, int p) {
  if (pulses.empty()) throw DomainError("at least one pulse required");
  if (p < 0) throw DomainError("moment order must be >= 0");
  for (const auto& w : pulses) validate(w);
  const int n = static_cast<int>(pulses.size());

  if (static_cast<long>(n) * p < 60) {
    // E[(S + xi)^q] = sum_j C(q, j) E[S^j] E[xi^(q-j)]
    std::vector<double> s(p + 1, 0.0);
    s[0] = 1.0;
    for (const auto& w : pulses) {
      std::vector<double> next(p + 1, 0.0);
      for (int q = 0; q <= p; ++q)
        for (int j = 0; j <= q; ++j)
          next[q] += std::exp(log_binomial(q, j)) * s[j] *
                     weibull_moment(w, q - j);
      s = std::move(next);
    }
    if (!std::isfinite(s[p]))
      throw OverflowGuard("moment of the pulse sum overflows");
    return s[p];
  }

  std::vector<double> ls(p + 1, -INFINITY);
  ls[0] = 0.0;
  for (const auto& w : pulses) {
    std::vector<double> next(p + 1, -INFINITY);
    for (int q = 0; q <= p; ++q)
      for (int j = 0; j <= q; ++j)
        next[q] = log_add(next[q], log_binomial(q, j) + ls[j] +
                                       log_weibull_moment(w, q - j));
    ls = std::move(next);
  }
  if (ls[p] > std::log(std::numeric_limits<double>::max()))
    throw OverflowGuard("moment of the pulse sum overflows");
  return std::exp(ls[p]);
}

MomentSet sum_moments(std::span<const WeibullParams> pulses) {
  return {sum_moment(pulses, 1), sum_moment(pulses, 2), sum_moment(pulses, 4)};
}

MomentSet sum_moments(const WeibullParams& p, int n) {
  if (n < 1) throw DomainError("pulse count must be positive");
  std::vector<WeibullParams> pulses(n, p);
  return sum_moments(pulses);
}

double alpha_mu_ratio1(double alpha, double mu) {
  double d = ln_gamma(mu) + ln_gamma(mu + 2 / alpha) -
             2 * ln_gamma(mu + 1 / alpha);
  return 1.0 / std::expm1(d);
}

double alpha_mu_ratio2(double alpha, double mu) {
  double d = ln_gamma(mu) + ln_gamma(mu + 4 / alpha) -
             2 * ln_gamma(mu + 2 / alpha);
  return 1.0 / std::expm1(d);
}

double alpha_mu_moment(const AlphaMuParams& q, double k) {
  validate(q);
  return std::exp(k / q.alpha * std::log(q.omega / q.mu) +
                  ln_gamma(q.mu + k / q.alpha) - ln_gamma(q.mu));
}

namespace {

struct FitState {
  double x, y;  // log alpha, log mu
  std::array<double, 2> f;
  double norm;
};

constexpr double kLogAlphaMin = -7.0, kLogAlphaMax = 7.0;
constexpr double kLogMuMin = -9.0, kLogMuMax = 14.0;

// Residuals log(model ratio / target ratio) and their Jacobian in (x, y).
void residuals(double x, double y, double lr1, double lr2,
               std::array<double, 2>& f, std::array<double, 4>* jac) {
  const double a = std::exp(x), m = std::exp(y);
  const double d1 = ln_gamma(m) + ln_gamma(m + 2 / a) - 2 * ln_gamma(m + 1 / a);
  const double d2 = ln_gamma(m) + ln_gamma(m + 4 / a) - 2 * ln_gamma(m + 2 / a);
  f[0] = -std::log(std::expm1(d1)) - lr1;
  f[1] = -std::log(std::expm1(d2)) - lr2;
  if (!jac) return;
  using boost::math::digamma;
  const double p0 = digamma(m), p1 = digamma(m + 1 / a),
               p2 = digamma(m + 2 / a), p4 = digamma(m + 4 / a);
  const double g1 = 1.0 / std::expm1(-d1);  // dF/dd
  const double g2 = 1.0 / std::expm1(-d2);
  const double d1a = -2.0 / (a * a) * (p2 - p1);
  const double d1m = p0 + p2 - 2 * p1;
  const double d2a = -4.0 / (a * a) * (p4 - p2);
  const double d2m = p0 + p4 - 2 * p2;
  (*jac)[0] = g1 * d1a * a;
  (*jac)[1] = g1 * d1m * m;
  (*jac)[2] = g2 * d2a * a;
  (*jac)[3] = g2 * d2m * m;
}

double fnorm(const std::array<double, 2>& f) {
  double n = std::max(std::fabs(f[0]), std::fabs(f[1]));
  return std::isfinite(n) ? n : INFINITY;
}

FitState newton(double x, double y, double lr1, double lr2) {
  FitState s{x, y, {}, 0.0};
  residuals(x, y, lr1, lr2, s.f, nullptr);
  s.norm = fnorm(s.f);
  for (int it = 0; it < 100 && s.norm > 1e-14; ++it) {
    std::array<double, 2> f;
    std::array<double, 4> j;
    residuals(s.x, s.y, lr1, lr2, f, &j);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (!std::isfinite(det) || det == 0.0) break;
    double dx = -(j[3] * f[0] - j[1] * f[1]) / det;
    double dy = -(-j[2] * f[0] + j[0] * f[1]) / det;
    const double big = std::max(std::fabs(dx), std::fabs(dy));
    if (big > 2.0) {
      dx *= 2.0 / big;
      dy *= 2.0 / big;
    }
    double t = 1.0;
    bool moved = false;
    while (t > 1e-10) {
      double nx = std::clamp(s.x + t * dx, kLogAlphaMin, kLogAlphaMax);
      double ny = std::clamp(s.y + t * dy, kLogMuMin, kLogMuMax);
      std::array<double, 2> nf;
      residuals(nx, ny, lr1, lr2, nf, nullptr);
      double nn = fnorm(nf);
      if (nn < s.norm * (1.0 - 1e-4 * t)) {
        s = {nx, ny, nf, nn};
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return s;
}

}  // namespace

AlphaMuParams fit_alpha_mu(const MomentSet& m, FitDiagnostics* diag) {
  if (!positive_finite(m.m1) || !positive_finite(m.m2) || !positive_finite(m.m4))
    throw DomainError("moments must be positive and finite");
  const double v1 = m.m2 - m.m1 * m.m1;
  const double v2 = m.m4 - m.m2 * m.m2;
  if (!(v1 > 0.0) || !(v2 > 0.0))
    throw DomainError("moment set violates Cauchy-Schwarz");
  const double lr1 = std::log(m.m1 * m.m1 / v1);
  const double lr2 = std::log(m.m2 * m.m2 / v2);

  bool have = false;
  FitState best{};
  int good = 0;
  constexpr int kGrid = 16;
  for (int i = 0; i < kGrid; ++i) {
    for (int k = 0; k < kGrid; ++k) {
      double x0 = std::log(0.1) + i * (std::log(8.0) - std::log(0.1)) / (kGrid - 1);
      double y0 = std::log(0.1) + k * (std::log(64.0) - std::log(0.1)) / (kGrid - 1);
      FitState s = newton(x0, y0, lr1, lr2);
      if (!std::isfinite(s.norm)) continue;
      if (s.norm < 1e-10) ++good;
      bool better = !have || s.norm < best.norm ||
                    (s.norm == best.norm &&
                     std::pair(s.x, s.y) < std::pair(best.x, best.y));
      if (better) {
        best = s;
        have = true;
      }
    }
  }
  const double residual =
      have ? std::max(std::fabs(std::expm1(best.f[0])), std::fabs(std::expm1(best.f[1])))
           : INFINITY;
  if (diag) *diag = {residual, good};
  if (!(residual < 1e-10))
    throw NoConvergence("alpha-mu moment fit failed", residual);

  AlphaMuParams q;
  q.alpha = std::exp(best.x);
  q.mu = std::exp(best.y);
  q.omega = q.mu * std::exp(q.alpha * (std::log(m.m1) + ln_gamma(q.mu) -
                                       ln_gamma(q.mu + 1 / q.alpha)));
  return q;
}

AlphaMuParams fit_alpha_mu(const WeibullParams& p, int n, FitDiagnostics* diag) {
  return fit_alpha_mu(sum_moments(p, n), diag);
}

double alpha_mu_pdf(const AlphaMuParams& q, double eta) {
  validate(q);
  if (!(eta > 0.0)) throw DomainError("alpha_mu_pdf requires eta > 0");
  double lv = std::log(q.alpha) + q.mu * std::log(q.mu) +
              (q.alpha * q.mu - 1.0) * std::log(eta) -
              q.mu * std::pow(eta, q.alpha) / q.omega - q.mu * std::log(q.omega) -
              ln_gamma(q.mu);
  return std::exp(lv);
}

double alpha_mu_cdf(const AlphaMuParams& q, double eta) {
  validate(q);
  if (eta <= 0.0) return 0.0;
  return regularized_p(q.mu, q.mu * std::pow(eta, q.alpha) / q.omega);
}

// ---------------------------------------------------------------------------
// Laguerre-series density

namespace {

constexpr int kMaxOuter = 500;
// below this density (times 1/chi) the stopping rule is absolute
constexpr double kDensityFloor = 1e-4;
constexpr int kQuadBlock = kMaxOuter + 8;

// Coefficient V(k) = E[L_k(xi / chi)], expanded as an alternating finite sum.
// Returns false when that sum is too ill-conditioned to trust in doubles.
bool laguerre_mean_direct(const WeibullParams& p, double chi, int k, double& v) {
  NeumaierSum s;
  double mag = 0.0;
  for (int j = 0; j <= k; ++j) {
    double lt = log_binomial(k, j) + log_weibull_moment(p, j) -
                j * std::log(chi) - ln_gamma(j + 1.0);
    double t = std::exp(lt);
    mag += t;
    s.add(j % 2 ? -t : t);
  }
  v = s.value();
  return mag <= 1e2;
}

// Same coefficients for k < kQuadBlock from E[L_k(c u^(1/alpha))], u ~ Exp(1).
std::vector<double> laguerre_mean_quadrature(const WeibullParams& p, double chi) {
  const double c = std::pow(p.omega_tilde, 1.0 / p.alpha_tilde) / chi;
  auto y_of = [&](double u) { return c * std::pow(u, 1.0 / p.alpha_tilde); };
  // |L_k(y)| <= exp(y/2), so the integrand is bounded by exp(y/2 - u)
  double upper = 50.0;
  while (y_of(upper) / 2 - upper > -40.0) {
    upper *= 2.0;
    if (upper > 1e4)
      throw NoConvergence("pulse law too heavy tailed for the Laguerre series");
  }
  std::vector<double> breaks{0.0};
  for (int j = 20; j >= 1; --j) breaks.push_back(std::pow(4.0, -j));
  for (double u = 1.0; u < upper; u += 1.0) breaks.push_back(u);
  breaks.push_back(upper);

  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  std::vector<NeumaierSum> acc(kQuadBlock);
  std::vector<double> l1(kQuadBlock, 0.0);
  std::vector<double> lag(kQuadBlock);
  auto node = [&](double u, double w) {
    double y = y_of(u);
    double e = std::exp(-u) * w;
    lag[0] = 1.0;
    lag[1] = 1.0 - y;
    for (int k = 1; k + 1 < kQuadBlock; ++k)
      lag[k + 1] = ((2 * k + 1 - y) * lag[k] - k * lag[k - 1]) / (k + 1);
    for (int k = 0; k < kQuadBlock; ++k) {
      acc[k].add(e * lag[k]);
      l1[k] += std::fabs(e * lag[k]);
    }
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    double h = 0.5 * (breaks[i + 1] - breaks[i]);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (xs[j] == 0.0) {
        node(mid, ws[j] * h);
      } else {
        node(mid - h * xs[j], ws[j] * h);
        node(mid + h * xs[j], ws[j] * h);
      }
    }
  }
  std::vector<double> v(kQuadBlock);
  for (int k = 0; k < kQuadBlock; ++k) {
    if (l1[k] > 1e3)
      throw NoConvergence("Laguerre coefficients lose precision for this pulse law");
    v[k] = acc[k].value();
  }
  return v;
}

struct SeriesCache {
  std::vector<WeibullParams> pulses;
  double chi = 0.0;
  std::vector<std::vector<double>> v;      // per pulse, V(k)
  std::vector<bool> direct_ok;             // per pulse, still using finite sums
  std::vector<std::vector<double>> quad;   // per pulse, lazily filled
  std::vector<std::vector<double>> prefix; // partial products of the V series
  std::vector<double> a;

  double coefficient(std::size_t n, int k) {
    auto& vn = v[n];
    while (static_cast<int>(vn.size()) <= k) {
      int kk = static_cast<int>(vn.size());
      double val = 0.0;
      if (direct_ok[n] && laguerre_mean_direct(pulses[n], chi, kk, val)) {
        vn.push_back(val);
        continue;
      }
      direct_ok[n] = false;
      if (quad[n].empty()) quad[n] = laguerre_mean_quadrature(pulses[n], chi);
      vn.push_back(quad[n].at(kk));
    }
    return vn[k];
  }

  // a_l: coefficient of t^l in prod_n sum_k V_n(k) t^k
  double a_l(int l) {
    const std::size_t n = pulses.size();
    while (static_cast<int>(a.size()) <= l) {
      int ll = static_cast<int>(a.size());
      for (std::size_t j = 0; j < n; ++j) {
        double val;
        if (j == 0) {
          val = coefficient(0, ll);
        } else {
          NeumaierSum s;
          for (int i = 0; i <= ll; ++i)
            s.add(prefix[j - 1][i] * coefficient(j, ll - i));
          val = s.value();
        }
        prefix[j].push_back(val);
      }
      a.push_back(prefix[n - 1][ll]);
    }
    return a[l];
  }
};

std::shared_ptr<SeriesCache> series_cache(std::span<const WeibullParams> pulses) {
  static std::mutex mtx;
  static std::map<std::vector<std::pair<double, double>>,
                  std::shared_ptr<SeriesCache>>
      table;
  std::vector<std::pair<double, double>> key;
  for (const auto& p : pulses) key.emplace_back(p.alpha_tilde, p.omega_tilde);
  std::lock_guard lock(mtx);
  auto& slot = table[key];
  if (!slot) {
    slot = std::make_shared<SeriesCache>();
    slot->pulses.assign(pulses.begin(), pulses.end());
    double s = 0.0;
    for (const auto& p : pulses) s += p.omega_tilde;
    slot->chi = 2.0 * s / static_cast<double>(pulses.size());
    slot->v.resize(pulses.size());
    slot->direct_ok.assign(pulses.size(), true);
    slot->quad.resize(pulses.size());
    slot->prefix.resize(pulses.size());
  }
  return slot;
}

std::mutex& series_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double exact_sum_pdf(std::span<const WeibullParams> pulses, double eta,
                     double tol, int* terms_used) {
  if (pulses.empty()) throw DomainError("at least one pulse required");
  for (const auto& p : pulses) validate(p);
  if (!(eta > 0.0)) throw DomainError("exact_sum_pdf requires eta > 0");
  if (!(tol > 0.0)) throw DomainError("exact_sum_pdf requires tol > 0");
  if (pulses.size() == 1) {
    if (terms_used) *terms_used = 1;
    return weibull_pdf(pulses[0], eta);
  }

  auto cache = series_cache(pulses);
  const int n = static_cast<int>(pulses.size());
  const double beta = n - 1.0;
  const double x = eta / cache->chi;
  const double pre = std::exp(beta * std::log(eta) - x - n * std::log(cache->chi));

  // generalized Laguerre L_l^(n-1)(x) by forward recurrence, times l!/Gamma(n+l)
  double lag_prev = 0.0, lag = 1.0;
  double ratio = std::exp(-ln_gamma(n));
  NeumaierSum sum;
  int quiet = 0;
  std::lock_guard lock(series_mutex());
  for (int l = 0; l < kMaxOuter; ++l) {
    if (l > 0) {
      double next = ((2 * (l - 1) + 1 + beta - x) * lag - (l - 1 + beta) * lag_prev) / l;
      lag_prev = lag;
      lag = next;
      ratio *= l / (n + l - 1.0);
    }
    double term = pre * cache->a_l(l) * lag * ratio;
    sum.add(term);
    if (std::fabs(term) < tol * std::max(std::fabs(sum.value()), kDensityFloor / cache->chi))
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 3) {
      if (terms_used) *terms_used = l + 1;
      return std::max(sum.value(), 0.0);
    }
  }
  throw NoConvergence("exact sum density needs more than 500 terms");
}

double exact_sum_pdf(const WeibullParams& p, int n, double eta, double tol,
                     int* terms_used) {
  if (n < 1) throw DomainError("pulse count must be positive");
  std::vector<WeibullParams> pulses(n, p);
  return exact_sum_pdf(pulses, eta, tol, terms_used);
}

}  // namespace wpd
