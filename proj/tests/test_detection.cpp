#include <cmath>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "weibullpd/detection.hpp"
#include "weibullpd/errors.hpp"
#include "weibullpd/reference_settings.h"

using namespace wpd;

namespace {

// P_D by direct quadrature with the noncentral chi-square tail, over t = u^mu
double pd_reference(const DetectorConfig& cfg, const AlphaMuParams& q) {
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    double u = std::pow(t, 1.0 / q.mu);
    double zeta = std::pow(u * q.omega / q.mu, 1.0 / q.alpha) / (2.0 * cfg.sigma2);
    double tail = 1.0;
    if (zeta < 1e6) {
      boost::math::non_central_chi_squared d(2.0 * cfg.n_pulses, 2.0 * zeta);
      tail = boost::math::cdf(boost::math::complement(d, 2.0 * cfg.gamma));
    }
    return tail * std::exp(-u - std::lgamma(q.mu + 1.0));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-12);
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("false alarm probability and its inverse") {
  CHECK(pfa(DetectorConfig{1, 1.0, std::log(2.0)}) == doctest::Approx(0.5).epsilon(1e-14));
  for (int n : {1, 3, 10})
    for (double p : {0.1, 1e-3, 1e-6}) {
      double g = threshold_for_pfa(n, p);
      CHECK(pfa(DetectorConfig{n, 1.0, g}) == doctest::Approx(p).epsilon(1e-10));
    }
  CHECK(pfa(DetectorConfig{4, 1.0, 0.0}) == 1.0);
  CHECK_THROWS_AS(threshold_for_pfa(3, 1.5), DomainError);
  CHECK_THROWS_AS(pfa(DetectorConfig{0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(pfa(DetectorConfig{2, -1.0, 1.0}), DomainError);
}

TEST_CASE("SNR bookkeeping") {
  WeibullParams p{0.7, 2.3};
  double snr = snr_of(p, 4, 0.5);
  CHECK(omega_for_snr(0.7, 4, 0.5, snr) == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(snr_of(WeibullParams{1.0, 2.0}, 1, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("nonfluctuating detection") {
  CHECK(pd_nonfluctuating(DetectorConfig{5, 1.0, 6.0}, 4.0) ==
        doctest::Approx(0.78967202349690196049).epsilon(1e-12));
  CHECK(pd_nonfluctuating(DetectorConfig{3, 1.0, 2.0}, 0.0) ==
        doctest::Approx(pfa(DetectorConfig{3, 1.0, 2.0})).epsilon(1e-13));
}

TEST_CASE("series, quadrature and reference agree on the benchmark settings") {
  double row1 = 0;
  for (const auto& r : wpd_reference_settings) {
    DetectorConfig cfg{r.n_pulses, 1.0, r.gamma};
    AlphaMuParams q{r.alpha_tilde, r.mu_tilde, r.omega_tilde};
    auto s = pd_series(cfg, q, 1e-4);
    auto qd = pd_quadrature(cfg, q);
    CHECK(s.terms_used < 275);
    CHECK(std::fabs(s.value - qd.value) < 1e-5);
    CHECK(qd.value == doctest::Approx(pd_reference(cfg, q)).epsilon(1e-7));
    if (row1 == 0) row1 = qd.value;
  }
  CHECK(row1 == doctest::Approx(0.69149708953214831042).epsilon(1e-9));
}

TEST_CASE("single exponential pulse has a closed form") {
  const double cases[][2] = {{2.0, 1.0}, {5.0, 3.0}, {0.7, 0.25}};
  for (const auto& c : cases) {
    double g = c[0], snr = c[1];
    DetectorConfig cfg{1, 1.0, g};
    AlphaMuParams q{1.0, 1.0, 2.0 * snr};
    double want = std::exp(-g / (1.0 + snr));
    CHECK(pd_series(cfg, q, 1e-8).value == doctest::Approx(want).epsilon(1e-7));
    CHECK(pd_quadrature(cfg, q).value == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("series term order does not matter") {
  DetectorConfig cfg{3, 1.0, 3.0};
  AlphaMuParams q{0.5, 1.5, 2.0};
  SeriesOptions fwd, rev;
  rev.reverse_fronts = true;
  CHECK(pd_series(cfg, q, fwd).value == doctest::Approx(pd_series(cfg, q, rev).value).epsilon(1e-12));
}

TEST_CASE("series preconditions and failures") {
  DetectorConfig cfg{3, 1.0, 2.0};
  CHECK_THROWS_AS(pd_series(cfg, AlphaMuParams{1.3, 2.0, 2.0}, 1e-4), SeriesDivergence);
  CHECK(series_precondition(cfg, AlphaMuParams{1.3, 2.0, 2.0}).has_value());
  CHECK_FALSE(series_precondition(cfg, AlphaMuParams{0.6, 2.0, 2.0}).has_value());
  CHECK_THROWS_AS(pd_series(DetectorConfig{3, 1.0, 0.0}, AlphaMuParams{0.5, 1.5, 2.0}, 1e-4),
                  DomainError);
  CHECK_THROWS_AS(pd_series(cfg, AlphaMuParams{0.5, 1.5, 2.0}, 0.0), DomainError);
  // heavy cancellation is reported rather than returned
  CHECK_THROWS_AS(pd_series(DetectorConfig{10, 1.0, 20.0}, AlphaMuParams{0.457, 16.13, 3.794}, 1e-4),
                  NoConvergence);
}

TEST_CASE("quadrature handles the degenerate threshold and grows with the signal") {
  CHECK(pd_quadrature(DetectorConfig{3, 1.0, 0.0}, AlphaMuParams{0.5, 1.5, 2.0}).value == 1.0);
  double prev = 0;
  for (double om : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    double v = pd_quadrature(DetectorConfig{4, 1.0, 5.0}, AlphaMuParams{0.8, 3.0, om}).value;
    CHECK(v > prev);
    prev = v;
  }
}

}
