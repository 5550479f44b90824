#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "weibullpd/errors.hpp"
#include "weibullpd/monte_carlo.hpp"
#include "weibullpd/weibull_sum.hpp"

using namespace wpd;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12);
}

}  // namespace

TEST_SUITE("weibull_sum") {

TEST_CASE("Weibull moments and density") {
  WeibullParams p{1.5, 0.5};
  CHECK(weibull_moment(p, 2.0) == doctest::Approx(0.47250553868369171708).epsilon(1e-13));
  CHECK(weibull_moment(p, 0.0) == doctest::Approx(1.0));
  // E[xi^alpha~] = Omega~
  CHECK(weibull_moment(p, 1.5) == doctest::Approx(0.5).epsilon(1e-13));
  double mass = integrate([&](double x) { return weibull_pdf(p, x); }, 0.0, 20.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(weibull_cdf(p, 0.8) ==
        doctest::Approx(integrate([&](double x) { return weibull_pdf(p, x); }, 0.0, 0.8))
            .epsilon(1e-10));
  CHECK_THROWS_AS(weibull_moment(WeibullParams{0.0, 1.0}, 1.0), DomainError);
  CHECK_THROWS_AS(weibull_pdf(WeibullParams{1.0, -1.0}, 1.0), DomainError);
}

TEST_CASE("sum moments by binomial convolution") {
  WeibullParams p{1.5, 0.5};
  auto m1 = sum_moments(p, 1);
  CHECK(m1.m1 == doctest::Approx(weibull_moment(p, 1)).epsilon(1e-14));
  CHECK(m1.m4 == doctest::Approx(weibull_moment(p, 4)).epsilon(1e-14));
  // two pulses, closed forms
  auto m2 = sum_moments(p, 2);
  double e1 = weibull_moment(p, 1), e2 = weibull_moment(p, 2), e3 = weibull_moment(p, 3),
         e4 = weibull_moment(p, 4);
  CHECK(m2.m1 == doctest::Approx(2 * e1).epsilon(1e-14));
  CHECK(m2.m2 == doctest::Approx(2 * e2 + 2 * e1 * e1).epsilon(1e-14));
  CHECK(m2.m4 == doctest::Approx(2 * e4 + 8 * e3 * e1 + 6 * e2 * e2).epsilon(1e-13));
  // large n*p switches to logs without changing the result
  std::vector<WeibullParams> many(20, p);
  double direct = sum_moment(many, 4);
  CHECK(direct == doctest::Approx(sum_moments(p, 20).m4).epsilon(1e-12));
  CHECK_THROWS_AS(sum_moments(p, 0), DomainError);
  CHECK_THROWS_AS(sum_moments(WeibullParams{0.01, 1e6}, 400), OverflowGuard);
}

TEST_CASE("sum moments agree with sampled sums") {
  WeibullParams p{1.5, 0.5};
  const int n = 8;
  const long draws = 400000;
  auto m = sum_moments(p, n);
  double s1 = 0, s2 = 0;
  for (long t = 0; t < draws; ++t) {
    mc::TrialStream rng(7, static_cast<std::uint64_t>(t));
    double eta = 0;
    for (int k = 0; k < n; ++k) eta += mc::sample_weibull(p, rng.uniform());
    s1 += eta;
    s2 += eta * eta;
  }
  double mean = s1 / draws, var = s2 / draws - mean * mean;
  CHECK(std::fabs(mean - m.m1) < 3.0 * std::sqrt(var / draws));
  CHECK(std::fabs(s2 / draws - m.m2) / m.m2 < 0.01);
}

TEST_CASE("fit is exact for one pulse") {
  for (auto p : {WeibullParams{1.5, 0.5}, WeibullParams{0.4, 3.0}, WeibullParams{2.0, 1.0}}) {
    FitDiagnostics d;
    auto q = fit_alpha_mu(p, 1, &d);
    CHECK(q.alpha == doctest::Approx(p.alpha_tilde).epsilon(1e-9));
    CHECK(q.mu == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(q.omega == doctest::Approx(p.omega_tilde).epsilon(1e-9));
    CHECK(d.residual < 1e-10);
  }
}

TEST_CASE("fit reproduces the target moments") {
  for (int n : {2, 4, 8}) {
    WeibullParams p{1.5, 0.5};
    FitDiagnostics d;
    auto q = fit_alpha_mu(p, n, &d);
    auto m = sum_moments(p, n);
    CHECK(d.residual < 1e-10);
    CHECK(d.starts_converged > 0);
    CHECK(alpha_mu_moment(q, 1) == doctest::Approx(m.m1).epsilon(1e-9));
    CHECK(alpha_mu_moment(q, 2) == doctest::Approx(m.m2).epsilon(1e-9));
    CHECK(alpha_mu_moment(q, 4) == doctest::Approx(m.m4).epsilon(1e-9));
  }
  // exponential pulses sum to a gamma law
  auto q = fit_alpha_mu(WeibullParams{1.0, 2.0}, 3);
  CHECK(q.alpha == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(q.mu == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(q.omega == doctest::Approx(6.0).epsilon(1e-8));
  CHECK_THROWS_AS(fit_alpha_mu(MomentSet{1.0, 0.5, 1.0}), DomainError);
}

TEST_CASE("alpha-mu density, CDF and moments") {
  AlphaMuParams q{0.7, 3.2, 1.9};
  CHECK(alpha_mu_pdf(q, 1.3) == doctest::Approx(0.28017320283710364215).epsilon(1e-12));
  boost::math::quadrature::tanh_sinh<double> ts;
  double mass = ts.integrate([&](double x) { return alpha_mu_pdf(q, x); }, 0.0,
                             std::numeric_limits<double>::infinity());
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  double cdf = integrate([&](double x) { return alpha_mu_pdf(q, x); }, 0.0, 2.0);
  CHECK(alpha_mu_cdf(q, 2.0) == doctest::Approx(cdf).epsilon(1e-9));
  double m1 = ts.integrate([&](double x) { return x * alpha_mu_pdf(q, x); }, 0.0,
                           std::numeric_limits<double>::infinity());
  CHECK(alpha_mu_moment(q, 1.0) == doctest::Approx(m1).epsilon(1e-8));
  CHECK_THROWS_AS(alpha_mu_pdf(q, 0.0), DomainError);
}

TEST_CASE("exact sum density") {
  WeibullParams p{1.5, 0.5};
  CHECK(exact_sum_pdf(p, 1, 0.7) == doctest::Approx(weibull_pdf(p, 0.7)).epsilon(1e-12));
  int terms = 0;
  CHECK(exact_sum_pdf(p, 2, 1.0, 1e-10, &terms) ==
        doctest::Approx(0.75565913744082387997).epsilon(1e-7));
  CHECK(terms < 500);
  CHECK(exact_sum_pdf(p, 2, 0.4, 1e-10) ==
        doctest::Approx(0.38208855713633061261).epsilon(1e-7));

  // normalization and first moment over (0, 5 m1)
  for (int n : {2, 3}) {
    auto m = sum_moments(p, n);
    auto f = [&](double x) { return x <= 0 ? 0.0 : exact_sum_pdf(p, n, x); };
    double mass = integrate(f, 0.0, 6 * m.m1);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-5));
    double mean = integrate([&](double x) { return x * f(x); }, 0.0, 6 * m.m1);
    CHECK(mean == doctest::Approx(m.m1).epsilon(1e-5));
  }
  CHECK_THROWS_AS(exact_sum_pdf(p, 2, 0.0), DomainError);
  CHECK_THROWS_AS(exact_sum_pdf(p, 2, 1.0, 0.0), DomainError);
}

TEST_CASE("exact sum density and the fitted alpha-mu density stay close") {
  WeibullParams p{1.5, 0.5};
  for (int n : {2, 4}) {
    auto q = fit_alpha_mu(p, n);
    auto m = sum_moments(p, n);
    double gap = 0;
    for (int i = 1; i <= 100; ++i) {
      double eta = 5.0 * m.m1 * i / 100;
      double e = exact_sum_pdf(p, n, eta);
      CHECK(e >= 0.0);
      gap = std::max(gap, std::fabs(e - alpha_mu_pdf(q, eta)));
    }
    CHECK(gap <= 0.02);
  }
}

}
