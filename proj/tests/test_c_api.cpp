#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>

#include "doctest.h"
#include "weibullpd/c_api.h"

TEST_SUITE("c_api") {

TEST_CASE("context lifecycle and error reporting") {
  wpd_context* ctx = nullptr;
  REQUIRE(wpd_context_create(&ctx) == WPD_OK);
  CHECK(std::strcmp(wpd_last_error(ctx), "") == 0);
  double out = 0;
  CHECK(wpd_threshold_for_pfa(ctx, 3, 2.0, &out) == WPD_E_DOMAIN);
  CHECK(std::strlen(wpd_last_error(ctx)) > 0);
  CHECK(wpd_threshold_for_pfa(ctx, 3, 0.01, &out) == WPD_OK);
  CHECK(std::strcmp(wpd_last_error(ctx), "") == 0);
  CHECK(wpd_pfa(ctx, nullptr, &out) == WPD_E_NULL_ARGUMENT);
  CHECK(wpd_pfa(nullptr, nullptr, &out) == WPD_E_NULL_ARGUMENT);
  CHECK(wpd_context_create(nullptr) == WPD_E_NULL_ARGUMENT);
  CHECK(std::strcmp(wpd_status_name(WPD_E_SERIES_DIVERGENCE), "SeriesDivergence") == 0);
  CHECK(std::strcmp(wpd_status_name(WPD_E_NULL_ARGUMENT), "NullArgument") == 0);
  CHECK(std::strlen(wpd_version()) > 0);
  wpd_context_destroy(ctx);
  wpd_context_destroy(nullptr);
}

TEST_CASE("pipeline through the C interface") {
  wpd_context* ctx = nullptr;
  REQUIRE(wpd_context_create(&ctx) == WPD_OK);
  wpd_weibull w{1.5, 0.5};
  wpd_moments m{};
  REQUIRE(wpd_sum_moments(ctx, &w, 1, &m) == WPD_OK);
  wpd_alpha_mu q{};
  double residual = 1;
  REQUIRE(wpd_fit_alpha_mu(ctx, &m, &q, &residual) == WPD_OK);
  CHECK(q.alpha == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(q.mu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(residual < 1e-10);

  wpd_detector d{3, 1.0, 3.0};
  wpd_alpha_mu row1{0.5, 1.5, 2.0};
  wpd_eval s{}, qd{};
  REQUIRE(wpd_pd_series(ctx, &d, &row1, 1e-4, &s) == WPD_OK);
  REQUIRE(wpd_pd_quadrature(ctx, &d, &row1, &qd) == WPD_OK);
  CHECK(std::fabs(s.value - qd.value) < 1e-5);
  CHECK(s.terms_used == 45);

  int usable = 1;
  char why[128];
  wpd_alpha_mu steep{1.4, 3.0, 4.0};
  REQUIRE(wpd_series_precondition(ctx, &d, &steep, &usable, why, sizeof why) == WPD_OK);
  CHECK(usable == 0);
  CHECK(std::strlen(why) > 0);
  CHECK(wpd_pd_series(ctx, &d, &steep, 1e-4, &s) == WPD_E_SERIES_DIVERGENCE);

  wpd_mc_config mc{};
  mc.trials = 20000;
  mc.seed = 1;
  mc.detector = d;
  mc.target_kind = WPD_TARGET_ALPHA_MU;
  mc.alpha_mu = row1;
  wpd_mc_result r{};
  REQUIRE(wpd_mc_run(ctx, &mc, &r) == WPD_OK);
  CHECK(r.trials == 20000);
  CHECK(std::fabs(r.estimate - qd.value) < 2 * r.half_width_99 + 1e-3);
  mc.target_kind = 7;
  CHECK(wpd_mc_run(ctx, &mc, &r) == WPD_E_DOMAIN);

  double v = 0;
  CHECK(wpd_alpha_mu_cdf(ctx, &row1, 1e6, &v) == WPD_OK);
  CHECK(v == doctest::Approx(1.0));
  int terms = 0;
  CHECK(wpd_exact_sum_pdf(ctx, &w, 2, 1.0, 1e-10, &v, &terms) == WPD_OK);
  CHECK(v == doctest::Approx(0.75565913744082387997).epsilon(1e-7));
  wpd_context_destroy(ctx);
}

}
