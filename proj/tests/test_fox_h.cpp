#include <cmath>

#include "doctest.h"
#include "weibullpd/errors.hpp"
#include "weibullpd/fox_h.hpp"

using namespace wpd;
using namespace wpd::fox;

TEST_SUITE("fox_h") {

TEST_CASE("Cahen-Mellin integral gives the exponential") {
  for (double x : {0.5, 1.0, 2.0}) {
    FoxHSpec s{{x}, {0.0}, {{1.0}}, {}, {}};
    auto c = choose_offsets(s);
    Complex v = eval(s, c, 1e-8);
    CHECK(std::fabs(v.real() - std::exp(-x)) < 1e-8);
    CHECK(std::fabs(v.imag()) < 1e-10);
  }
}

TEST_CASE("independent variables factor") {
  FoxHSpec s{{1.0, 2.0}, {0.0, 0.0}, {{1, 0}, {0, 1}}, {}, {}};
  Complex v = eval(s, choose_offsets(s), 1e-8);
  CHECK(std::fabs(v.real() - std::exp(-3.0)) < 1e-8);
}

TEST_CASE("kernel against a frozen reference") {
  const double n = 5, al = 0.6, mu = 2.5;
  FoxHSpec s{{1.0, 1.0, 1.0},
             {0.0, (n - 1) / 2, al * mu - n / 2 + 0.5, n / 2 + 0.5, 0.0},
             {{1, 0, 0}, {0, 1, 0}, {-al, -1, 0}, {0, -1, 1}, {0, 0, -1}},
             {(n - 1) / 2 + 1, 1.0},
             {{0, -1, 0}, {0, 0, -1}}};
  Complex v = theta(s, {Complex(0.5, 1.3), Complex(-0.5, -2.2), Complex(-0.5, 0.7)});
  CHECK(std::fabs(v.real() - -0.0036934911602979407693) < 1e-15);
  CHECK(std::fabs(v.imag() - -0.0017799731889709843043) < 1e-15);
  CHECK_THROWS_AS(theta(s, {Complex(0.0), Complex(0.5), Complex(0.5)}), PoleError);
}

TEST_CASE("offset selection") {
  DetectorConfig cfg{3, 1.0, 3.0};
  // coarse grid suffices
  auto a = choose_offsets(dagger_bundle(cfg, AlphaMuParams{1.0, 1.0, 2.0}));
  CHECK(offsets_feasible(dagger_bundle(cfg, AlphaMuParams{1.0, 1.0, 2.0}), a.offsets));
  // needs a finer step
  auto sb = dagger_bundle(cfg, AlphaMuParams{0.5, 1.5, 2.0});
  CHECK(offsets_feasible(sb, choose_offsets(sb).offsets));
  // needs a wider box
  auto sc = ddagger_bundle(DetectorConfig{5, 1.0, 2.0}, AlphaMuParams{1.0, 0.5, 5.0});
  auto c = choose_offsets(sc);
  CHECK(offsets_feasible(sc, c.offsets));
  CHECK(c.offsets[1] < -1.0);
  // contradictory constraints
  FoxHSpec bad{{1.0}, {-1.0, -1.0}, {{1.0}, {-1.0}}, {}, {}};
  CHECK_THROWS_AS(choose_offsets(bad), NoFeasibleOffset);
  FoxHSpec s{{1.0}, {0.0}, {{1.0}}, {}, {}};
  ContourConfig wrong;
  wrong.offsets = {-0.5};
  CHECK_THROWS_AS(eval(s, wrong, 1e-6), NoFeasibleOffset);
}

TEST_CASE("malformed specs") {
  CHECK_THROWS_AS(validate(FoxHSpec{}), DomainError);
  CHECK_THROWS_AS(validate(FoxHSpec{{1.0}, {0.0}, {{1.0, 2.0}}, {}, {}}), DomainError);
  CHECK_THROWS_AS(validate(FoxHSpec{{0.0}, {0.0}, {{1.0}}, {}, {}}), DomainError);
}

TEST_CASE("truncated contour reports non-convergence") {
  FoxHSpec s{{1.0}, {0.0}, {{1.0}}, {}, {}};
  auto c = choose_offsets(s);
  c.half_length = 1.0;
  c.max_refinements = 0;
  CHECK_THROWS_AS(eval(s, c, 1e-12), NotConverged);
}

TEST_CASE("contour path agrees with quadrature") {
  struct Case {
    DetectorConfig cfg;
    AlphaMuParams q;
  } cases[] = {
      {{3, 1.0, 2.0}, {1.0, 1.0, 2.0}},
      {{5, 1.0, 2.0}, {1.0, 0.5, 5.0}},
      {{10, 1.0, 2.0}, {1.81, 11.26, 67.16}},
  };
  for (const auto& c : cases) {
    auto f = pd_fox(c.cfg, c.q, 1e-4);
    CHECK(f.value == doctest::Approx(pd_quadrature(c.cfg, c.q).value).epsilon(1e-6));
    CHECK(std::fabs(f.imag_residue) < 1e-6);
    CHECK(f.terms_used > 0);
  }
  CHECK_THROWS_AS(pd_fox(DetectorConfig{3, 1.0, 0.0}, AlphaMuParams{1.0, 1.0, 2.0}, 1e-4),
                  DomainError);
}

}
