#pragma once

#include <cstddef>
#include <vector>

#include "weibullpd/detection.hpp"
#include "weibullpd/special_functions.hpp"

namespace wpd::fox {

// Multivariate Fox H-function arguments: Theta(s) = prod_j Gamma(delta_j +
// sum_l dmat[j][l] s_l) / prod_j Gamma(beta_j + sum_l bmat[j][l] s_l).
struct FoxHSpec {
  std::vector<Complex> x;
  std::vector<double> delta;
  std::vector<std::vector<double>> dmat;
  std::vector<double> beta;
  std::vector<std::vector<double>> bmat;

  std::size_t dims() const { return x.size(); }
};

enum class ContourKind {
  vertical,  // eps + i t, t in [-W, W]
  loop,      // from eps - W - i h to eps - i h, up to eps + i h, back to eps - W + i h
};

struct ContourConfig {
  std::vector<double> offsets;
  double half_length = 50.0;
  int max_refinements = 4;
  std::vector<ContourKind> kinds;    // empty: all vertical
  double loop_height = 1.0;
  std::vector<std::size_t> order;    // outermost axis first; empty: 0, 1, ...
  double panel_width = 1.0;          // first panel on vertical lines
  int negative_real_phase = +1;      // Log(-1) = +i pi or -i pi
  // move single-axis inner vertical lines through the real saddle of their
  // pole-free strip
  bool saddle_shift = false;
};

struct EvalStats {
  long evaluations = 0;
  int levels = 0;
  Complex previous{};
  bool budget_hit = false;
};

void validate(const FoxHSpec& spec);

Complex theta(const FoxHSpec& spec, const std::vector<Complex>& s);

// First feasible offsets on the grid {-1, -1/2, 0, 1/2, 1}^L, then on finer
// grids of the same box.
ContourConfig choose_offsets(const FoxHSpec& spec);
bool offsets_feasible(const FoxHSpec& spec, const std::vector<double>& eps);

Complex eval(const FoxHSpec& spec, const ContourConfig& contour, double tol,
             EvalStats* stats = nullptr);

FoxHSpec dagger_bundle(const DetectorConfig& cfg, const AlphaMuParams& q);
FoxHSpec ddagger_bundle(const DetectorConfig& cfg, const AlphaMuParams& q);
Complex pd_prefactor(const DetectorConfig& cfg, const AlphaMuParams& q);

EvalResult pd_fox(const DetectorConfig& cfg, const AlphaMuParams& q, double tol);

}  // namespace wpd::fox
