#pragma once

#include <array>
#include <cstdint>
#include <variant>

#include "weibullpd/detection.hpp"
#include "weibullpd/weibull_sum.hpp"

namespace wpd::mc {

// Philox4x32-10 block function.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key);

// Uniforms in (0, 1) from substream (seed, trial).
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t trial);
  double uniform();

 private:
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter block_{};
  int used_ = 4;
};

double sample_weibull(const WeibullParams& p, double u);
// eta = (Omega G / mu)^(1/alpha) with G ~ Gamma(mu) at quantile 1 - u
double sample_alpha_mu(const AlphaMuParams& q, double u);

// Absent target means H0. An alpha-mu target draws the pulse power sum and
// splits it equally across the pulses.
using Target = std::variant<std::monostate, WeibullParams, AlphaMuParams>;

struct SimConfig {
  long trials = 1000000;
  std::uint64_t seed = 0;
  DetectorConfig cfg{1, 1.0, 0.0};
  Target target;
  int threads = 0;  // 0: hardware concurrency
};

struct SimResult {
  double estimate = 0.0;
  double half_width_99 = 0.0;
  long trials = 0;
};

void validate(const SimConfig& sim);
SimResult run(const SimConfig& sim);

}  // namespace wpd::mc
