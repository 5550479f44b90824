#include "weibullpd/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "weibullpd/errors.hpp"
#include "weibullpd/special_functions.hpp"

namespace wpd::mc {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53, kM1 = 0xCD9E8D57;
constexpr std::uint32_t kW0 = 0x9E3779B9, kW1 = 0xBB67AE85;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = std::uint64_t(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

long count_hits(const SimConfig& sim, long first, long last) {
  const int n = sim.cfg.n_pulses;
  const double sd = std::sqrt(sim.cfg.sigma2);
  const double limit = sim.cfg.gamma * 2.0 * sim.cfg.sigma2;
  long hits = 0;
  for (long t = first; t < last; ++t) {
    TrialStream rng(sim.seed, static_cast<std::uint64_t>(t));
    double split = 0.0;
    if (auto q = std::get_if<AlphaMuParams>(&sim.target))
      split = std::sqrt(sample_alpha_mu(*q, rng.uniform()) / n);
    double stat = 0.0;
    for (int k = 0; k < n; ++k) {
      double amp = 0.0, phase = 0.0;
      if (auto p = std::get_if<WeibullParams>(&sim.target)) {
        amp = std::sqrt(sample_weibull(*p, rng.uniform()));
        phase = kTwoPi * rng.uniform();
      } else if (std::holds_alternative<AlphaMuParams>(sim.target)) {
        amp = split;
        phase = kTwoPi * rng.uniform();
      }
      // Box-Muller
      double r = sd * std::sqrt(-2.0 * std::log(rng.uniform()));
      double th = kTwoPi * rng.uniform();
      double re = amp * std::cos(phase) + r * std::cos(th);
      double im = amp * std::sin(phase) + r * std::sin(th);
      stat += re * re + im * im;
    }
    if (stat > limit) ++hits;
  }
  return hits;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0, 0, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)} {}

double TrialStream::uniform() {
  if (used_ >= 4) {
    block_ = philox4x32(ctr_, key_);
    if (++ctr_[0] == 0) ++ctr_[1];
    used_ = 0;
  }
  std::uint64_t bits = (std::uint64_t(block_[used_]) << 32) | block_[used_ + 1];
  used_ += 2;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

double sample_weibull(const WeibullParams& p, double u) {
  return std::pow(-p.omega_tilde * std::log(u), 1.0 / p.alpha_tilde);
}

double sample_alpha_mu(const AlphaMuParams& q, double u) {
  double g = inverse_regularized_q(q.mu, u);
  return std::pow(q.omega * g / q.mu, 1.0 / q.alpha);
}

void validate(const SimConfig& sim) {
  if (sim.trials < 1) throw DomainError("trial count must be positive");
  if (sim.threads < 0) throw DomainError("thread count must be non-negative");
  wpd::validate(sim.cfg);
  if (auto p = std::get_if<WeibullParams>(&sim.target)) wpd::validate(*p);
  if (auto q = std::get_if<AlphaMuParams>(&sim.target)) wpd::validate(*q);
}

SimResult run(const SimConfig& sim) {
  validate(sim);
  SimResult r;
  r.trials = sim.trials;
  long hits = 0;
  if (sim.cfg.gamma == 0.0) {
    hits = sim.trials;
  } else {
    int workers = sim.threads > 0 ? sim.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    workers = static_cast<int>(std::clamp<long>(workers, 1, sim.trials));
    std::vector<long> counts(workers, 0);
    if (workers == 1) {
      counts[0] = count_hits(sim, 0, sim.trials);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        long first = sim.trials * w / workers, last = sim.trials * (w + 1) / workers;
        pool.emplace_back([&, w, first, last] { counts[w] = count_hits(sim, first, last); });
      }
      for (auto& th : pool) th.join();
    }
    for (long c : counts) hits += c;
  }
  r.estimate = static_cast<double>(hits) / sim.trials;
  r.half_width_99 = 2.576 * std::sqrt(r.estimate * (1.0 - r.estimate) / sim.trials);
  return r;
}

}  // namespace wpd::mc
