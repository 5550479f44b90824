#pragma once

#include <stdexcept>
#include <string>

namespace wpd {

enum class ErrorCode {
  ok = 0,
  pole = 1,
  domain = 2,
  no_convergence = 3,
  overflow_guard = 4,
  series_divergence = 5,
  quadrature_failure = 6,
  not_converged = 7,
  no_feasible_offset = 8,
  imaginary_residue = 9,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct PoleError : Error {
  explicit PoleError(const std::string& w, int factor = -1)
      : Error(ErrorCode::pole, w), factor_index(factor) {}
  int factor_index;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCode::domain, w) {}
};

struct NoConvergence : Error {
  explicit NoConvergence(const std::string& w, double best = 0.0)
      : Error(ErrorCode::no_convergence, w), best_residual(best) {}
  double best_residual;
};

struct OverflowGuard : Error {
  explicit OverflowGuard(const std::string& w)
      : Error(ErrorCode::overflow_guard, w) {}
};

struct SeriesDivergence : Error {
  explicit SeriesDivergence(const std::string& w)
      : Error(ErrorCode::series_divergence, w) {}
};

struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& w)
      : Error(ErrorCode::quadrature_failure, w) {}
};

struct NotConverged : Error {
  NotConverged(const std::string& w, double prev, double last)
      : Error(ErrorCode::not_converged, w), previous(prev), latest(last) {}
  double previous;
  double latest;
};

struct NoFeasibleOffset : Error {
  explicit NoFeasibleOffset(const std::string& w)
      : Error(ErrorCode::no_feasible_offset, w) {}
};

struct ImaginaryResidue : Error {
  ImaginaryResidue(const std::string& w, double im)
      : Error(ErrorCode::imaginary_residue, w), imag(im) {}
  double imag;
};

}  // namespace wpd
