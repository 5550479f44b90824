#pragma once

#include <complex>

namespace wpd {

using Complex = std::complex<double>;

// Principal branch of log Gamma, continuous off the negative real axis.
Complex ln_gamma(Complex z);

// Real log|Gamma(x)|, thread safe.
double ln_gamma(double x);

double upper_gamma(double a, double x);
double regularized_q(double a, double x);
double regularized_p(double a, double x);

// x with regularized_q(a, x) == p.
double inverse_regularized_q(double a, double p);

double kummer_1f1(double a, double b, double z);

// Generalized Marcum Q of integer order n.
double marcum_q(int n, double a, double b);

}  // namespace wpd
