#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace wpd::quad {

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value, error, abs_value;
};

// 15-point rule on [a, b]; error is |K15 - G7|.
template <class F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fc = f(c);
  double rk = fc * kWgk[7];
  double rg = fc * kWg[3];
  double ra = std::fabs(rk);
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double f1 = f(c - dx);
    double f2 = f(c + dx);
    rk += kWgk[j] * (f1 + f2);
    ra += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, rk * h, std::fabs((rk - rg) * h), ra * std::fabs(h)};
}

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod over the given breakpoints. Stops when the
// summed error is below max(abs_tol, rel_tol * |I|) or the evaluation budget
// is spent (converged = false).
template <class F>
Result integrate(F&& f, const std::vector<double>& breaks, double abs_tol,
                 double rel_tol, long budget) {
  auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  Result r;
  double total = 0.0, err = 0.0, absum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel p = gk15(f, breaks[i], breaks[i + 1]);
    r.evaluations += 15;
    total += p.value;
    err += p.error;
    absum += p.abs_value;
    heap.push(p);
  }
  auto done = [&] {
    double floor = 50.0 * 2.2e-16 * absum;
    return err <= std::max({abs_tol, rel_tol * std::fabs(total), floor});
  };
  while (!done()) {
    if (r.evaluations + 30 > budget || heap.empty()) {
      r.value = total;
      r.error = err;
      return r;
    }
    Panel p = heap.top();
    heap.pop();
    double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      // cannot split further; freeze this panel
      r.value = total;
      r.error = err;
      return r;
    }
    Panel l = gk15(f, p.a, m);
    Panel u = gk15(f, m, p.b);
    r.evaluations += 30;
    total += l.value + u.value - p.value;
    err += l.error + u.error - p.error;
    absum += l.abs_value + u.abs_value - p.abs_value;
    heap.push(l);
    heap.push(u);
  }
  r.value = total;
  r.error = err;
  r.converged = true;
  return r;
}

template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 long budget) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, abs_tol,
                   rel_tol, budget);
}

}  // namespace wpd::quad
