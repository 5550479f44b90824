#include "weibullpd/fox_h.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <unordered_map>

#include <boost/math/tools/minima.hpp>

#include "weibullpd/errors.hpp"
#include "weibullpd/quadrature.hpp"

namespace wpd::fox {

namespace {

using Clock = std::chrono::steady_clock;
constexpr Complex kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxPanels = 3000;
constexpr double kLegPanel = 2.0;
// panels whose error is at this level of the L1 norm are pure cancellation noise
constexpr double kRoundoff = 1e3 * kEps;

// value = m * exp(e)
struct Scaled {
  Complex m{1.0, 0.0};
  double e = 0.0;
};

Scaled from_log(Complex lg) { return {std::polar(1.0, lg.imag()), lg.real()}; }
Scaled operator*(Scaled a, Scaled b) { return {a.m * b.m, a.e + b.e}; }
Complex to_complex(Scaled a) {
  if (a.m == Complex(0.0)) return 0.0;
  return a.m * std::exp(a.e);
}

struct Factor {
  double c0;
  std::vector<double> coef;
  int sign;
  std::vector<std::size_t> axes;
};

// s = origin + dir * t over consecutive breaks, ds = dir * weight * dt.
// Breaks start at the anchor; a truncatable segment stops once its panels
// become negligible.
struct Segment {
  Complex origin;
  Complex dir;
  double weight;
  std::vector<double> breaks;
  bool truncate = false;
};

struct PairHash {
  std::size_t operator()(const std::pair<double, double>& p) const {
    std::uint64_t a, b;
    std::memcpy(&a, &p.first, sizeof a);
    std::memcpy(&b, &p.second, sizeof b);
    return std::hash<std::uint64_t>()(a * 0x9E3779B97F4A7C15ULL ^ b);
  }
};

struct Context {
  std::vector<Factor> factors;
  std::vector<Complex> logx;
  std::vector<std::vector<Segment>> paths;
  std::vector<std::size_t> order;
  std::vector<ContourKind> kinds;
  bool saddle_shift = false;
  double half = 0.0, width = 0.0;
  double rel_tol = 1e-8;
  long evals = 0;
  bool budget_hit = false;
  // single-axis factors recur at the same nodes for every outer node
  std::vector<std::unordered_map<std::pair<double, double>, Complex, PairHash>> cache;
};

Complex factor_log(Context& ctx, std::size_t j, const std::vector<Complex>& s) {
  const Factor& f = ctx.factors[j];
  if (f.axes.size() == 1) {
    Complex sv = s[f.axes[0]];
    auto key = std::make_pair(sv.real(), sv.imag());
    auto& c = ctx.cache[j];
    auto it = c.find(key);
    if (it != c.end()) return it->second;
    Complex v;
    try {
      v = double(f.sign) * ln_gamma(f.c0 + f.coef[f.axes[0]] * sv);
    } catch (const PoleError&) {
      throw PoleError("gamma factor at a pole", static_cast<int>(j));
    }
    if (c.size() < 200000) c.emplace(key, v);
    return v;
  }
  Complex arg = f.c0;
  for (std::size_t l : f.axes) arg += f.coef[l] * s[l];
  try {
    return double(f.sign) * ln_gamma(arg);
  } catch (const PoleError&) {
    throw PoleError("gamma factor at a pole", static_cast<int>(j));
  }
}

template <class F>
Scaled integrate_path(const std::vector<Segment>& segs, F&& f, Context& ctx) {
  struct Rec {
    std::size_t seg;
    double a, b;
    Complex val;
    double err, l1;
  };
  double e_ref = -INFINITY;
  std::vector<Rec> panels;

  auto eval_panel = [&](std::size_t si, double a, double b) {
    const Segment& sg = segs[si];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 15> t;
    std::array<Scaled, 15> v;
    t[0] = c;
    for (int j = 0; j < 7; ++j) {
      t[1 + 2 * j] = c - h * quad::kXgk[j];
      t[2 + 2 * j] = c + h * quad::kXgk[j];
    }
    double emax = -INFINITY;
    for (int i = 0; i < 15; ++i) {
      v[i] = f(sg.origin + sg.dir * t[i]);
      if (v[i].m != Complex(0.0)) emax = std::max(emax, v[i].e);
    }
    ctx.evals += 15;
    if (std::isfinite(emax) && (e_ref == -INFINITY || emax > e_ref + 300.0)) {
      if (e_ref != -INFINITY) {
        double r = std::exp(e_ref - emax);
        for (auto& p : panels) {
          p.val *= r;
          p.err *= r;
          p.l1 *= r;
        }
      }
      e_ref = emax;
    }
    std::array<Complex, 15> fv;
    for (int i = 0; i < 15; ++i)
      fv[i] = v[i].m == Complex(0.0) ? Complex(0.0) : v[i].m * std::exp(v[i].e - e_ref);
    Complex k = quad::kWgk[7] * fv[0];
    Complex g = quad::kWg[3] * fv[0];
    double l1 = quad::kWgk[7] * std::abs(fv[0]);
    for (int j = 0; j < 7; ++j) {
      Complex pair = fv[1 + 2 * j] + fv[2 + 2 * j];
      k += quad::kWgk[j] * pair;
      l1 += quad::kWgk[j] * (std::abs(fv[1 + 2 * j]) + std::abs(fv[2 + 2 * j]));
      if (j % 2 == 1) g += quad::kWg[j / 2] * pair;
    }
    const Complex jac = sg.dir * sg.weight * h;
    return Rec{si, a, b, k * jac, std::abs((k - g) * jac), l1 * std::abs(jac)};
  };

  const double tail = 1e-3 * ctx.rel_tol;
  for (std::size_t si = 0; si < segs.size(); ++si) {
    int quiet = 0;
    for (std::size_t i = 0; i + 1 < segs[si].breaks.size(); ++i) {
      panels.push_back(eval_panel(si, segs[si].breaks[i], segs[si].breaks[i + 1]));
      if (!segs[si].truncate) continue;
      double top = 0.0;
      for (const auto& p : panels) top = std::max(top, p.l1);
      quiet = panels.back().l1 < tail * top ? quiet + 1 : 0;
      if (quiet >= 3) break;
    }
  }

  while (true) {
    Complex total = 0.0;
    double err = 0.0, l1 = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].val;
      err += panels[i].err;
      l1 += panels[i].l1;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (e_ref == -INFINITY) return {Complex(0.0), 0.0};
    if (err <= std::max(ctx.rel_tol * std::abs(total), kRoundoff * l1))
      return {total, e_ref};
    Rec w = panels[worst];
    double mid = 0.5 * (w.a + w.b);
    if (panels.size() >= kMaxPanels || !((mid - w.a) * (mid - w.b) < 0.0)) {
      ctx.budget_hit = true;
      return {total, e_ref};
    }
    panels[worst] = eval_panel(w.seg, w.a, mid);
    panels.push_back(eval_panel(w.seg, mid, w.b));
  }
}

bool intersects(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  for (auto x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

Scaled eval_set(Context& ctx, const std::vector<std::size_t>& axes,
                const std::vector<std::size_t>& facs, std::vector<Complex>& s);
std::vector<Segment> build_path(ContourKind kind, double eps, double half,
                                double width, double height);

// Real point of the pole-free strip where |integrand| is smallest; the vertical
// line through it crosses the saddle. NaN if the strip is empty.
double saddle_offset(Context& ctx, std::size_t a, const std::vector<std::size_t>& facs,
                     std::vector<Complex>& s) {
  double lo = -INFINITY, hi = INFINITY;
  for (auto j : facs) {
    const Factor& f = ctx.factors[j];
    if (f.sign < 0) continue;
    double rest = f.c0;
    for (auto l : f.axes)
      if (l != a) rest += f.coef[l] * s[l].real();
    double d = f.coef[a];
    if (d > 0.0) lo = std::max(lo, -rest / d);
    if (d < 0.0) hi = std::min(hi, rest / -d);
  }
  if (!(lo < hi)) return NAN;
  if (!std::isfinite(lo)) lo = hi - 64.0 * (1.0 + std::fabs(hi));
  if (!std::isfinite(hi)) hi = lo + 64.0 * (1.0 + std::fabs(lo));
  auto g = [&](double x) {
    Complex lg = -x * ctx.logx[a];
    for (auto j : facs) {
      const Factor& f = ctx.factors[j];
      Complex arg = f.c0 + f.coef[a] * x;
      for (auto l : f.axes)
        if (l != a) arg += f.coef[l] * s[l];
      lg += double(f.sign) * ln_gamma(arg);
    }
    return lg.real();
  };
  const double pad = 1e-3 * (hi - lo);
  return boost::math::tools::brent_find_minima(g, lo + pad, hi - pad, 30).first;
}

Scaled eval_component(Context& ctx, const std::vector<std::size_t>& comp,
                      const std::vector<std::size_t>& facs, std::vector<Complex>& s) {
  std::size_t a = comp[0];
  for (std::size_t o : ctx.order)
    if (std::find(comp.begin(), comp.end(), o) != comp.end()) {
      a = o;
      break;
    }
  std::vector<std::size_t> rest;
  for (auto l : comp)
    if (l != a) rest.push_back(l);
  std::vector<std::size_t> local, inner;
  for (auto j : facs)
    (intersects(ctx.factors[j].axes, rest) ? inner : local).push_back(j);

  auto integrand = [&](Complex sa) {
    s[a] = sa;
    Complex lg = -sa * ctx.logx[a];
    for (auto j : local) lg += factor_log(ctx, j, s);
    Scaled v = from_log(lg);
    if (!rest.empty()) v = v * eval_set(ctx, rest, inner, s);
    return v;
  };
  const std::vector<Segment>* path = &ctx.paths[a];
  std::vector<Segment> shifted;
  if (ctx.saddle_shift && rest.empty() && ctx.kinds[a] == ContourKind::vertical) {
    double x = saddle_offset(ctx, a, local, s);
    if (std::isfinite(x)) {
      shifted = build_path(ContourKind::vertical, x, ctx.half, ctx.width, 1.0);
      path = &shifted;
    }
  }
  Scaled r = integrate_path(*path, integrand, ctx);
  r.m /= 2.0 * kPi * kI;
  return r;
}

Scaled eval_set(Context& ctx, const std::vector<std::size_t>& axes,
                const std::vector<std::size_t>& facs, std::vector<Complex>& s) {
  // connected components of the axes under the coupling of the factors
  std::vector<int> label(ctx.logx.size(), -1);
  int ncomp = 0;
  for (auto start : axes) {
    if (label[start] >= 0) continue;
    std::vector<std::size_t> stack{start};
    label[start] = ncomp;
    while (!stack.empty()) {
      auto l = stack.back();
      stack.pop_back();
      for (auto j : facs) {
        const auto& fa = ctx.factors[j].axes;
        if (std::find(fa.begin(), fa.end(), l) == fa.end()) continue;
        for (auto m : fa)
          if (label[m] < 0 && std::find(axes.begin(), axes.end(), m) != axes.end()) {
            label[m] = ncomp;
            stack.push_back(m);
          }
      }
    }
    ++ncomp;
  }
  Scaled r;
  for (int c = 0; c < ncomp; ++c) {
    std::vector<std::size_t> comp, cf;
    for (auto l : axes)
      if (label[l] == c) comp.push_back(l);
    for (auto j : facs)
      if (intersects(ctx.factors[j].axes, comp)) cf.push_back(j);
    r = r * eval_component(ctx, comp, cf, s);
  }
  return r;
}

// 0, w, 2w, 4w, ... up to half
std::vector<double> graded_breaks(double w, double half) {
  std::vector<double> out{0.0};
  for (double t = w; t < half; t *= 2.0) out.push_back(t);
  out.push_back(half);
  return out;
}

std::vector<double> uniform_breaks(double a, double b, double step) {
  std::vector<double> out{a};
  int n = std::max(1, static_cast<int>(std::ceil(std::fabs(b - a) / step - 1e-9)));
  for (int i = 1; i < n; ++i) out.push_back(a + (b - a) * i / n);
  out.push_back(b);
  return out;
}

std::vector<Segment> build_path(ContourKind kind, double eps, double half,
                                double width, double height) {
  if (kind == ContourKind::vertical) {
    auto up = graded_breaks(width, half);
    auto down = up;
    for (auto& t : down) t = -t;
    return {Segment{eps, kI, 1.0, up, true}, Segment{eps, kI, -1.0, down, true}};
  }
  // legs run leftwards from the anchor; their panels keep a fixed width and
  // adaptive bisection refines them
  auto leg = uniform_breaks(eps, eps - half, kLegPanel);
  return {
      Segment{eps, kI, 1.0, uniform_breaks(-height, height, std::min(width, height))},
      Segment{Complex(0.0, -height), 1.0, -1.0, leg, true},
      Segment{Complex(0.0, height), 1.0, 1.0, leg, true},
  };
}

Complex log_x(Complex x, int phase) {
  if (x.imag() == 0.0 && x.real() < 0.0)
    return Complex(std::log(-x.real()), phase >= 0 ? kPi : -kPi);
  return std::log(x);
}

}  // namespace

void validate(const FoxHSpec& spec) {
  const std::size_t L = spec.dims();
  if (L == 0) throw DomainError("Fox H spec needs at least one variable");
  if (spec.dmat.size() != spec.delta.size() || spec.bmat.size() != spec.beta.size())
    throw DomainError("Fox H spec: coefficient rows do not match");
  for (const auto& r : spec.dmat)
    if (r.size() != L) throw DomainError("Fox H spec: D has wrong width");
  for (const auto& r : spec.bmat)
    if (r.size() != L) throw DomainError("Fox H spec: B has wrong width");
  for (std::size_t l = 0; l < L; ++l) {
    bool any = false;
    for (const auto& r : spec.dmat) any = any || r[l] != 0.0;
    if (!any) throw DomainError("Fox H spec: variable without numerator gamma");
    if (spec.x[l] == Complex(0.0)) throw DomainError("Fox H spec: zero argument");
  }
}

Complex theta(const FoxHSpec& spec, const std::vector<Complex>& s) {
  validate(spec);
  if (s.size() != spec.dims()) throw DomainError("theta: wrong number of variables");
  Complex lg = 0.0;
  auto add = [&](const std::vector<double>& c0, const std::vector<std::vector<double>>& m,
                 double sign, int offset) {
    for (std::size_t j = 0; j < c0.size(); ++j) {
      Complex arg = c0[j];
      for (std::size_t l = 0; l < s.size(); ++l) arg += m[j][l] * s[l];
      try {
        lg += sign * ln_gamma(arg);
      } catch (const PoleError&) {
        throw PoleError("theta: gamma factor at a pole", offset + static_cast<int>(j));
      }
    }
  };
  add(spec.delta, spec.dmat, 1.0, 0);
  add(spec.beta, spec.bmat, -1.0, static_cast<int>(spec.delta.size()));
  return std::exp(lg);
}

bool offsets_feasible(const FoxHSpec& spec, const std::vector<double>& eps) {
  if (eps.size() != spec.dims()) return false;
  for (std::size_t j = 0; j < spec.delta.size(); ++j) {
    double v = spec.delta[j];
    for (std::size_t l = 0; l < eps.size(); ++l) v += spec.dmat[j][l] * eps[l];
    if (!(v > 0.0)) return false;
  }
  return true;
}

ContourConfig choose_offsets(const FoxHSpec& spec) {
  validate(spec);
  const std::size_t L = spec.dims();
  // Appendix grid first, then finer steps, then wider boxes
  std::vector<std::pair<double, int>> grids;
  for (int steps = 2; steps <= 32; steps *= 2) grids.emplace_back(1.0, steps);
  for (double box : {2.0, 4.0, 8.0}) grids.emplace_back(box, L > 2 ? 8 : 32);
  for (auto [box, steps] : grids) {
    const double h = 1.0 / steps;
    const int per_axis = static_cast<int>(2 * box * steps) + 1;
    std::vector<int> idx(L, 0);
    while (true) {
      std::vector<double> eps(L);
      for (std::size_t l = 0; l < L; ++l) eps[l] = -box + idx[l] * h;
      if (offsets_feasible(spec, eps)) {
        ContourConfig c;
        c.offsets = eps;
        return c;
      }
      int l = static_cast<int>(L) - 1;
      while (l >= 0 && ++idx[l] == per_axis) idx[l--] = 0;
      if (l < 0) break;
    }
  }
  throw NoFeasibleOffset("no contour offsets satisfy the numerator gamma constraints");
}

Complex eval(const FoxHSpec& spec, const ContourConfig& contour, double tol,
             EvalStats* stats) {
  validate(spec);
  const std::size_t L = spec.dims();
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (!offsets_feasible(spec, contour.offsets))
    throw NoFeasibleOffset("contour offsets are not feasible for this spec");
  if (!contour.kinds.empty() && contour.kinds.size() != L)
    throw DomainError("contour kinds do not match the dimension");

  Context ctx;
  auto add_factors = [&](const std::vector<double>& c0,
                         const std::vector<std::vector<double>>& m, int sign) {
    for (std::size_t j = 0; j < c0.size(); ++j) {
      Factor f{c0[j], m[j], sign, {}};
      for (std::size_t l = 0; l < L; ++l)
        if (m[j][l] != 0.0) f.axes.push_back(l);
      ctx.factors.push_back(std::move(f));
    }
  };
  add_factors(spec.delta, spec.dmat, +1);
  add_factors(spec.beta, spec.bmat, -1);
  for (std::size_t l = 0; l < L; ++l)
    ctx.logx.push_back(log_x(spec.x[l], contour.negative_real_phase));
  ctx.order = contour.order;
  ctx.kinds = contour.kinds;
  ctx.kinds.resize(L, ContourKind::vertical);
  ctx.saddle_shift = contour.saddle_shift;
  for (std::size_t l = 0; l < L; ++l)
    if (std::find(ctx.order.begin(), ctx.order.end(), l) == ctx.order.end())
      ctx.order.push_back(l);
  ctx.rel_tol = std::min(1e-3, 0.1 * tol);

  // factors without variables are constants
  Complex constant = 0.0;
  std::vector<std::size_t> facs;
  for (std::size_t j = 0; j < ctx.factors.size(); ++j) {
    if (ctx.factors[j].axes.empty())
      constant += double(ctx.factors[j].sign) * ln_gamma(Complex(ctx.factors[j].c0));
    else
      facs.push_back(j);
  }
  std::vector<std::size_t> axes(L);
  for (std::size_t l = 0; l < L; ++l) axes[l] = l;

  Complex prev = 0.0, cur = 0.0;
  EvalStats st;
  for (int level = 0; level <= contour.max_refinements; ++level) {
    const double half = contour.half_length * std::pow(2.0, level);
    const double width = contour.panel_width / std::pow(2.0, level);
    ctx.half = half;
    ctx.width = width;
    ctx.paths.clear();
    ctx.cache.assign(ctx.factors.size(), {});
    for (std::size_t l = 0; l < L; ++l) {
      auto kind = contour.kinds.empty() ? ContourKind::vertical : contour.kinds[l];
      ctx.paths.push_back(build_path(kind, contour.offsets[l], half, width,
                                     contour.loop_height));
    }
    ctx.budget_hit = false;
    std::vector<Complex> s(L);
    Scaled r = eval_set(ctx, axes, facs, s);
    prev = cur;
    cur = to_complex(r) * std::exp(constant);
    st.levels = level + 1;
    st.previous = prev;
    st.budget_hit = ctx.budget_hit;
    st.evaluations = ctx.evals;
    if (stats) *stats = st;
    if (level > 0 && !ctx.budget_hit && std::abs(cur - prev) <= tol * std::abs(cur))
      return cur;
  }
  throw NotConverged("Fox H contour integral did not settle", prev.real(), cur.real());
}

FoxHSpec dagger_bundle(const DetectorConfig& cfg, const AlphaMuParams& q) {
  const double n = cfg.n_pulses, a = q.alpha;
  FoxHSpec s;
  s.x = {series_psi(cfg, q), -1.0};
  s.delta = {0.0, (n - 1) / 2, a * q.mu - n / 2 + 0.5, n / 2 + 0.5};
  s.dmat = {{1, 0}, {0, 1}, {-a, -1}, {0, -1}};
  s.beta = {(n - 1) / 2 + 1};
  s.bmat = {{0, -1}};
  return s;
}

FoxHSpec ddagger_bundle(const DetectorConfig& cfg, const AlphaMuParams& q) {
  const double n = cfg.n_pulses, a = q.alpha;
  FoxHSpec s;
  s.x = {series_psi(cfg, q), -1.0, cfg.gamma};
  s.delta = {0.0, (n - 1) / 2, a * q.mu - n / 2 + 0.5, n / 2 + 0.5, 0.0};
  s.dmat = {{1, 0, 0}, {0, 1, 0}, {-a, -1, 0}, {0, -1, 1}, {0, 0, -1}};
  s.beta = {(n - 1) / 2 + 1, 1.0};
  s.bmat = {{0, -1, 0}, {0, 0, -1}};
  return s;
}

Complex pd_prefactor(const DetectorConfig& cfg, const AlphaMuParams& q) {
  double lg = std::log(q.alpha) + q.mu * std::log(q.mu) +
              q.alpha * q.mu * std::log(2.0 * cfg.sigma2) - q.mu * std::log(q.omega) -
              ln_gamma(q.mu);
  // i^(1-N)
  return std::exp(lg) * std::polar(1.0, (1 - cfg.n_pulses) * kPi / 2);
}

EvalResult pd_fox(const DetectorConfig& cfg, const AlphaMuParams& q, double tol) {
  const auto t0 = Clock::now();
  validate(cfg);
  validate(q);
  if (!(cfg.gamma > 0.0)) throw DomainError("Fox H path requires gamma > 0");

  EvalResult r;
  auto run = [&](int phase) {
    r.terms_used = 0;
    Complex h[2];
    double drift = 0.0;
    for (int b = 0; b < 2; ++b) {
      FoxHSpec spec = b == 0 ? dagger_bundle(cfg, q) : ddagger_bundle(cfg, q);
      ContourConfig c = choose_offsets(spec);
      c.kinds.assign(spec.dims(), ContourKind::vertical);
      c.kinds[1] = ContourKind::loop;
      c.order = b == 0 ? std::vector<std::size_t>{1, 0} : std::vector<std::size_t>{1, 0, 2};
      c.negative_real_phase = phase;
      c.max_refinements = 6;
      c.saddle_shift = true;
      EvalStats st;
      h[b] = eval(spec, c, tol, &st);
      r.terms_used += st.evaluations;
      drift += std::abs(h[b] - st.previous);
    }
    Complex phi = pd_prefactor(cfg, q);
    r.truncation_estimate = std::abs(phi) * drift;
    return phi * (h[0] - h[1]);
  };
  Complex p = run(+1);
  if (std::fabs(p.imag()) >= 1e-4) p = run(-1);
  if (std::fabs(p.imag()) >= 1e-4)
    throw ImaginaryResidue("Fox H result has a large imaginary part", p.imag());
  r.unclamped = p.real();
  r.imag_residue = p.imag();
  r.value = std::clamp(p.real(), 0.0, 1.0);
  r.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

}  // namespace wpd::fox
