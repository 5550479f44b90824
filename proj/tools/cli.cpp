#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <iterator>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "weibullpd/c_api.h"
#include "weibullpd/reference_settings.h"

using json = nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string mode = "pd-point";
  double alpha_tilde = 1.0;
  std::vector<double> omega_tilde{1.0};
  std::vector<int> pulses{1};
  double sigma2 = 1.0;
  std::vector<double> gamma;
  std::vector<double> pfa;
  std::vector<double> snr_db_grid;
  std::vector<double> gamma_grid;
  std::vector<double> eta_grid;
  std::string method = "all";
  double tol = 1e-4;
  long long trials = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 0;
};

// "start:stop:count" or "a,b,c"
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c, ':');
      double lo = std::stod(a), hi = std::stod(b);
      int n = std::stoi(c);
      if (n < 1) throw ConfigError("grid count must be positive: " + text);
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse grid: " + text);
  }
  if (out.empty()) throw ConfigError("empty grid: " + text);
  return out;
}

std::vector<double> json_grid(const json& v) {
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

void apply_json(RunSpec& s, const json& j) {
  static const std::vector<std::string> known{
      "mode",       "alpha_tilde", "omega_tilde", "pulses", "sigma2",  "gamma",
      "pfa",        "snr_db_grid", "gamma_grid",  "eta_grid", "method", "tol",
      "trials",     "seed",        "out",         "threads"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key: " + it.key());
  try {
    if (j.contains("mode")) s.mode = j["mode"].get<std::string>();
    if (j.contains("alpha_tilde")) s.alpha_tilde = j["alpha_tilde"].get<double>();
    if (j.contains("omega_tilde")) s.omega_tilde = json_grid(j["omega_tilde"]);
    if (j.contains("pulses")) {
      s.pulses.clear();
      for (double v : json_grid(j["pulses"])) s.pulses.push_back(static_cast<int>(v));
    }
    if (j.contains("sigma2")) s.sigma2 = j["sigma2"].get<double>();
    if (j.contains("gamma")) s.gamma = json_grid(j["gamma"]);
    if (j.contains("pfa")) s.pfa = json_grid(j["pfa"]);
    if (j.contains("snr_db_grid")) s.snr_db_grid = json_grid(j["snr_db_grid"]);
    if (j.contains("gamma_grid")) s.gamma_grid = json_grid(j["gamma_grid"]);
    if (j.contains("eta_grid")) s.eta_grid = json_grid(j["eta_grid"]);
    if (j.contains("method")) s.method = j["method"].get<std::string>();
    if (j.contains("tol")) s.tol = j["tol"].get<double>();
    if (j.contains("trials")) s.trials = j["trials"].get<long long>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) s.out = j["out"].get<std::string>();
    if (j.contains("threads")) s.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

json to_json(const RunSpec& s) {
  return json{{"mode", s.mode},         {"alpha_tilde", s.alpha_tilde},
              {"omega_tilde", s.omega_tilde}, {"pulses", s.pulses},
              {"sigma2", s.sigma2},     {"gamma", s.gamma},
              {"pfa", s.pfa},           {"snr_db_grid", s.snr_db_grid},
              {"gamma_grid", s.gamma_grid}, {"eta_grid", s.eta_grid},
              {"method", s.method},     {"tol", s.tol},
              {"trials", s.trials},     {"seed", s.seed},
              {"out", s.out},           {"threads", s.threads}};
}

void check(const RunSpec& s) {
  static const std::vector<std::string> modes{"pd-point", "pd-vs-threshold", "pd-vs-snr",
                                              "pdf-overlay", "benchmark"};
  static const std::vector<std::string> methods{"series", "fox", "quadrature", "mc", "all"};
  if (std::find(modes.begin(), modes.end(), s.mode) == modes.end())
    throw ConfigError("unknown mode: " + s.mode);
  if (std::find(methods.begin(), methods.end(), s.method) == methods.end())
    throw ConfigError("unknown method: " + s.method);
  if (s.mode == "benchmark") return;
  if (!(s.alpha_tilde > 0.0)) throw ConfigError("alpha-tilde must be positive");
  for (double w : s.omega_tilde)
    if (!(w > 0.0)) throw ConfigError("omega-tilde must be positive");
  if (s.pulses.empty()) throw ConfigError("pulses must not be empty");
  for (int n : s.pulses)
    if (n < 1) throw ConfigError("pulses must be positive");
  if (!(s.sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
  if (!(s.tol > 0.0)) throw ConfigError("tol must be positive");
  if (s.trials < 1) throw ConfigError("trials must be positive");
  if (s.threads < 0) throw ConfigError("threads must be non-negative");
  for (double g : s.gamma)
    if (!(g >= 0.0)) throw ConfigError("gamma must be non-negative");
  for (double g : s.gamma_grid)
    if (!(g >= 0.0)) throw ConfigError("gamma grid values must be non-negative");
  for (double p : s.pfa)
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("pfa must lie in (0, 1]");
  if (s.mode == "pd-vs-threshold") {
    if (s.gamma_grid.empty()) throw ConfigError("pd-vs-threshold needs --gamma-grid");
    if (!s.gamma.empty() || !s.pfa.empty())
      throw ConfigError("pd-vs-threshold takes its thresholds from --gamma-grid only");
  } else if (s.mode != "pdf-overlay") {
    if (s.gamma.empty() == s.pfa.empty())
      throw ConfigError("exactly one of --gamma or --pfa is required");
  }
  if (s.mode == "pd-vs-snr" && s.snr_db_grid.empty())
    throw ConfigError("pd-vs-snr needs --snr-db-grid");
}

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\r\n";
}

struct Context {
  wpd_context* h = nullptr;
  Context() {
    if (wpd_context_create(&h) != WPD_OK) throw std::runtime_error("cannot create context");
  }
  ~Context() { wpd_context_destroy(h); }
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;
};

struct Point {
  int n;
  double omega_tilde;
  double gamma = NAN;
  double pfa = NAN;
  double snr_db = NAN;
  double eta = NAN;
};

struct Outcome {
  std::vector<std::string> rows;
  bool numeric_failure = false;
};

bool is_numeric_failure(int st) { return st != WPD_OK && st != WPD_E_NULL_ARGUMENT; }

const std::vector<std::string> kPdHeader{
    "mode",      "point",    "n_pulses",  "alpha_tilde",     "omega_tilde",  "sigma2",
    "gamma",     "pfa",      "snr_db",    "fit_alpha",       "fit_mu",       "fit_omega",
    "method",    "value",    "terms_used", "truncation_estimate", "imag_residue",
    "mc_half_width", "status", "note",    "wall_time"};

Outcome eval_pd_point(const RunSpec& s, std::size_t index, const Point& p, int mc_threads) {
  Context ctx;
  Outcome out;
  wpd_weibull w{s.alpha_tilde, p.omega_tilde};
  wpd_moments m{};
  wpd_alpha_mu q{NAN, NAN, NAN};
  int st = wpd_sum_moments(ctx.h, &w, p.n, &m);
  std::string fit_note;
  if (st == WPD_OK) st = wpd_fit_alpha_mu(ctx.h, &m, &q, nullptr);
  if (st != WPD_OK) fit_note = wpd_last_error(ctx.h);
  const int fit_status = st;
  wpd_detector det{p.n, s.sigma2, p.gamma};

  auto emit = [&](const std::string& method, double value, double terms, double trunc,
                  double imag, double hw, const std::string& status, const std::string& note,
                  double wall) {
    out.rows.push_back(csv_row({s.mode, std::to_string(index), std::to_string(p.n),
                                num(s.alpha_tilde), num(p.omega_tilde), num(s.sigma2),
                                num(p.gamma), num(p.pfa), num(p.snr_db), num(q.alpha),
                                num(q.mu), num(q.omega), method, num(value), num(terms),
                                num(trunc), num(imag), num(hw), status, note, num(wall)}));
  };

  std::vector<std::string> methods;
  if (s.method == "all")
    methods = {"series", "fox", "quadrature", "mc"};
  else
    methods = {s.method};

  for (const auto& method : methods) {
    if (fit_status != WPD_OK) {
      emit(method, NAN, NAN, NAN, NAN, NAN, wpd_status_name(fit_status), fit_note, NAN);
      out.numeric_failure = true;
      continue;
    }
    wpd_eval r{};
    if (method == "series") {
      int usable = 1;
      char why[256] = {0};
      st = wpd_series_precondition(ctx.h, &det, &q, &usable, why, sizeof why);
      if (st == WPD_OK && !usable && s.method == "all") {
        emit(method, NAN, NAN, NAN, NAN, NAN, "skipped", why, NAN);
        continue;
      }
      st = wpd_pd_series(ctx.h, &det, &q, s.tol, &r);
    } else if (method == "fox") {
      st = wpd_pd_fox(ctx.h, &det, &q, s.tol, &r);
    } else if (method == "quadrature") {
      st = wpd_pd_quadrature(ctx.h, &det, &q, &r);
    } else {
      wpd_mc_config mc{};
      mc.trials = s.trials;
      mc.seed = s.seed;
      mc.detector = det;
      mc.target_kind = WPD_TARGET_WEIBULL;
      mc.weibull = w;
      mc.threads = mc_threads;
      wpd_mc_result res{};
      auto t0 = std::chrono::steady_clock::now();
      st = wpd_mc_run(ctx.h, &mc, &res);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (st == WPD_OK)
        emit(method, res.estimate, static_cast<double>(res.trials), NAN, NAN,
             res.half_width_99, "ok", "", wall);
      else {
        emit(method, NAN, NAN, NAN, NAN, NAN, wpd_status_name(st), wpd_last_error(ctx.h), NAN);
        out.numeric_failure = true;
      }
      continue;
    }
    if (st == WPD_OK) {
      emit(method, r.value, static_cast<double>(r.terms_used), r.truncation_estimate,
           method == "fox" ? r.imag_residue : NAN, NAN, "ok", "", r.wall_time);
    } else {
      emit(method, NAN, NAN, NAN, NAN, NAN, wpd_status_name(st), wpd_last_error(ctx.h), NAN);
      out.numeric_failure = out.numeric_failure || is_numeric_failure(st);
    }
  }
  return out;
}

const std::vector<std::string> kPdfHeader{
    "point",       "n_pulses", "alpha_tilde", "omega_tilde", "fit_alpha",
    "fit_mu",      "fit_omega", "eta",        "exact_pdf",   "exact_terms",
    "alpha_mu_pdf", "alpha_mu_cdf", "status", "note"};

Outcome eval_pdf_point(const RunSpec& s, std::size_t index, const Point& p) {
  Context ctx;
  Outcome out;
  wpd_weibull w{s.alpha_tilde, p.omega_tilde};
  wpd_moments m{};
  wpd_alpha_mu q{NAN, NAN, NAN};
  double exact = NAN, am_pdf = NAN, am_cdf = NAN;
  int terms = 0;
  int st = wpd_sum_moments(ctx.h, &w, p.n, &m);
  if (st == WPD_OK) st = wpd_fit_alpha_mu(ctx.h, &m, &q, nullptr);
  if (st == WPD_OK) st = wpd_alpha_mu_pdf(ctx.h, &q, p.eta, &am_pdf);
  if (st == WPD_OK) st = wpd_alpha_mu_cdf(ctx.h, &q, p.eta, &am_cdf);
  if (st == WPD_OK) st = wpd_exact_sum_pdf(ctx.h, &w, p.n, p.eta, 1e-6, &exact, &terms);
  std::string status = st == WPD_OK ? "ok" : wpd_status_name(st);
  std::string note = st == WPD_OK ? "" : wpd_last_error(ctx.h);
  out.numeric_failure = is_numeric_failure(st);
  out.rows.push_back(csv_row({std::to_string(index), std::to_string(p.n), num(s.alpha_tilde),
                              num(p.omega_tilde), num(q.alpha), num(q.mu), num(q.omega),
                              num(p.eta), num(exact), st == WPD_OK ? std::to_string(terms) : "",
                              num(am_pdf), num(am_cdf), status, note}));
  return out;
}

const std::vector<std::string> kBenchHeader{
    "row",           "reading",        "n_pulses",       "alpha_tilde",   "mu_tilde",
    "omega_tilde",   "sigma2",         "gamma",          "fit_alpha",     "fit_mu",
    "fit_omega",     "published_pd",   "series_value",   "series_terms",  "series_truncation",
    "series_status", "quadrature_value", "abs_diff",     "published_gap", "note",
    "series_time",   "quadrature_time", "time_ratio"};

// reading b: (alpha, mu, Omega) = (alpha~, mu~, Omega~); reading a: fit from Weibull pulses
Outcome eval_benchmark_row(const RunSpec& s, std::size_t index) {
  const std::size_t row = index / 2;
  const bool fitted = index % 2 == 0;
  const auto& ref = wpd_reference_settings[row];
  Context ctx;
  Outcome out;
  wpd_alpha_mu q{ref.alpha_tilde, ref.mu_tilde, ref.omega_tilde};
  int st = WPD_OK;
  std::string note;
  if (fitted) {
    wpd_weibull w{ref.alpha_tilde, ref.omega_tilde};
    wpd_moments m{};
    st = wpd_sum_moments(ctx.h, &w, ref.n_pulses, &m);
    if (st == WPD_OK) st = wpd_fit_alpha_mu(ctx.h, &m, &q, nullptr);
    if (st != WPD_OK) note = wpd_last_error(ctx.h);
  }
  wpd_detector det{ref.n_pulses, 1.0, ref.gamma};
  wpd_eval ser{}, quad{};
  int sst = st, qst = st;
  if (st == WPD_OK) {
    sst = wpd_pd_series(ctx.h, &det, &q, s.tol, &ser);
    if (sst != WPD_OK) note = wpd_last_error(ctx.h);
    qst = wpd_pd_quadrature(ctx.h, &det, &q, &quad);
    if (qst != WPD_OK) note += (note.empty() ? "" : "; ") + std::string(wpd_last_error(ctx.h));
  }
  out.numeric_failure = is_numeric_failure(sst) || is_numeric_failure(qst);
  const bool sok = sst == WPD_OK, qok = qst == WPD_OK;
  out.rows.push_back(csv_row(
      {std::to_string(row + 1), fitted ? "fitted" : "direct", std::to_string(ref.n_pulses),
       num(ref.alpha_tilde), num(ref.mu_tilde), num(ref.omega_tilde), num(1.0), num(ref.gamma),
       num(q.alpha), num(q.mu), num(q.omega), num(ref.published_pd),
       num(sok ? ser.value : NAN), sok ? std::to_string(ser.terms_used) : "",
       num(sok ? ser.truncation_estimate : NAN), sok ? "ok" : wpd_status_name(sst),
       num(qok ? quad.value : NAN), num(sok && qok ? std::fabs(ser.value - quad.value) : NAN),
       num(sok ? std::fabs(ser.value - ref.published_pd) : NAN), note,
       num(sok ? ser.wall_time : NAN), num(qok ? quad.wall_time : NAN),
       num(sok && qok && quad.wall_time > 0.0 ? ser.wall_time / quad.wall_time : NAN)}));
  return out;
}

std::vector<Point> build_points(const RunSpec& s) {
  std::vector<Point> pts;
  Context ctx;
  auto gammas_for = [&](int n) {
    std::vector<std::pair<double, double>> out;  // (gamma, pfa)
    auto pfa_of = [&](double g) {
      wpd_detector d{n, s.sigma2, g};
      double v = NAN;
      wpd_pfa(ctx.h, &d, &v);
      return v;
    };
    if (s.mode == "pd-vs-threshold") {
      for (double g : s.gamma_grid) out.emplace_back(g, pfa_of(g));
    } else if (!s.gamma.empty()) {
      for (double g : s.gamma) out.emplace_back(g, pfa_of(g));
    } else {
      for (double p : s.pfa) {
        double g = NAN;
        if (wpd_threshold_for_pfa(ctx.h, n, p, &g) != WPD_OK)
          throw ConfigError(wpd_last_error(ctx.h));
        out.emplace_back(g, p);
      }
    }
    return out;
  };

  if (s.mode == "pd-vs-snr") {
    for (int n : s.pulses)
      for (auto [g, pf] : gammas_for(n))
        for (double db : s.snr_db_grid) {
          double omega = NAN;
          if (wpd_omega_for_snr(ctx.h, s.alpha_tilde, n, s.sigma2, std::pow(10.0, db / 10.0),
                                &omega) != WPD_OK)
            throw ConfigError(wpd_last_error(ctx.h));
          Point p{n, omega};
          p.gamma = g;
          p.pfa = pf;
          p.snr_db = db;
          pts.push_back(p);
        }
  } else if (s.mode == "pdf-overlay") {
    for (double omega : s.omega_tilde)
      for (int n : s.pulses) {
        std::vector<double> etas = s.eta_grid;
        if (etas.empty()) {
          wpd_weibull w{s.alpha_tilde, omega};
          wpd_moments m{};
          if (wpd_sum_moments(ctx.h, &w, n, &m) != WPD_OK)
            throw ConfigError(wpd_last_error(ctx.h));
          for (int i = 1; i <= 60; ++i) etas.push_back(3.0 * m.m1 * i / 60);
        }
        for (double eta : etas) {
          Point p{n, omega};
          p.eta = eta;
          pts.push_back(p);
        }
      }
  } else {
    for (double omega : s.omega_tilde)
      for (int n : s.pulses)
        for (auto [g, pf] : gammas_for(n)) {
          Point p{n, omega};
          p.gamma = g;
          p.pfa = pf;
          pts.push_back(p);
        }
  }
  return pts;
}

std::string manifest_path(const std::string& csv) {
  auto dot = csv.rfind('.');
  auto slash = csv.find_last_of("/\\");
  std::string stem = dot != std::string::npos && (slash == std::string::npos || dot > slash)
                         ? csv.substr(0, dot)
                         : csv;
  return stem + ".manifest.json";
}

int run(const RunSpec& s, const std::string& out_path) {
  std::vector<std::string> header;
  std::size_t count = 0;
  std::vector<Point> points;
  if (s.mode == "benchmark") {
    header = kBenchHeader;
    count = 2 * std::size(wpd_reference_settings);
  } else {
    points = build_points(s);
    header = s.mode == "pdf-overlay" ? kPdfHeader : kPdHeader;
    count = points.size();
  }

  int workers = s.threads > 0 ? s.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  const int mc_threads = workers > 1 ? 1 : 0;
  std::vector<Outcome> results(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      if (s.mode == "benchmark")
        results[i] = eval_benchmark_row(s, i);
      else if (s.mode == "pdf-overlay")
        results[i] = eval_pdf_point(s, i, points[i]);
      else
        results[i] = eval_pd_point(s, i, points[i], mc_threads);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::ofstream csv(out_path, std::ios::binary);
  if (!csv) throw ConfigError("cannot open output file: " + out_path);
  csv << csv_row(header);
  bool failed = false;
  std::size_t rows = 0;
  for (const auto& r : results) {
    for (const auto& line : r.rows) csv << line;
    rows += r.rows.size();
    failed = failed || r.numeric_failure;
  }
  csv.close();
  const int code = failed ? kExitNumeric : 0;

  json manifest{{"tool", "weibullpd_cli"},
                {"library_version", wpd_version()},
                {"compiler", __VERSION__},
                {"cli11_version", CLI11_VERSION},
                {"json_version", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                     std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                     std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                {"config", to_json(s)},
                {"seed", s.seed},
                {"csv", out_path},
                {"columns", header},
                {"rows", rows},
                {"exit_code", code}};
  std::ofstream mf(manifest_path(out_path));
  mf << manifest.dump(2) << "\n";
  std::cout << "wrote " << rows << " rows to " << out_path << "\n";
  if (failed) std::cerr << "some grid points failed to converge; see the status column\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detection probability of non-coherent radar detectors for Weibull targets"};
  std::string mode, method, out, config, omega, pulses, gamma, pfa, snr_grid, gamma_grid,
      eta_grid;
  double alpha_tilde = 0, sigma2 = 0, tol = 0;
  long long trials = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* o_mode = app.add_option("--mode", mode, "pd-point | pd-vs-threshold | pd-vs-snr | pdf-overlay | benchmark");
  auto* o_alpha = app.add_option("--alpha-tilde", alpha_tilde, "Weibull shape");
  auto* o_omega = app.add_option("--omega-tilde", omega, "Weibull scale E[xi^alpha~] (list or grid)");
  auto* o_pulses = app.add_option("--pulses", pulses, "pulse count (list)");
  auto* o_sigma2 = app.add_option("--sigma2", sigma2, "noise power per component");
  auto* o_gamma = app.add_option("--gamma", gamma, "normalized threshold (list)");
  auto* o_pfa = app.add_option("--pfa", pfa, "target false-alarm probability (list)");
  auto* o_snr = app.add_option("--snr-db-grid", snr_grid, "SNR grid in dB, start:stop:count or list");
  auto* o_ggrid = app.add_option("--gamma-grid", gamma_grid, "threshold grid, start:stop:count or list");
  auto* o_eta = app.add_option("--eta-grid", eta_grid, "density grid for pdf-overlay");
  auto* o_method = app.add_option("--method", method, "series | fox | quadrature | mc | all");
  auto* o_tol = app.add_option("--tol", tol, "series and contour tolerance");
  auto* o_trials = app.add_option("--trials", trials, "Monte-Carlo trials");
  auto* o_seed = app.add_option("--seed", seed, "Monte-Carlo seed");
  auto* o_out = app.add_option("--out", out, "CSV output path");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 for all cores");
  app.add_option("--config", config, "JSON run spec; flags override it");
  o_gamma->excludes(o_pfa);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    RunSpec s;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigError("cannot read config: " + config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!j.is_object()) throw ConfigError("config must be a JSON object");
      apply_json(s, j);
    }
    if (o_mode->count()) s.mode = mode;
    if (o_alpha->count()) s.alpha_tilde = alpha_tilde;
    if (o_omega->count()) s.omega_tilde = parse_grid(omega);
    if (o_pulses->count()) {
      s.pulses.clear();
      for (double v : parse_grid(pulses)) {
        if (v != std::floor(v)) throw ConfigError("pulses must be integers");
        s.pulses.push_back(static_cast<int>(v));
      }
    }
    if (o_sigma2->count()) s.sigma2 = sigma2;
    if (o_gamma->count()) {
      s.gamma = parse_grid(gamma);
      s.pfa.clear();
    }
    if (o_pfa->count()) {
      s.pfa = parse_grid(pfa);
      s.gamma.clear();
    }
    if (o_snr->count()) s.snr_db_grid = parse_grid(snr_grid);
    if (o_ggrid->count()) s.gamma_grid = parse_grid(gamma_grid);
    if (o_eta->count()) s.eta_grid = parse_grid(eta_grid);
    if (o_method->count()) s.method = method;
    if (o_tol->count()) s.tol = tol;
    if (o_trials->count()) s.trials = trials;
    if (o_seed->count()) s.seed = seed;
    if (o_out->count()) s.out = out;
    if (o_threads->count()) s.threads = threads;
    check(s);
    std::string path = s.out.empty() ? "wpd_" + s.mode + ".csv" : s.out;
    return run(s, path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
