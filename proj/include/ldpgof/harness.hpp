// Copyright 2026 The ldpgof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPGOF_HARNESS_HPP_
#define LDPGOF_HARNESS_HPP_

// Monte Carlo risk estimation, separation-radius search, calibration of the
// D_n expectation constant, and scaling sweeps.
//
// Replication r of stream `tag` always draws from derive_seed(master, {r,
// tag}), so results do not depend on the number of worker threads, and the
// same replication seeds are reused at every probed distance.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "ldpgof/alternatives.hpp"
#include "ldpgof/csv.hpp"
#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/privacy.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/rates.hpp"
#include "ldpgof/teststats.hpp"
#include "ldpgof/version.hpp"

namespace ldpgof {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double halfwidth() const { return 0.5 * (hi - lo); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

inline constexpr double kZ95 = 1.959963984540054;

inline Interval wilson_interval(long successes, long trials, double z = kZ95) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw InvalidInput("wilson_interval: need 0 <= successes <= trials, trials > 0");
  }
  const double m = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / m;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / m;
  const double centre = (p + z2 / (2.0 * m)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / m + z2 / (4.0 * m * m));
  return Interval{std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct RiskEstimate {
  double type1 = 0.0;
  std::optional<double> type2;
  // Half-width of type1_ci alone, or of risk_ci() when type2 is present.
  double ci_halfwidth = 0.0;
  int M = 0;
  Interval type1_ci;
  std::optional<Interval> type2_ci;

  double risk() const { return type1 + type2.value_or(0.0); }

  // Sum of the per-error Wilson bounds.
  Interval risk_ci() const {
    if (!type2_ci) return type1_ci;
    return Interval{type1_ci.lo + type2_ci->lo, type1_ci.hi + type2_ci->hi};
  }

  bool operator==(const RiskEstimate& o) const {
    return type1 == o.type1 && type2 == o.type2 && ci_halfwidth == o.ci_halfwidth &&
           M == o.M && type1_ci.lo == o.type1_ci.lo && type1_ci.hi == o.type1_ci.hi &&
           type2_ci.has_value() == o.type2_ci.has_value() &&
           (!type2_ci || (type2_ci->lo == o.type2_ci->lo && type2_ci->hi == o.type2_ci->hi));
  }
};

inline RiskEstimate make_risk_estimate(long null_rejections, std::optional<long> alt_accepts,
                                       int m) {
  RiskEstimate r;
  r.M = m;
  r.type1 = static_cast<double>(null_rejections) / m;
  r.type1_ci = wilson_interval(null_rejections, m);
  if (alt_accepts) {
    r.type2 = static_cast<double>(*alt_accepts) / m;
    r.type2_ci = wilson_interval(*alt_accepts, m);
  }
  r.ci_halfwidth = r.risk_ci().halfwidth();
  return r;
}

// Runs fn(replication, rng) for replication = 0..m-1 on `workers` threads and
// returns how many calls returned true. Integer tallies keep the result
// independent of scheduling.
template <class Fn>
long count_true(int m, std::uint64_t master, std::uint64_t tag, int workers, const Fn& fn) {
  if (m < 0) throw InvalidInput("count_true: negative replication count");
  workers = std::max(1, std::min(workers, m));
  if (workers == 1) {
    long count = 0;
    Rng rng;
    for (int r = 0; r < m; ++r) {
      rng.reseed(derive_seed(master, {static_cast<std::uint64_t>(r), tag}));
      if (fn(r, rng)) ++count;
    }
    return count;
  }
  std::atomic<int> next{0};
  std::atomic<long> total{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      long count = 0;
      Rng rng;
      try {
        for (int r = next.fetch_add(1); r < m; r = next.fetch_add(1)) {
          rng.reseed(derive_seed(master, {static_cast<std::uint64_t>(r), tag}));
          if (fn(r, rng)) ++count;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(m);
      }
      total.fetch_add(count);
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return total.load();
}

inline int sample_length(Mode mode, int n_block) {
  return (mode == Mode::kNonInteractive ? 2 : 3) * n_block;
}

// Rejection count of the test when the data are drawn from p.
inline long count_rejections(const ProbVector& p, const ProbVector& p0,
                             const PrivacyParams& params, Norm norm, Mode mode, int m,
                             std::uint64_t master, std::uint64_t tag, int workers) {
  const CategoricalSampler sampler(p);
  const std::size_t len = static_cast<std::size_t>(sample_length(mode, params.n_block));
  return count_true(m, master, tag, workers, [&](int, Rng& rng) {
    std::vector<int> x(len);
    sampler.fill(x, rng);
    return run_test(mode, std::span<const int>(x), p0, params, norm, rng).reject;
  });
}

struct ExperimentConfig {
  FamilySpec family;
  int n_block = 0;
  double alpha = 1.0;
  double gamma = 0.05;
  Norm norm = Norm::kL1;
  Mode mode = Mode::kNonInteractive;
  int replications = 1000;
  // Empty means the null only. Several entries form a panel: the Type II
  // error is the largest over the panel.
  std::vector<AlternativeSpec> alternatives;
  std::uint64_t master_seed = 0;
  // Separation search settings (sweeps only).
  double tolerance = 1.0 / 64.0;
  std::optional<double> delta_max;
  int workers = 1;

  PrivacyParams params() const { return PrivacyParams{alpha, gamma, n_block}; }

  void validate() const {
    family.validate();
    params().validate();
    if (n_block < 2) throw InvalidInput("config: n_block must be >= 2");
    if (replications < 100) throw InvalidInput("config: replications must be >= 100");
    if (!(tolerance > 0.0 && tolerance < 1.0)) {
      throw InvalidInput("config: tolerance must lie in (0, 1)");
    }
    if (delta_max && !(*delta_max > 0.0)) throw InvalidInput("config: delta_max must be > 0");
    if (workers < 1) throw InvalidInput("config: workers must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const FamilySpec& f) {
  j = nlohmann::json{{"kind", to_string(f.kind)}, {"d", f.d}};
  switch (f.kind) {
    case FamilyKind::kUniform:
      break;
    case FamilyKind::kNearlyUniform:
    case FamilyKind::kPolynomial:
      j["beta"] = f.beta;
      break;
    case FamilyKind::kExponential:
      j["eta"] = f.eta;
      j["c"] = f.c;
      j["beta"] = f.beta;
      break;
  }
}

namespace internal {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                                const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) throw InvalidInput(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

}  // namespace internal

inline void from_json(const nlohmann::json& j, FamilySpec& f) {
  internal::reject_unknown_keys(j, {"kind", "d", "beta", "eta", "c"}, "family");
  f = FamilySpec{};
  f.kind = family_kind_from_string(j.at("kind").get<std::string>());
  f.d = j.at("d").get<int>();
  if (j.contains("beta")) f.beta = j["beta"].get<double>();
  if (j.contains("eta")) f.eta = j["eta"].get<double>();
  if (j.contains("c")) f.c = j["c"].get<double>();
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"family", c.family},
                     {"n_block", c.n_block},
                     {"alpha", c.alpha},
                     {"gamma", c.gamma},
                     {"norm", c.norm == Norm::kL1 ? "l1" : "l2"},
                     {"mode", c.mode == Mode::kNonInteractive ? "ni" : "interactive"},
                     {"replications", c.replications},
                     {"master_seed", c.master_seed},
                     {"tolerance", c.tolerance},
                     {"workers", c.workers}};
  if (c.alternatives.empty()) {
    j["alternative"] = "null";
  } else if (c.alternatives.size() == 1) {
    j["alternative"] = c.alternatives.front();
  } else {
    j["alternative"] = c.alternatives;
  }
  if (c.delta_max) j["delta_max"] = *c.delta_max;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  internal::reject_unknown_keys(
      j,
      {"family", "n_block", "alpha", "gamma", "norm", "mode", "replications", "alternative",
       "master_seed", "tolerance", "delta_max", "workers"},
      "experiment config");
  c = ExperimentConfig{};
  c.family = j.at("family").get<FamilySpec>();
  c.n_block = j.at("n_block").get<int>();
  c.alpha = j.at("alpha").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.norm = norm_from_string(j.at("norm").get<std::string>());
  c.mode = mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("replications")) c.replications = j["replications"].get<int>();
  if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("alternative")) {
    const nlohmann::json& a = j["alternative"];
    if (a.is_string()) {
      if (a.get<std::string>() != "null") {
        throw InvalidInput("experiment config: alternative must be \"null\", an object or a list");
      }
    } else if (a.is_array()) {
      c.alternatives = a.get<std::vector<AlternativeSpec>>();
    } else {
      c.alternatives.push_back(a.get<AlternativeSpec>());
    }
  }
  if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
  if (j.contains("delta_max")) c.delta_max = j["delta_max"].get<double>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  c.validate();
}

namespace internal {

inline constexpr std::uint64_t kNullTag = 0;
inline constexpr std::uint64_t kAlternativeTagBase = 1;
inline constexpr std::uint64_t kConstructionTagBase = 1u << 20;

// Builds panel member k; random constructions use a fixed stream per member
// so every probed distance sees the same signs or direction.
inline ProbVector build_alternative(const ProbVector& p0, const AlternativeSpec& spec,
                                    Norm norm, std::uint64_t master, std::size_t k) {
  const std::uint64_t base = spec.seed.value_or(master);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(derive_seed(base, {kConstructionTagBase + k, attempt}));
    if (std::optional<ProbVector> p = realize_alternative(p0, spec, norm, rng)) return *p;
  }
  throw InvalidInput("alternative: construction failed to hit the target distance");
}

}  // namespace internal

// Rejection frequencies under the null and, if the config carries
// alternatives, the largest acceptance frequency over the panel.
inline RiskEstimate estimate_risk(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProbVector p0 = make_family(cfg.family);
  const PrivacyParams params = cfg.params();
  const int m = cfg.replications;
  const long null_rej = count_rejections(p0, p0, params, cfg.norm, cfg.mode, m,
                                         cfg.master_seed, internal::kNullTag, cfg.workers);
  std::optional<long> worst_accepts;
  for (std::size_t k = 0; k < cfg.alternatives.size(); ++k) {
    const ProbVector p =
        internal::build_alternative(p0, cfg.alternatives[k], cfg.norm, cfg.master_seed, k);
    const long rej = count_rejections(p, p0, params, cfg.norm, cfg.mode, m, cfg.master_seed,
                                      internal::kAlternativeTagBase + k, cfg.workers);
    worst_accepts = std::max(worst_accepts.value_or(0), static_cast<long>(m) - rej);
  }
  return make_risk_estimate(null_rej, worst_accepts, m);
}

struct RiskProbe {
  double delta = 0.0;
  double risk = 0.0;
  Interval ci;
};

enum class SeparationStatus { kDeterminate, kIndeterminate };

struct SeparationResult {
  double radius = 0.0;  // midpoint of the final bracket
  // From the largest probe whose risk is confidently above gamma (or 0) to
  // the smallest probe whose risk is confidently at most gamma.
  Interval radius_ci;
  SeparationStatus status = SeparationStatus::kDeterminate;
  double delta_max = 0.0;
  std::optional<RiskEstimate> type1;
  std::vector<RiskProbe> probes;
};

inline const char* to_string(SeparationStatus s) {
  return s == SeparationStatus::kDeterminate ? "ok" : "indeterminate";
}

// Bisection for the smallest distance whose risk is at most gamma. risk_at
// returns the risk estimate at a distance; it is assumed non-increasing.
inline SeparationResult bisect(const std::function<RiskProbe(double)>& risk_at,
                               double delta_max, double gamma, double tol) {
  if (!(delta_max > 0.0)) throw InvalidInput("bisect: delta_max must be > 0");
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidInput("bisect: tol must lie in (0, 1)");
  SeparationResult res;
  res.delta_max = delta_max;
  auto probe = [&](double delta) {
    RiskProbe p = risk_at(delta);
    p.delta = delta;
    res.probes.push_back(p);
    return p;
  };
  const RiskProbe top = probe(delta_max);
  if (top.risk > gamma) {
    throw Saturated("risk " + format_real(top.risk) + " still above gamma at delta_max " +
                        format_real(delta_max),
                    delta_max);
  }
  double lo = 0.0;
  double hi = delta_max;
  while (hi - lo > tol * delta_max) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid).risk <= gamma) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  res.radius = 0.5 * (lo + hi);

  double ci_lo = 0.0;
  std::optional<double> ci_hi;
  for (const RiskProbe& p : res.probes) {
    if (p.ci.lo > gamma) ci_lo = std::max(ci_lo, p.delta);
    if (p.ci.hi <= gamma && (!ci_hi || p.delta < *ci_hi)) ci_hi = p.delta;
  }
  res.status = ci_hi ? SeparationStatus::kDeterminate : SeparationStatus::kIndeterminate;
  res.radius_ci = Interval{ci_lo, ci_hi.value_or(delta_max)};
  return res;
}

struct SeparationSetup {
  // Panel of constructions; epsilon and target_distance are ignored and
  // replaced by the probed distance.
  std::vector<AlternativeSpec> panel;
  int replications = 1000;
  double tolerance = 1.0 / 64.0;
  std::optional<double> delta_max;
  std::uint64_t master_seed = 0;
  int workers = 1;
};

// Default search range: the simplex diameter, capped by what every panel
// member can reach.
inline double default_delta_max(const ProbVector& p0, Norm norm,
                                const std::vector<AlternativeSpec>& panel) {
  double cap = simplex_diameter(norm);
  for (const AlternativeSpec& a : panel) {
    cap = std::min(cap, max_alternative_distance(p0, a.kind, a.norm.value_or(norm), a.b_size));
  }
  return cap;
}

// Empirical separation radius: bisection on the estimated risk, type1 once
// plus the worst panel type2 at each probe.
inline SeparationResult empirical_separation(const ProbVector& p0, const PrivacyParams& params,
                                             Norm norm, Mode mode,
                                             const SeparationSetup& setup) {
  params.validate();
  if (setup.panel.empty()) throw InvalidInput("empirical_separation: empty panel");
  if (setup.replications < 100) {
    throw InvalidInput("empirical_separation: replications must be >= 100");
  }
  const int m = setup.replications;
  const double delta_max = setup.delta_max.value_or(default_delta_max(p0, norm, setup.panel));
  const long null_rej = count_rejections(p0, p0, params, norm, mode, m, setup.master_seed,
                                         internal::kNullTag, setup.workers);
  const RiskEstimate type1 = make_risk_estimate(null_rej, std::nullopt, m);

  auto risk_at = [&](double delta) {
    std::optional<long> worst_accepts;
    for (std::size_t k = 0; k < setup.panel.size(); ++k) {
      AlternativeSpec spec = setup.panel[k];
      spec.epsilon.reset();
      spec.target_distance = delta;
      const ProbVector p =
          internal::build_alternative(p0, spec, norm, setup.master_seed, k);
      const long rej = count_rejections(p, p0, params, norm, mode, m, setup.master_seed,
                                        internal::kAlternativeTagBase + k, setup.workers);
      worst_accepts = std::max(worst_accepts.value_or(0), static_cast<long>(m) - rej);
    }
    const RiskEstimate est = make_risk_estimate(null_rej, worst_accepts, m);
    return RiskProbe{delta, est.risk(), est.risk_ci()};
  };
  SeparationResult res = bisect(risk_at, delta_max, params.gamma, setup.tolerance);
  res.type1 = type1;
  return res;
}

// D_tau(p) = sum_j |p(j) - p0(j)| min(tau, |p(j) - p0(j)|).
inline double d_tau(const ProbVector& p, const ProbVector& p0, double tau) {
  if (p.d() != p0.d()) throw InvalidInput("d_tau: dimension mismatch");
  double s = 0.0;
  for (int j = 1; j <= p.d(); ++j) {
    const double a = std::abs(p(j) - p0(j));
    s += a * std::min(tau, a);
  }
  return s;
}

struct CalibrationOptions {
  int n_block = 200;
  double alpha = 1.0;
  int d_min = 3;
  int d_max = 10;
  int workers = 1;
};

struct CalibrationCase {
  int d = 0;
  double d_tau = 0.0;
  double mean_ratio = 0.0;
  double se_ratio = 0.0;
};

struct CalibrationResult {
  double c = 0.0;
  std::vector<CalibrationCase> cases;
};

// Estimates the constant c in E D_n >= c D_tau(p): over random pairs
// (p, p0), the smallest Monte Carlo ratio mean(D_n)/D_tau(p) minus three
// standard errors, clipped into (0, 1).
inline CalibrationResult calibrate_c_detailed(int m, int cases, Rng& rng,
                                              const CalibrationOptions& opt = {}) {
  if (m < 10000) throw InvalidInput("calibrate_c: M must be >= 10^4");
  if (cases < 1) throw InvalidInput("calibrate_c: need at least one case");
  if (opt.d_min < 2 || opt.d_max < opt.d_min) {
    throw InvalidInput("calibrate_c: need 2 <= d_min <= d_max");
  }
  const PrivacyParams params{opt.alpha, 0.5, opt.n_block};
  params.validate();
  const double tau = tau_of(opt.n_block, opt.alpha);
  CalibrationResult out;
  double worst = std::numeric_limits<double>::infinity();
  while (static_cast<int>(out.cases.size()) < cases) {
    const int d = opt.d_min + static_cast<int>(rng.uniform() * (opt.d_max - opt.d_min + 1));
    std::vector<double> w(static_cast<std::size_t>(d));
    for (double& v : w) v = 0.2 + rng.uniform();
    const ProbVector p0 = normalize(w);
    const double target = 0.1 + 0.7 * rng.uniform();
    const std::optional<ProbVector> p =
        random_direction_alternative(p0, target, Norm::kL1, rng);
    if (!p) continue;
    const double dt = d_tau(*p, p0, tau);
    if (!(dt > 0.0)) continue;  // p == p0 carries no signal

    const std::uint64_t master = rng();
    const CategoricalSampler sampler(*p);
    const std::size_t len = static_cast<std::size_t>(3 * opt.n_block);
    // Per-replication values are stored so the sums do not depend on the
    // worker schedule.
    std::vector<double> values(static_cast<std::size_t>(m));
    count_true(m, master, 0, opt.workers, [&](int r, Rng& g) {
      std::vector<int> x(len);
      sampler.fill(x, g);
      values[static_cast<std::size_t>(r)] =
          *run_test_interactive(std::span<const int>(x), p0, params, Norm::kL1, g).d_n;
      return false;
    });
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= m - 1;
    const CalibrationCase cc{d, dt, mean / dt, std::sqrt(var / m) / dt};
    worst = std::min(worst, cc.mean_ratio - 3.0 * cc.se_ratio);
    out.cases.push_back(cc);
  }
  constexpr double kFloor = 1e-6;
  out.c = std::clamp(worst, kFloor, 1.0 - kFloor);
  return out;
}

inline double calibrate_c(int m, int cases, Rng& rng, const CalibrationOptions& opt = {}) {
  return calibrate_c_detailed(m, cases, rng, opt).c;
}

struct SweepRow {
  ExperimentConfig config;
  std::string group;
  std::optional<double> radius;
  Interval radius_ci;
  std::string status;  // ok, indeterminate or saturated
  double type1 = 0.0;
  double delta_max = 0.0;
  double theory_upper = 0.0;
  double theory_lower = 0.0;
  std::string slope_variable;  // "d" or "n_alpha2"
  std::optional<double> group_slope;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::map<std::string, double> slopes;
};

// Least-squares slope of log(y) on log(x).
inline std::optional<double> log_log_slope(const std::vector<double>& x,
                                           const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) return std::nullopt;
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return sxy / sxx;
}

inline std::string sweep_group_key(const ExperimentConfig& c) {
  return std::string(to_string(c.family.kind)) + "[" + family_params_string(c.family) +
         "]/" + to_string(c.mode) + "/" + to_string(c.norm);
}

inline const std::vector<std::string>& sweep_csv_header() {
  static const std::vector<std::string> kHeader = {
      "group",        "family",        "params",         "d",
      "n_block",      "alpha",         "gamma",          "norm",
      "mode",         "replications",  "master_seed",    "delta_max",
      "radius",       "radius_ci_low", "radius_ci_high", "status",
      "type1",        "theory_upper",  "theory_lower",   "slope_variable",
      "group_slope"};
  return kHeader;
}

inline void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  CsvWriter w(out);
  w.row(sweep_csv_header());
  for (const SweepRow& r : table.rows) {
    const ExperimentConfig& c = r.config;
    w.row({r.group, to_string(c.family.kind), family_params_string(c.family),
           std::to_string(c.family.d), std::to_string(c.n_block), format_real(c.alpha),
           format_real(c.gamma), to_string(c.norm), to_string(c.mode),
           std::to_string(c.replications), std::to_string(c.master_seed),
           format_real(r.delta_max), format_optional(r.radius), format_real(r.radius_ci.lo),
           format_real(r.radius_ci.hi), r.status, format_real(r.type1),
           format_real(r.theory_upper), format_real(r.theory_lower), r.slope_variable,
           format_optional(r.group_slope)});
  }
}

inline nlohmann::json sweep_manifest(const std::vector<ExperimentConfig>& grid,
                                     std::size_t rows) {
  const std::string canonical = nlohmann::json(grid).dump();
  nlohmann::json seeds = nlohmann::json::array();
  for (const ExperimentConfig& c : grid) seeds.push_back(c.master_seed);
  return nlohmann::json{{"config_hash", "fnv1a64:" + hex64(fnv1a64(canonical))},
                        {"version", kVersion},
                        {"master_seed", grid.front().master_seed},
                        {"master_seeds", seeds},
                        {"rows", rows}};
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

// Runs the separation search for every config and fits, per group of
// configs sharing family, mode and norm, the log-log slope of the radius
// against d (or against n alpha^2 when d is constant in the group).
// Configs without alternatives use a paired-signs panel over the largest
// even block. Writes output_path and output_path + ".manifest.json" unless
// output_path is empty.
inline SweepTable scaling_sweep(const std::vector<ExperimentConfig>& grid,
                                const std::string& output_path,
                                std::ostream* progress = nullptr) {
  if (grid.empty()) throw InvalidInput("scaling_sweep: empty grid");
  for (const ExperimentConfig& c : grid) c.validate();
  SweepTable table;
  for (const ExperimentConfig& c : grid) {
    const ProbVector p0 = make_family(c.family);
    const PrivacyParams params = c.params();
    SweepRow row;
    row.config = c;
    row.group = sweep_group_key(c);
    row.theory_upper = upper_bound(p0, c.n_block, params, c.norm, c.mode).value;
    row.theory_lower = lower_bound(p0, c.n_block, c.alpha, c.norm, c.mode).value;
    SeparationSetup setup;
    setup.panel = c.alternatives.empty()
                      ? std::vector<AlternativeSpec>{AlternativeSpec{}}
                      : c.alternatives;
    setup.replications = c.replications;
    setup.tolerance = c.tolerance;
    setup.delta_max = c.delta_max;
    setup.master_seed = c.master_seed;
    setup.workers = c.workers;
    try {
      const SeparationResult res = empirical_separation(p0, params, c.norm, c.mode, setup);
      row.radius = res.radius;
      row.radius_ci = res.radius_ci;
      row.status = to_string(res.status);
      row.type1 = res.type1->type1;
      row.delta_max = res.delta_max;
    } catch (const Saturated& e) {
      row.status = "saturated";
      row.delta_max = e.delta_max();
      row.radius_ci = Interval{e.delta_max(), e.delta_max()};
      const long null_rej = count_rejections(p0, p0, params, c.norm, c.mode, c.replications,
                                             c.master_seed, internal::kNullTag, c.workers);
      row.type1 = static_cast<double>(null_rej) / c.replications;
    }
    if (progress) {
      *progress << "sweep " << row.group << " d=" << c.family.d << " n=" << c.n_block
                << " alpha=" << c.alpha << ": radius="
                << (row.radius ? format_real(*row.radius) : std::string("-")) << " ["
                << format_real(row.radius_ci.lo) << ", " << format_real(row.radius_ci.hi)
                << "] " << row.status << "\n";
    }
    table.rows.push_back(std::move(row));
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < table.rows.size(); ++i) groups[table.rows[i].group].push_back(i);
  for (const auto& [key, members] : groups) {
    bool d_varies = false;
    for (std::size_t i : members) {
      d_varies = d_varies || table.rows[i].config.family.d != table.rows[members[0]].config.family.d;
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i : members) {
      const SweepRow& r = table.rows[i];
      if (r.status != "ok") continue;
      const ExperimentConfig& c = r.config;
      xs.push_back(d_varies ? static_cast<double>(c.family.d)
                            : static_cast<double>(c.n_block) * c.alpha * c.alpha);
      ys.push_back(*r.radius);
    }
    const std::optional<double> slope = log_log_slope(xs, ys);
    if (slope) table.slopes[key] = *slope;
    for (std::size_t i : members) {
      table.rows[i].slope_variable = d_varies ? "d" : "n_alpha2";
      table.rows[i].group_slope = slope;
    }
  }

  if (!output_path.empty()) {
    std::ostringstream csv;
    write_sweep_csv(csv, table);
    write_text_file(output_path, csv.str());
    write_text_file(output_path + ".manifest.json",
                    sweep_manifest(grid, table.rows.size()).dump(2) + "\n");
  }
  return table;
}

}  // namespace ldpgof

#endif  // LDPGOF_HARNESS_HPP_
