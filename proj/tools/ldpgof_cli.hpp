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

#ifndef LDPGOF_TOOLS_LDPGOF_CLI_HPP_
#define LDPGOF_TOOLS_LDPGOF_CLI_HPP_

// Command-line front end. run_cli is separate from main so tests can drive
// it with in-memory streams.
//
// Exit codes: 0 success (for `test`: H0 accepted), 1 `test` rejected H0,
// 2 any error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldpgof/ldpgof.hpp"

namespace ldpgof::cli {

inline constexpr int kExitAccept = 0;
inline constexpr int kExitReject = 1;
inline constexpr int kExitError = 2;

// Options describing p0 and the privacy parameters, shared by several
// subcommands.
struct NullArgs {
  std::string family;
  int d = 0;
  double beta = 1.0;
  double eta = 0.0;
  double c = 1.0;
  std::string p0_file;
  double alpha = 1.0;
  double gamma = 0.05;
  std::string mode = "ni";
  std::string norm = "l1";
};

inline void add_null_options(CLI::App* app, NullArgs& a) {
  app->add_option("--family", a.family,
                  "Null family: uniform, nearly_uniform, polynomial, exponential");
  app->add_option("--d", a.d, "Alphabet size d");
  app->add_option("--beta", a.beta, "Family exponent beta")->capture_default_str();
  app->add_option("--eta", a.eta, "Exponential family power eta")->capture_default_str();
  app->add_option("--c", a.c, "Exponential family rate c")->capture_default_str();
  app->add_option("--p0-file", a.p0_file,
                  "File of d null probabilities (whitespace or comma separated)");
  app->add_option("--alpha", a.alpha, "Privacy level alpha in (0, 1]")->capture_default_str();
  app->add_option("--gamma", a.gamma, "Target risk gamma in (0, 1)")->capture_default_str();
  app->add_option("--mode", a.mode, "Test mode: ni or interactive")
      ->check(CLI::IsMember({"ni", "interactive"}))
      ->capture_default_str();
  app->add_option("--norm", a.norm, "Separation norm: l1 or l2")
      ->check(CLI::IsMember({"l1", "l2"}))
      ->capture_default_str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline ProbVector read_p0_file(const std::string& path) {
  std::string text = read_file(path);
  for (char& ch : text) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(text);
  std::vector<double> mass;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw InvalidInput("p0 file '" + path + "': cannot parse '" + tok + "'");
    }
    mass.push_back(v);
  }
  if (mass.empty()) throw InvalidInput("p0 file '" + path + "' is empty");
  return ProbVector::from_probabilities(std::move(mass));
}

inline ProbVector resolve_p0(const NullArgs& a) {
  if (!a.p0_file.empty()) {
    if (!a.family.empty()) throw InvalidInput("give either --family or --p0-file, not both");
    ProbVector p0 = read_p0_file(a.p0_file);
    if (a.d != 0 && a.d != p0.d()) {
      throw InvalidInput("--d " + std::to_string(a.d) + " differs from the " +
                         std::to_string(p0.d()) + " entries of --p0-file");
    }
    return p0;
  }
  if (a.family.empty()) throw InvalidInput("one of --family or --p0-file is required");
  if (a.d < 1) throw InvalidInput("--d must be given and >= 1");
  FamilySpec spec;
  spec.kind = family_kind_from_string(a.family);
  spec.d = a.d;
  spec.beta = spec.kind == FamilyKind::kUniform ? 0.0 : a.beta;
  spec.eta = a.eta;
  spec.c = a.c;
  return make_family(spec);
}

// Newline-delimited category indices. Blank lines are skipped.
inline std::vector<int> read_categories(const std::string& path, int d) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open '" + path + "'");
  std::vector<int> x;
  std::string line;
  long line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": not an integer: '" + tok +
                         "'");
    }
    if (v < 1 || v > d) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": category " +
                         std::to_string(v) + " outside [1, " + std::to_string(d) + "]");
    }
    x.push_back(static_cast<int>(v));
  }
  if (x.empty()) throw InvalidInput("'" + path + "' contains no observations");
  return x;
}

// Drops trailing observations so the length splits into equal blocks.
inline void truncate_to_blocks(std::vector<int>& x, int blocks, std::ostream& err) {
  const std::size_t keep = x.size() - x.size() % static_cast<std::size_t>(blocks);
  if (keep != x.size()) {
    err << "warning: dropping " << x.size() - keep << " trailing observation(s) so that "
        << keep << " split into " << blocks << " equal blocks\n";
    x.resize(keep);
  }
}

inline void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

inline void write_manifest(const std::string& path, const nlohmann::json& config,
                           std::optional<std::uint64_t> seed, std::size_t rows) {
  if (path.empty() || path == "-") return;
  nlohmann::json m{{"config_hash", "fnv1a64:" + hex64(fnv1a64(config.dump()))},
                   {"version", kVersion},
                   {"rows", rows}};
  m["master_seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  write_text_file(path + ".manifest.json", m.dump(2) + "\n");
}

inline std::vector<int> parse_support(const std::string& s, int d) {
  std::vector<int> members;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InvalidInput("--support: cannot parse '" + tok + "'");
    members.push_back(v);
  }
  SupportSet check(members, d);  // validates
  return members;
}

struct PrivatizeArgs {
  NullArgs null;
  std::string input;
  std::string support = "auto";
  std::string out;
};

inline int cmd_privatize(const PrivatizeArgs& a, std::uint64_t seed, std::ostream& out,
                         std::ostream& err) {
  const ProbVector p0 = resolve_p0(a.null);
  const int d = p0.d();
  const Mode mode = mode_from_string(a.null.mode);
  const Norm norm = norm_from_string(a.null.norm);
  std::vector<int> x = read_categories(a.input, d);
  const int blocks = mode == Mode::kNonInteractive ? 2 : 3;
  truncate_to_blocks(x, blocks, err);
  const int n = static_cast<int>(x.size()) / blocks;
  const PrivacyParams params{a.null.alpha, a.null.gamma, n};
  params.validate();
  if (n < 1) throw InvalidInput("too few observations for " + std::to_string(blocks) + " blocks");

  const SupportSet b = a.support == "auto"
                           ? select_B(p0, n, params.alpha, norm, mode).b
                           : SupportSet(parse_support(a.support, d), d);
  const SupportSet vector_set = mode == Mode::kNonInteractive ? b : SupportSet::full(d);

  Rng rng(seed);
  std::ostringstream csv;
  CsvWriter w(csv);
  std::vector<std::string> header = {"user", "block"};
  for (int j : vector_set.members()) header.push_back("z_" + std::to_string(j));
  header.push_back("z_scalar");
  w.row(header);
  const std::size_t width = header.size();
  auto emit = [&](std::size_t user, int block, const std::vector<double>& z,
                  std::optional<double> scalar) {
    std::vector<std::string> row(width);
    row[0] = std::to_string(user);
    row[1] = std::to_string(block);
    for (std::size_t k = 0; k < z.size(); ++k) row[2 + k] = format_real(z[k]);
    if (scalar) row.back() = format_real(*scalar);
    w.row(row);
  };

  std::size_t user = 0;
  std::vector<double> p_hat(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i, ++user) {
    const PrivateVectorRecord r = privatize_indicator_vector(x[user], vector_set, params, rng);
    for (std::size_t k = 0; k < r.z.size() && mode == Mode::kInteractive; ++k) {
      p_hat[k] += r.z[k] / n;
    }
    emit(user + 1, 1, r.z, std::nullopt);
  }
  if (mode == Mode::kInteractive) {
    const Stage2Mechanism mech(p_hat, p0, params);
    for (int i = 0; i < n; ++i, ++user) emit(user + 1, 2, {}, mech(x[user], rng).z);
  }
  for (int i = 0; i < n; ++i, ++user) {
    emit(user + 1, blocks, {}, privatize_tail_indicator(x[user], b, params, rng));
  }
  write_output(a.out, csv.str(), out);
  return kExitAccept;
}

struct TestArgs {
  NullArgs null;
  std::string data;
};

inline int cmd_test(const TestArgs& a, std::uint64_t seed, std::ostream& out,
                    std::ostream& err) {
  const ProbVector p0 = resolve_p0(a.null);
  const Mode mode = mode_from_string(a.null.mode);
  const Norm norm = norm_from_string(a.null.norm);
  PrivacyParams params{a.null.alpha, a.null.gamma, 1};
  params.validate();
  std::vector<int> x = read_categories(a.data, p0.d());
  truncate_to_blocks(x, mode == Mode::kNonInteractive ? 2 : 3, err);
  Rng rng(seed);
  const TestReport report = run_test(mode, std::span<const int>(x), p0, params, norm, rng);
  out << nlohmann::json(report).dump(2) << "\n";
  return report.reject ? kExitReject : kExitAccept;
}

// Grid used by `rates` when no config is given.
inline RateGrid default_rate_grid() {
  RateGrid g;
  for (int d : {10, 1000}) {
    g.families.push_back(FamilySpec{FamilyKind::kUniform, d, 0.0, 0.0, 1.0});
    g.families.push_back(FamilySpec{FamilyKind::kPolynomial, d, 1.0, 0.0, 1.0});
    g.families.push_back(FamilySpec{FamilyKind::kExponential, d, 1.0, 0.0, 1.0});
    g.families.push_back(FamilySpec{FamilyKind::kNearlyUniform, d, 0.5, 0.0, 1.0});
  }
  g.n_values = {1000, 100000};
  g.alphas = {1.0, 0.5};
  g.gamma = 0.05;
  return g;
}

inline RateGrid rate_grid_from_json(const nlohmann::json& j) {
  internal::reject_unknown_keys(j, {"families", "n", "alpha", "gamma"}, "rate grid");
  RateGrid g;
  g.families = j.at("families").get<std::vector<FamilySpec>>();
  g.n_values = j.at("n").get<std::vector<int>>();
  g.alphas = j.at("alpha").get<std::vector<double>>();
  if (j.contains("gamma")) g.gamma = j["gamma"].get<double>();
  return g;
}

inline nlohmann::json rate_grid_to_json(const RateGrid& g) {
  return nlohmann::json{
      {"families", g.families}, {"n", g.n_values}, {"alpha", g.alphas}, {"gamma", g.gamma}};
}

inline void write_rate_csv(std::ostream& out, const std::vector<RateRow>& rows) {
  CsvWriter w(out);
  w.row({"family", "params", "n", "alpha", "norm", "mode", "kind", "value", "j_achieving"});
  for (const RateRow& r : rows) {
    const std::string extra = family_params_string(r.family);
    w.row({to_string(r.family.kind),
           "d=" + std::to_string(r.family.d) + (extra.empty() ? "" : ";" + extra),
           std::to_string(r.n), format_real(r.alpha),
           to_string(r.norm), to_string(r.mode), r.kind, format_real(r.value),
           format_optional(r.j_achieving)});
  }
}

struct RatesArgs {
  std::string config;
  std::string out;
};

inline int cmd_rates(const RatesArgs& a, std::ostream& out) {
  const RateGrid grid = a.config.empty()
                            ? default_rate_grid()
                            : rate_grid_from_json(nlohmann::json::parse(read_file(a.config)));
  const std::vector<RateRow> rows = rate_table(grid);
  std::ostringstream csv;
  write_rate_csv(csv, rows);
  write_output(a.out, csv.str(), out);
  write_manifest(a.out, rate_grid_to_json(grid), std::nullopt, rows.size());
  return kExitAccept;
}

// A sweep config is a list of experiment configs, bare or under "grid".
inline std::vector<ExperimentConfig> sweep_grid_from_json(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<ExperimentConfig>>();
  internal::reject_unknown_keys(j, {"grid"}, "sweep config");
  return j.at("grid").get<std::vector<ExperimentConfig>>();
}

struct SweepArgs {
  std::string config;
  std::string out;
  int workers = 0;
};

inline int cmd_sweep(const SweepArgs& a, std::uint64_t seed, std::ostream& out,
                     std::ostream& err) {
  if (a.config.empty()) throw InvalidInput("sweep: --config is required");
  std::vector<ExperimentConfig> grid =
      sweep_grid_from_json(nlohmann::json::parse(read_file(a.config)));
  if (grid.empty()) throw InvalidInput("sweep: empty grid");
  for (ExperimentConfig& c : grid) {
    c.master_seed = seed;
    if (a.workers > 0) c.workers = a.workers;
  }
  const std::string path = a.out == "-" ? std::string() : a.out;
  const SweepTable table = scaling_sweep(grid, path, &err);
  if (path.empty()) write_sweep_csv(out, table);
  return kExitAccept;
}

struct CalibrateArgs {
  int replications = 10000;
  int cases = 10;
  int n_block = 200;
  double alpha = 1.0;
  int workers = 1;
  std::string out;
};

inline int cmd_calibrate(const CalibrateArgs& a, std::uint64_t seed, std::ostream& out) {
  Rng rng(seed);
  CalibrationOptions opt;
  opt.n_block = a.n_block;
  opt.alpha = a.alpha;
  opt.workers = a.workers;
  const CalibrationResult res = calibrate_c_detailed(a.replications, a.cases, rng, opt);
  if (!a.out.empty() && a.out != "-") {
    std::ostringstream csv;
    CsvWriter w(csv);
    w.row({"case", "d", "d_tau", "mean_ratio", "se_ratio"});
    for (std::size_t i = 0; i < res.cases.size(); ++i) {
      const CalibrationCase& c = res.cases[i];
      w.row({std::to_string(i + 1), std::to_string(c.d), format_real(c.d_tau),
             format_real(c.mean_ratio), format_real(c.se_ratio)});
    }
    write_text_file(a.out, csv.str());
    write_manifest(a.out,
                   nlohmann::json{{"replications", a.replications},
                                  {"cases", a.cases},
                                  {"n_block", a.n_block},
                                  {"alpha", a.alpha}},
                   seed, res.cases.size());
  }
  out << format_real(res.c) << "\n";
  return kExitAccept;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Locally private goodness-of-fit tests for discrete distributions", "ldpgof"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  auto add_seed = [&seed](CLI::App* sub) {
    return sub->add_option("--seed", seed, "Master seed (required)");
  };

  PrivatizeArgs priv;
  CLI::App* s_priv = app.add_subcommand("privatize", "Privatize raw observations");
  s_priv->add_option("--input", priv.input, "Newline-delimited categories in [1, d]")
      ->required();
  add_null_options(s_priv, priv.null);
  s_priv->add_option("--support", priv.support,
                     "Main set B as comma-separated categories, or auto")
      ->capture_default_str();
  s_priv->add_option("--out", priv.out, "Output CSV (default: standard output)");
  CLI::Option* priv_seed = add_seed(s_priv);

  TestArgs test;
  CLI::App* s_test = app.add_subcommand("test", "Run one goodness-of-fit test");
  s_test->add_option("--data", test.data, "Newline-delimited categories in [1, d]")
      ->required();
  add_null_options(s_test, test.null);
  CLI::Option* test_seed = add_seed(s_test);

  RatesArgs rates;
  CLI::App* s_rates = app.add_subcommand("rates", "Tabulate separation-rate formulas");
  s_rates->add_option("--config", rates.config, "JSON rate grid (default: built-in grid)");
  s_rates->add_option("--out", rates.out, "Output CSV (default: standard output)");

  SweepArgs sweep;
  CLI::App* s_sweep = app.add_subcommand("sweep", "Empirical separation-radius sweep");
  s_sweep->add_option("--config", sweep.config, "JSON list of experiment configs")
      ->required();
  s_sweep->add_option("--out", sweep.out, "Output CSV (default: standard output)");
  s_sweep->add_option("--workers", sweep.workers, "Worker threads (default: from config)");
  CLI::Option* sweep_seed = add_seed(s_sweep);

  CalibrateArgs cal;
  CLI::App* s_cal = app.add_subcommand("calibrate", "Estimate the D_n expectation constant");
  s_cal->add_option("--replications", cal.replications, "Replications per case (>= 10000)")
      ->capture_default_str();
  s_cal->add_option("--cases", cal.cases, "Random (p, p0) cases")->capture_default_str();
  s_cal->add_option("--n", cal.n_block, "Block size n")->capture_default_str();
  s_cal->add_option("--alpha", cal.alpha, "Privacy level alpha in (0, 1]")
      ->capture_default_str();
  s_cal->add_option("--workers", cal.workers, "Worker threads")->capture_default_str();
  s_cal->add_option("--out", cal.out, "Per-case CSV (optional)");
  CLI::Option* cal_seed = add_seed(s_cal);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitAccept;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitAccept;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitAccept;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    auto need_seed = [&err](CLI::Option* opt, const char* name) {
      if (opt->count() == 0) {
        err << "error: " << name << " is stochastic and requires --seed\n";
        return false;
      }
      return true;
    };
    if (s_priv->parsed()) {
      if (!need_seed(priv_seed, "privatize")) return kExitError;
      return cmd_privatize(priv, seed, out, err);
    }
    if (s_test->parsed()) {
      if (!need_seed(test_seed, "test")) return kExitError;
      return cmd_test(test, seed, out, err);
    }
    if (s_rates->parsed()) return cmd_rates(rates, out);
    if (s_sweep->parsed()) {
      if (!need_seed(sweep_seed, "sweep")) return kExitError;
      return cmd_sweep(sweep, seed, out, err);
    }
    if (s_cal->parsed()) {
      if (!need_seed(cal_seed, "calibrate")) return kExitError;
      return cmd_calibrate(cal, seed, out);
    }
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace ldpgof::cli

#endif  // LDPGOF_TOOLS_LDPGOF_CLI_HPP_
