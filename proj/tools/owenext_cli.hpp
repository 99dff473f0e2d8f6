#pragma once

// Command-line front end. `run_cli` is kept separate from main() so the
// tests can drive every subcommand in-process.
//
// Exit codes: 0 success / pass, 1 verification failure, 2 usage or domain error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "owenext/errors.hpp"
#include "owenext/json_io.hpp"
#include "owenext/mvn_cdf.hpp"
#include "owenext/oracles.hpp"
#include "owenext/owen_identities.hpp"
#include "owenext/probit_bernoulli.hpp"
#include "owenext/verification.hpp"

namespace owenext::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// 17 significant digits, '.' decimal separator.
inline std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<double> parse_reals(const std::string& csv, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError(flag + ": cannot parse '" + item + "' as a number");
    }
    if (used != item.size() || !std::isfinite(x)) throw DomainError(flag + ": invalid number '" + item + "'");
    out.push_back(x);
  }
  if (out.empty()) throw DomainError(flag + ": expected a comma-separated list of numbers");
  return out;
}

inline SignVector parse_signs(const std::string& csv) {
  std::vector<int> signs;
  for (double x : parse_reals(csv, "--y")) {
    if (x != 1.0 && x != -1.0) throw DomainError("--y: entries must be -1 or 1");
    signs.push_back(static_cast<int>(x));
  }
  return SignVector(std::move(signs));
}

inline std::size_t parse_count(double x, const std::string& flag) {
  if (!(x >= 1.0) || x != std::floor(x) || x > 1e12) throw DomainError(flag + ": expected a positive integer");
  return static_cast<std::size_t>(x);
}

inline nlohmann::json estimate_json(const MvnEstimate& e) {
  return {{"value", e.value},
          {"err_estimate", e.err_estimate},
          {"method", std::string(to_string(e.method))},
          {"accuracy_met", e.accuracy_met}};
}

inline void print_estimate(std::ostream& out, const std::string& label, const MvnEstimate& e) {
  out << label << " = " << num(e.value) << "\n"
      << "err_estimate = " << num(e.err_estimate) << "\n"
      << "method = " << to_string(e.method) << "\n";
  if (!e.accuracy_met) out << "warning = accuracy target not met within the sample budget\n";
}

// --------------------------------------------------------------------------
// lemma2

struct Lemma2Args {
  double mu = 0.0;
  double sigma2 = 1.0;
  std::string m;
  std::string v;
  double accuracy = 1e-6;
  bool oracle = false;
  std::size_t order = 200;
  std::uint64_t seed = 0;
  bool json = false;
};

/// Gauss-Hermite value and its order-halving discrepancy.
inline std::pair<double, double> lemma2_oracle(const Lemma2Params& p, std::size_t order) {
  const double full = oracles::lemma2_lhs_quadrature(p, order);
  const double half = oracles::lemma2_lhs_quadrature(p, std::max<std::size_t>(order / 2, 20));
  return {full, std::abs(full - half)};
}

inline int cmd_lemma2(const Lemma2Args& a, std::ostream& out) {
  const Lemma2Params p{a.mu, a.sigma2, parse_reals(a.m, "--m"), parse_reals(a.v, "--v")};
  const MvnEstimate closed = lemma2_closed_form(p, a.accuracy, a.seed);
  nlohmann::json j = {{"command", "lemma2"}, {"closed_form", estimate_json(closed)}};
  int code = kExitOk;
  if (!a.json) print_estimate(out, "closed_form", closed);
  if (a.oracle) {
    const auto [value, oracle_tol] = lemma2_oracle(p, a.order);
    const double diff = std::abs(closed.value - value);
    const bool pass = diff <= a.accuracy + closed.err_estimate + oracle_tol;
    code = pass ? kExitOk : kExitFail;
    j["oracle"] = {{"value", value}, {"order", a.order}, {"tolerance", oracle_tol}};
    j["abs_diff"] = diff;
    j["pass"] = pass;
    if (!a.json) {
      out << "oracle = " << num(value) << "\n"
          << "oracle_tolerance = " << num(oracle_tol) << "\n"
          << "abs_diff = " << num(diff) << "\n"
          << "status = " << (pass ? "pass" : "FAIL") << "\n";
    }
  }
  if (a.json) out << j.dump() << "\n";
  return code;
}

// --------------------------------------------------------------------------
// lemma3

struct Lemma3Args {
  std::string mu;
  std::string m;
  std::string v;
  std::string cov;
  double accuracy = 1e-6;
  bool oracle = false;
  double draws = 1e6;
  std::uint64_t seed = 0;
  bool json = false;
};

inline int cmd_lemma3(const Lemma3Args& a, std::ostream& out) {
  const Lemma3Params p{parse_reals(a.mu, "--mu"), read_matrix_file(a.cov), parse_reals(a.m, "--m"),
                       parse_reals(a.v, "--v")};
  const MvnEstimate closed = lemma3_closed_form(p, a.accuracy, a.seed);
  nlohmann::json j = {{"command", "lemma3"}, {"closed_form", estimate_json(closed)}};
  int code = kExitOk;
  if (!a.json) print_estimate(out, "closed_form", closed);
  if (a.oracle) {
    const oracles::McEstimate mc = oracles::lemma3_lhs_mc(p, parse_count(a.draws, "--draws"), a.seed);
    const double se = std::hypot(mc.std_error, closed.err_estimate / 3.0);
    const double diff = std::abs(closed.value - mc.estimate);
    const bool pass = diff <= 3.0 * se;
    code = pass ? kExitOk : kExitFail;
    j["oracle"] = {{"value", mc.estimate}, {"std_error", mc.std_error}};
    j["abs_diff"] = diff;
    j["pass"] = pass;
    if (!a.json) {
      out << "oracle = " << num(mc.estimate) << "\n"
          << "oracle_std_error = " << num(mc.std_error) << "\n"
          << "abs_diff = " << num(diff) << "\n"
          << "status = " << (pass ? "pass" : "FAIL") << "\n";
    }
  }
  if (a.json) out << j.dump() << "\n";
  return code;
}

// --------------------------------------------------------------------------
// pmf / sample / normalize

struct BernoulliArgs {
  std::string mu;
  std::string cov;
  std::string y;
  double n = 1;
  double accuracy = 1e-6;
  std::uint64_t seed = 0;
  bool json = false;
};

inline ProbitBernoulli load_bernoulli(const BernoulliArgs& a) {
  return ProbitBernoulli(parse_reals(a.mu, "--mu"), read_matrix_file(a.cov));
}

inline int cmd_pmf(const BernoulliArgs& a, std::ostream& out) {
  const ProbitBernoulli d = load_bernoulli(a);
  const SignVector y = parse_signs(a.y);
  const MvnEstimate e = pmf(d, y, a.accuracy, a.seed);
  const double log_value = e.value > 0.0 ? std::log(e.value) : -INFINITY;
  if (a.json) {
    nlohmann::json j = {{"command", "pmf"}, {"y", y.values()}, {"pmf", estimate_json(e)}};
    j["log_pmf"] = std::isfinite(log_value) ? nlohmann::json(log_value) : nlohmann::json(nullptr);
    out << j.dump() << "\n";
  } else {
    print_estimate(out, "pmf", e);
    out << "log_pmf = " << num(log_value) << "\n";
  }
  return kExitOk;
}

inline int cmd_sample(const BernoulliArgs& a, std::ostream& out) {
  const ProbitBernoulli d = load_bernoulli(a);
  const auto draws = sample(d, parse_count(a.n, "--n"), a.seed);
  if (a.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& y : draws) rows.push_back(y.values());
    out << nlohmann::json{{"command", "sample"}, {"seed", a.seed}, {"samples", rows}}.dump() << "\n";
    return kExitOk;
  }
  for (const auto& y : draws) {
    for (std::size_t r = 0; r < y.size(); ++r) out << (r ? "," : "") << y[r];
    out << "\n";
  }
  return kExitOk;
}

inline int cmd_normalize(const BernoulliArgs& a, std::ostream& out) {
  const ProbitBernoulli d = load_bernoulli(a);
  const EnumerationTotal t = normalization(d, a.accuracy, a.seed);
  const double deviation = t.total - 1.0;
  const bool pass = std::abs(deviation) <= t.budget;
  if (a.json) {
    out << nlohmann::json{{"command", "normalize"},      {"total", t.total},   {"deviation", deviation},
                          {"err_estimate", t.err_estimate}, {"budget", t.budget}, {"pass", pass}}
               .dump()
        << "\n";
  } else {
    out << "total = " << num(t.total) << "\n"
        << "deviation = " << num(deviation) << "\n"
        << "err_estimate = " << num(t.err_estimate) << "\n"
        << "budget = " << num(t.budget) << "\n"
        << "status = " << (pass ? "pass" : "FAIL") << "\n";
  }
  return pass ? kExitOk : kExitFail;
}

// --------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string suite = "all";
  double trials = 100;
  std::uint64_t seed = 0;
  double accuracy = 1e-5;
  double perturb = 0.0;
  bool json = false;
};

inline int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto& names = verify::suite_names();
  if (a.suite != "all" && std::find(names.begin(), names.end(), a.suite) == names.end()) {
    throw DomainError("unknown suite: " + a.suite);
  }
  verify::Options opt;
  opt.trials = parse_count(a.trials, "--trials");
  opt.seed = a.seed;
  opt.accuracy = a.accuracy;
  opt.perturb = a.perturb;
  const auto results = verify::run_suite(a.suite, opt);
  bool all_pass = true;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& r : results) {
    all_pass = all_pass && r.passed;
    if (a.json) {
      checks.push_back({{"suite", r.suite}, {"check", r.name}, {"pass", r.passed}, {"detail", r.detail}});
    } else {
      out << (r.passed ? "PASS  " : "FAIL  ") << r.suite << "  " << r.name << "  [" << r.detail << "]\n";
    }
  }
  if (a.json) {
    out << nlohmann::json{{"command", "verify"}, {"suite", a.suite}, {"pass", all_pass}, {"checks", checks}}.dump()
        << "\n";
  } else {
    out << (all_pass ? "all checks passed" : "verification FAILED") << "\n";
  }
  return all_pass ? kExitOk : kExitFail;
}

// --------------------------------------------------------------------------
// table

struct TableArgs {
  std::string spec;
  std::string format = "csv";
};

struct TableRow {
  std::string id;
  std::string params;
  double closed = 0.0;
  double oracle = 0.0;
};

inline std::vector<double> json_reals(const nlohmann::json& rec, const char* key) {
  if (!rec.contains(key) || !rec.at(key).is_array()) throw DomainError(std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& x : rec.at(key)) {
    if (!x.is_number()) throw DomainError(std::string("'") + key + "' must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline double json_real(const nlohmann::json& rec, const char* key) {
  if (!rec.contains(key) || !rec.at(key).is_number()) throw DomainError(std::string("missing number '") + key + "'");
  return rec.at(key).get<double>();
}

inline TableRow table_row(const nlohmann::json& rec, std::size_t index) {
  if (!rec.is_object()) throw DomainError("record must be an object");
  if (!rec.contains("identity") || !rec.at("identity").is_string()) throw DomainError("missing 'identity'");
  const std::string identity = rec.at("identity").get<std::string>();
  const double accuracy = rec.contains("accuracy") ? json_real(rec, "accuracy") : 1e-6;
  const std::uint64_t seed = rec.contains("seed") ? rec.at("seed").get<std::uint64_t>() : 0;

  TableRow row;
  row.id = rec.contains("id") ? rec.at("id").get<std::string>() : identity + "-" + std::to_string(index);
  nlohmann::json params = rec;
  params.erase("id");
  params.erase("identity");
  row.params = params.dump();

  if (identity == "lemma2") {
    const Lemma2Params p{json_real(rec, "mu"), json_real(rec, "sigma2"), json_reals(rec, "m"), json_reals(rec, "v")};
    row.closed = lemma2_closed_form(p, accuracy, seed).value;
    const std::size_t order = rec.contains("order") ? rec.at("order").get<std::size_t>() : 200;
    row.oracle = oracles::lemma2_lhs_quadrature(p, order);
  } else if (identity == "lemma3") {
    if (!rec.contains("cov")) throw DomainError("missing 'cov'");
    const Lemma3Params p{json_reals(rec, "mu"), matrix_from_json(rec.at("cov")), json_reals(rec, "m"),
                         json_reals(rec, "v")};
    row.closed = lemma3_closed_form(p, accuracy, seed).value;
    const double draws = rec.contains("draws") ? json_real(rec, "draws") : 1e6;
    row.oracle = oracles::lemma3_lhs_mc(p, parse_count(draws, "draws"), seed).estimate;
  } else {
    throw DomainError("unknown identity '" + identity + "' (expected lemma2 or lemma3)");
  }
  return row;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

inline int cmd_table(const TableArgs& a, std::ostream& out) {
  if (a.format != "csv" && a.format != "json") throw DomainError("--format must be csv or json");
  std::ifstream in(a.spec);
  if (!in) throw DomainError("cannot open spec file: " + a.spec);
  nlohmann::json spec;
  try {
    in >> spec;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("spec file: " + std::string(e.what()));
  }
  if (!spec.is_array()) throw DomainError("spec file must contain a JSON array of records");

  std::vector<TableRow> rows;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    try {
      rows.push_back(table_row(spec[i], i));
    } catch (const std::exception& e) {
      throw DomainError("record " + std::to_string(i) + ": " + e.what());
    }
  }

  if (a.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"id", r.id},
                     {"params", nlohmann::json::parse(r.params)},
                     {"closed", r.closed},
                     {"oracle", r.oracle},
                     {"absdiff", std::abs(r.closed - r.oracle)}});
    }
    out << nlohmann::json{{"command", "table"}, {"rows", arr}}.dump() << "\n";
    return kExitOk;
  }
  out << "id,params,closed,oracle,absdiff\n";
  for (const auto& r : rows) {
    out << csv_field(r.id) << "," << csv_field(r.params) << "," << num(r.closed) << "," << num(r.oracle) << ","
        << num(std::abs(r.closed - r.oracle)) << "\n";
  }
  return kExitOk;
}

// --------------------------------------------------------------------------
// figure

struct FigureArgs {
  double rho = 0.5;
  int grid = 201;
  double extent = 3.5;
};

/// Grid over [-extent, extent]^2 of the standard bivariate normal density with
/// correlation rho; in_region marks the quadrant z1 <= 0, z2 <= 0.
inline int cmd_figure(const FigureArgs& a, std::ostream& out) {
  if (!(std::abs(a.rho) < 1.0)) throw DomainError("--rho must lie in (-1, 1)");
  if (a.grid < 2) throw DomainError("--grid must be at least 2");
  if (!(a.extent > 0.0) || !std::isfinite(a.extent)) throw DomainError("--extent must be positive");
  const double one_minus = 1.0 - a.rho * a.rho;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(one_minus));
  const int last = a.grid - 1;
  // Symmetric about 0 so that an odd grid contains the axes exactly.
  auto coord = [&](int i) { return a.extent * static_cast<double>(2 * i - last) / static_cast<double>(last); };
  out << "z1,z2,density,in_region\n";
  for (int i = 0; i < a.grid; ++i) {
    const double z1 = coord(i);
    for (int j = 0; j < a.grid; ++j) {
      const double z2 = coord(j);
      const double q = (z1 * z1 - 2.0 * a.rho * z1 * z2 + z2 * z2) / one_minus;
      const double density = norm * std::exp(-0.5 * q);
      out << num(z1) << "," << num(z2) << "," << num(density) << "," << (z1 <= 0.0 && z2 <= 0.0 ? 1 : 0) << "\n";
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian CDF-product integrals and the probit multivariate Bernoulli distribution", "owenext"};
  app.require_subcommand(1);

  Lemma2Args l2;
  auto* lemma2 = app.add_subcommand("lemma2", "int prod Phi((x-m_r)/v_r) N(x|mu,sigma2) dx in closed form");
  lemma2->add_option("--mu", l2.mu, "latent mean")->required();
  lemma2->add_option("--sigma2", l2.sigma2, "latent variance (> 0)")->required();
  lemma2->add_option("--m", l2.m, "comma-separated offsets m_r")->required();
  lemma2->add_option("--v", l2.v, "comma-separated scales v_r (> 0)")->required();
  lemma2->add_option("--accuracy", l2.accuracy, "absolute accuracy target")->capture_default_str();
  lemma2->add_flag("--oracle", l2.oracle, "also evaluate the Gauss-Hermite oracle");
  lemma2->add_option("--order", l2.order, "Gauss-Hermite order (20..400)")->capture_default_str();
  lemma2->add_option("--seed", l2.seed, "QMC seed")->capture_default_str();
  lemma2->add_flag("--json", l2.json, "emit a JSON object");

  Lemma3Args l3;
  auto* lemma3 = app.add_subcommand("lemma3", "int prod Phi((x_r-m_r)/v_r) N(x|mu,Sigma) dx in closed form");
  lemma3->add_option("--mu", l3.mu, "comma-separated latent mean")->required();
  lemma3->add_option("--m", l3.m, "comma-separated offsets m_r")->required();
  lemma3->add_option("--v", l3.v, "comma-separated scales v_r (> 0)")->required();
  lemma3->add_option("--cov", l3.cov, "JSON matrix file for Sigma")->required();
  lemma3->add_option("--accuracy", l3.accuracy, "absolute accuracy target")->capture_default_str();
  lemma3->add_flag("--oracle", l3.oracle, "also evaluate the Monte Carlo oracle");
  lemma3->add_option("--draws", l3.draws, "Monte Carlo draws")->capture_default_str();
  lemma3->add_option("--seed", l3.seed, "seed for QMC and Monte Carlo")->capture_default_str();
  lemma3->add_flag("--json", l3.json, "emit a JSON object");

  BernoulliArgs bp;
  auto* pmf_cmd = app.add_subcommand("pmf", "probability of a sign vector");
  auto* sample_cmd = app.add_subcommand("sample", "seeded draws, one sign vector per line");
  auto* norm_cmd = app.add_subcommand("normalize", "sum of the pmf over the support (N <= 15)");
  for (auto* sub : {pmf_cmd, sample_cmd, norm_cmd}) {
    sub->add_option("--mu", bp.mu, "comma-separated latent mean")->required();
    sub->add_option("--cov", bp.cov, "JSON matrix file for the latent covariance")->required();
    sub->add_option("--seed", bp.seed, "seed")->capture_default_str();
    sub->add_flag("--json", bp.json, "emit a JSON object");
  }
  pmf_cmd->add_option("--y", bp.y, "comma-separated signs (+1/-1)")->required();
  pmf_cmd->add_option("--accuracy", bp.accuracy, "absolute accuracy target")->capture_default_str();
  norm_cmd->add_option("--accuracy", bp.accuracy, "per-term accuracy target")->capture_default_str();
  sample_cmd->add_option("--n", bp.n, "number of draws")->required();

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "run property suites");
  verify_cmd->add_option("--suite", va.suite, "lemma2|lemma3|bernoulli|matrix|scalar|all")->capture_default_str();
  verify_cmd->add_option("--trials", va.trials, "random draws per suite")->capture_default_str();
  verify_cmd->add_option("--seed", va.seed, "seed")->capture_default_str();
  verify_cmd->add_option("--accuracy", va.accuracy, "accuracy for identity checks")->capture_default_str();
  verify_cmd->add_option("--perturb", va.perturb, "offset added to library results (failure-path testing)");
  verify_cmd->add_flag("--json", va.json, "emit a JSON object");

  TableArgs ta;
  auto* table_cmd = app.add_subcommand("table", "closed form vs oracle for a list of parameter records");
  table_cmd->add_option("--spec", ta.spec, "JSON array of records")->required();
  table_cmd->add_option("--format", ta.format, "csv|json")->capture_default_str();

  FigureArgs fa;
  auto* figure_cmd = app.add_subcommand("figure", "bivariate density grid with the orthant region");
  figure_cmd->add_option("--rho", fa.rho, "correlation in (-1, 1)")->required();
  figure_cmd->add_option("--grid", fa.grid, "points per axis")->capture_default_str();
  figure_cmd->add_option("--extent", fa.extent, "half-width of the square")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (lemma2->parsed()) return cmd_lemma2(l2, out);
    if (lemma3->parsed()) return cmd_lemma3(l3, out);
    if (pmf_cmd->parsed()) return cmd_pmf(bp, out);
    if (sample_cmd->parsed()) return cmd_sample(bp, out);
    if (norm_cmd->parsed()) return cmd_normalize(bp, out);
    if (verify_cmd->parsed()) return cmd_verify(va, out);
    if (table_cmd->parsed()) return cmd_table(ta, out);
    if (figure_cmd->parsed()) return cmd_figure(fa, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"owenext"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace owenext::cli
