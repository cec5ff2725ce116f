// numindex: command-line front end for the numerical index library.
//
// Exit codes: 0 success, 1 property failure, 2 input error.

#include "numindex/errors.hpp"
#include "numindex/index_estimator.hpp"
#include "numindex/io.hpp"
#include "numindex/numerical_range.hpp"
#include "numindex/operators.hpp"
#include "numindex/verify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace numindex;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInputError = 2;

constexpr const char* kLadder =
    "Tolerance ladder: inner optimizer 1e-8 (--tol for nu, opnorm, n1, wseq, index, limit-scan), "
    "equality assertions 1e-5 (--tol for verify), scan flags 0.03 (fixed).";

struct Options {
  std::string command;
  std::string space_path;
  std::string op_path;
  std::optional<int> m;
  std::optional<int> m_min;
  std::optional<int> jmax;
  std::optional<int> budget;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::optional<int> samples;
  std::string out;
  bool inject_fault = false;
};

// Effective parameters after defaults; every report embeds this.
Json config_json(const Options& o, const std::optional<TowerSpec>& space, int m, int jmax, int budget,
                 double tol, int samples) {
  Json c;
  c["command"] = o.command;
  c["space_file"] = o.space_path;
  if (space) c["space"] = to_json(*space);
  c["op_file"] = o.op_path;
  const bool leveled = o.command == "n1" || o.command == "wseq" || o.command == "index" || o.command == "limit-scan";
  if (leveled) c["m"] = m;
  if (o.command == "limit-scan") c["m_min"] = o.m_min.value_or(1);
  if (o.command == "wseq") c["jmax"] = jmax;
  c["budget"] = budget;
  c["seed"] = o.seed;
  c["tol"] = tol;
  if (o.command == "verify") {
    c["samples"] = samples;
    c["inject_fault"] = o.inject_fault;
  }
  c["out"] = o.out;
  return c;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(o.out, text);
  }
}

TowerSpec require_space(const Options& o) {
  if (o.space_path.empty()) throw SpecError("--space is required for " + o.command);
  return load_space(o.space_path);
}

Operator require_operator(const Options& o, const TowerSpec& spec) {
  if (o.op_path.empty()) throw SpecError("--op is required for " + o.command);
  return load_operator(o.op_path, spec);
}

SearchBudget search_budget(const Options& o) {
  SearchBudget b;
  b.restarts = o.budget.value_or(b.restarts);
  b.tol = o.tol.value_or(b.tol);
  b.seed = o.seed;
  if (b.restarts < 0) throw SpecError("--budget must be >= 0");
  if (!(b.tol > 0.0)) throw SpecError("--tol must be positive");
  return b;
}

IndexBudget index_budget(const Options& o) {
  IndexBudget b;
  b.restarts = o.budget.value_or(b.restarts);
  b.tol = o.tol.value_or(b.tol);
  if (b.restarts < 1) throw SpecError("--budget must be >= 1");
  if (!(b.tol > 0.0)) throw SpecError("--tol must be positive");
  return b;
}

int level_option(const Options& o, const TowerSpec& space, int fallback) {
  const int m = o.m.value_or(fallback);
  if (m < 1 || m > space.depth()) {
    throw LevelError("--m " + std::to_string(m) + " outside levels 1.." + std::to_string(space.depth()));
  }
  return m;
}

int cmd_nu(const Options& o) {
  const TowerSpec space = require_space(o);
  const Operator op = require_operator(o, space);
  const SearchBudget b = search_budget(o);
  Json report;
  report["config"] = config_json(o, space, space.depth(), 0, b.restarts, b.tol, 0);
  report["result"] = to_json(numerical_radius(op, b));
  emit(o, report.dump(2) + "\n");
  return kOk;
}

int cmd_opnorm(const Options& o) {
  const TowerSpec space = require_space(o);
  const Operator op = require_operator(o, space);
  const SearchBudget b = search_budget(o);
  Json report;
  report["config"] = config_json(o, space, space.depth(), 0, b.restarts, b.tol, 0);
  report["result"] = to_json(operator_norm(op, b));
  emit(o, report.dump(2) + "\n");
  return kOk;
}

int cmd_n1(const Options& o) {
  const TowerSpec ambient = require_space(o);
  const int m = level_option(o, ambient, ambient.depth());
  const Operator op = require_operator(o, ambient.truncated(m));
  const SearchBudget b = search_budget(o);
  Json report;
  report["config"] = config_json(o, ambient, m, 0, b.restarts, b.tol, 0);
  report["result"] = to_json(n1_of_operator(op, ambient, b));
  emit(o, report.dump(2) + "\n");
  return kOk;
}

int cmd_wseq(const Options& o) {
  const TowerSpec ambient = require_space(o);
  const int m = level_option(o, ambient, 1);
  const int jmax = o.jmax.value_or(ambient.depth() - m);
  const Operator op = require_operator(o, ambient.truncated(m));
  const SearchBudget b = search_budget(o);
  Json terms = Json::array();
  for (const RadiusEstimate& r : w_sequence(op, ambient, jmax, b)) terms.push_back(to_json(r));
  Json report;
  report["config"] = config_json(o, ambient, m, jmax, b.restarts, b.tol, 0);
  report["result"]["terms"] = terms;
  report["result"]["w_infinity"] = to_json(w_infinity(op, ambient, b));
  emit(o, report.dump(2) + "\n");
  return kOk;
}

int cmd_index(const Options& o) {
  const TowerSpec ambient = require_space(o);
  const int m = level_option(o, ambient, ambient.depth());
  const IndexBudget b = index_budget(o);
  const IndexEstimate e = estimate_index(ambient.truncated(m), b, o.seed);
  std::ostringstream csv;
  csv << "# config " << config_json(o, ambient, m, 0, b.restarts, b.tol, 0).dump() << "\n";
  csv << "# witness " << to_json(e.witness).dump() << "\n";
  csv << "m,n_hat,witness_radius,restarts,seed,best_restart,restart_variance,flag\n";
  csv << m << "," << format_float(e.value) << "," << format_float(e.witness_radius) << "," << b.restarts << ","
      << o.seed << "," << e.best_restart << "," << format_float(e.restart_variance) << ","
      << (e.noisy ? "noisy" : "pass") << "\n";
  emit(o, csv.str());
  return kOk;
}

int cmd_limit_scan(const Options& o) {
  const TowerSpec tower = require_space(o);
  const int m_max = o.m.value_or(tower.depth());
  const int m_min = o.m_min.value_or(1);
  if (m_max < 1 || m_min < 1 || m_min > m_max) {
    throw SpecError("empty scan range " + std::to_string(m_min) + ".." + std::to_string(m_max));
  }
  if (m_max > tower.depth()) {
    throw LevelError("scan to level " + std::to_string(m_max) + " needs tower depth >= " +
                     std::to_string(m_max) + ", got " + std::to_string(tower.depth()));
  }
  const IndexBudget b = index_budget(o);
  const LimitScan scan = limit_scan(tower, m_min, m_max, b, o.seed);
  const Json config = config_json(o, tower, m_max, 0, b.restarts, b.tol, 0);

  std::ostringstream csv;
  csv << "# config " << config.dump() << "\n";
  csv << "m,n_hat,n1_hat,witness_file,restarts,seed,flag\n";
  for (const ScanRow& row : scan.rows) {
    std::string witness_file = "-";
    if (!o.out.empty()) {
      witness_file = o.out + ".m" + std::to_string(row.m) + ".json";
      Json w;
      w["config"] = config;
      w["m"] = row.m;
      w["n"] = to_json(row.n);
      w["n1"] = to_json(row.n1);
      write_text_file(witness_file, w.dump(2) + "\n");
    }
    csv << row.m << "," << format_float(row.n.value) << "," << format_float(row.n1.value) << "," << witness_file
        << "," << b.restarts << "," << o.seed << "," << row_flag(row) << "\n";
  }
  emit(o, csv.str());

  std::ostream& summary = o.out.empty() ? std::cerr : std::cout;
  summary << "limit scan m=" << m_min << ".." << m_max << ": floor (n(X_m) >= n(X_" << m_max << ") - "
          << kScanTolerance << ") " << (scan.floor_ok ? "pass" : "FAIL") << ", envelope "
          << (scan.envelope_ok ? "pass" : "FAIL") << "\n";
  return scan.passed() ? kOk : kPropertyFailure;
}

int cmd_verify(const Options& o) {
  VerifyConfig config;
  if (!o.space_path.empty()) config.space = load_space(o.space_path);
  config.samples = o.samples.value_or(config.samples);
  config.seed = o.seed;
  config.tol = o.tol.value_or(config.tol);
  config.search.restarts = o.budget.value_or(config.search.restarts);
  config.inject_fault = o.inject_fault;
  if (config.samples < 0) throw SpecError("--samples must be >= 0");
  if (config.search.restarts < 0) throw SpecError("--budget must be >= 0");
  if (!(config.tol > 0.0)) throw SpecError("--tol must be positive");

  const VerifyReport report = run_verify(config);
  std::ostringstream text;
  text << "# config "
       << config_json(o, config.space, 0, 0, config.search.restarts, config.tol, config.samples).dump() << "\n";
  if (config.samples == 0) text << "warning: 0 samples, every sampled property passes vacuously\n";
  int failed = 0, skipped = 0;
  for (const PropertyResult& p : report.properties) {
    const char* status = p.skipped ? "SKIP" : (p.passed ? "PASS" : "FAIL");
    failed += !p.passed;
    skipped += p.skipped;
    text << status << " " << p.name << " samples=" << p.samples << " max_violation=" << format_float(p.max_violation)
         << " tol=" << format_float(p.tol) << " seed=" << p.seed;
    if (!p.note.empty()) text << " note=\"" << p.note << "\"";
    text << "\n";
    std::cerr << "timing " << p.name << " " << p.seconds << "s\n";
  }
  text << "summary: " << report.properties.size() - failed - skipped << " passed, " << failed << " failed, "
       << skipped << " skipped\n";
  emit(o, text.str());
  return report.passed() ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical index estimation on l_p towers.\n" + std::string(kLadder)};
  app.require_subcommand(1, 1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_op) {
    sub->add_option("--space", o.space_path, "space JSON file");
    if (needs_op) sub->add_option("--op", o.op_path, "operator JSON file");
    sub->add_option("--budget", o.budget, "multistart restarts (index commands: outer restarts)");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--tol", o.tol, kLadder);
    sub->add_option("--out", o.out, "output file (stdout when omitted)");
  };
  CLI::App* nu = app.add_subcommand("nu", "numerical radius of an operator");
  common(nu, true);
  CLI::App* opnorm = app.add_subcommand("opnorm", "operator norm");
  common(opnorm, true);
  CLI::App* n1 = app.add_subcommand("n1", "modified radius n1 of an operator on level --m");
  common(n1, true);
  n1->add_option("--m", o.m, "level of the operator (default: depth)");
  CLI::App* wseq = app.add_subcommand("wseq", "w-sequence of an operator on level --m");
  common(wseq, true);
  wseq->add_option("--m", o.m, "level of the operator (default 1)");
  wseq->add_option("--jmax", o.jmax, "last step j (default: depth - m)");
  CLI::App* index = app.add_subcommand("index", "upper-bound estimate of the numerical index of X_m");
  common(index, false);
  index->add_option("--m", o.m, "level (default: depth)");
  CLI::App* scan = app.add_subcommand("limit-scan", "n(X_m) and n1(X_m) for m = --m-min..--m");
  common(scan, false);
  scan->add_option("--m", o.m, "last level (default: depth)");
  scan->add_option("--m-min", o.m_min, "first level (default 1)");
  CLI::App* verify = app.add_subcommand("verify", "property suite (default space: flat l_2, dim 4)");
  common(verify, false);
  verify->add_option("--samples", o.samples, "samples per property (default 50)");
  verify->add_flag("--inject-fault", o.inject_fault, "negative control: corrupt the norm seen by the CC check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  o.command = app.get_subcommands().front()->get_name();

  const auto start = std::chrono::steady_clock::now();
  int code = kInputError;
  try {
    if (o.command == "nu") code = cmd_nu(o);
    else if (o.command == "opnorm") code = cmd_opnorm(o);
    else if (o.command == "n1") code = cmd_n1(o);
    else if (o.command == "wseq") code = cmd_wseq(o);
    else if (o.command == "index") code = cmd_index(o);
    else if (o.command == "limit-scan") code = cmd_limit_scan(o);
    else if (o.command == "verify") code = cmd_verify(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::cerr << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
            << "s\n";
  return code;
}
