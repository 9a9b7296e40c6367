#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <variant>

#include "vrp/distributions.hpp"
#include "vrp/equilibrium.hpp"
#include "vrp/numerics.hpp"
#include "vrp/oracle.hpp"
#include "vrp/simulator.hpp"
#include "vrp/thresholds.hpp"

namespace vrp::cli {

namespace {

using Json = nlohmann::ordered_json;

// Value of one output field; monostate prints as an empty cell / null.
using Value = std::variant<std::monostate, std::string, double, std::int64_t, std::uint64_t, bool>;
using Record = std::vector<std::pair<std::string, Value>>;

enum class Format { Text, Csv, Json };

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string render(const Value& v, int digits) {
  struct Visitor {
    int digits;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double x) const { return format_double(x, digits); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{digits}, v);
}

Json to_json(const Value& v) {
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(const std::string& s) const { return s; }
    Json operator()(double x) const { return x; }
    Json operator()(std::int64_t x) const { return x; }
    Json operator()(std::uint64_t x) const { return x; }
    Json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, v);
}

Json to_json(const Record& r) {
  Json j = Json::object();
  for (const auto& [k, v] : r) j[k] = to_json(v);
  return j;
}

void write_table(std::ostream& out, const std::vector<Record>& rows, Format fmt) {
  if (fmt == Format::Json) {
    Json arr = Json::array();
    for (const Record& r : rows) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
    return;
  }
  if (rows.empty()) return;
  const int digits = fmt == Format::Csv ? 17 : 6;
  const char* sep = fmt == Format::Csv ? "," : "  ";
  for (std::size_t i = 0; i < rows.front().size(); ++i) {
    out << (i ? sep : "") << rows.front()[i].first;
  }
  out << '\n';
  for (const Record& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::string cell = render(r[i].second, digits);
      if (fmt == Format::Csv && cell.find_first_of(",\"") != std::string::npos) {
        std::string quoted = "\"";
        for (char ch : cell) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cell = quoted + "\"";
      }
      out << (i ? sep : "") << cell;
    }
    out << '\n';
  }
}

void write_record(std::ostream& out, const Record& r, Format fmt) {
  if (fmt != Format::Text) {
    if (fmt == Format::Json) {
      out << to_json(r).dump(2) << '\n';
    } else {
      write_table(out, {r}, fmt);
    }
    return;
  }
  std::size_t width = 0;
  for (const auto& [k, v] : r) width = std::max(width, k.size());
  for (const auto& [k, v] : r) {
    const std::string cell = render(v, 6);
    out << k << std::string(width - k.size() + 2, ' ') << (cell.empty() ? "-" : cell) << '\n';
  }
}

template <class T>
Value optional_value(const std::optional<T>& v) {
  return v ? Value{*v} : Value{};
}

// Output goes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

struct Common {
  std::string dist = "uniform";
  std::string dist_positional;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  TypeDistribution distribution(std::ostream& err) const {
    const std::string& spec = dist_positional.empty() ? dist : dist_positional;
    TypeDistribution d = parse_distribution(spec);
    if (d.clamped_samples() > 0) {
      err << "warning: " << d.clamped_samples() << " empirical samples clamped to [0,1]\n";
    }
    return d;
  }

  Format output_format(Format fallback) const {
    if (format.empty()) return fallback;
    return format == "json" ? Format::Json : Format::Csv;
  }
};

void add_common(CLI::App* sub, Common& c, bool positional_dist) {
  sub->add_option("--dist", c.dist, "Distribution: uniform, beta:A,B, tnormal:MU,SIGMA, "
                                    "tlogistic:MU,S, empirical:PATH[,EPS]");
  if (positional_dist) {
    sub->add_option("spec", c.dist_positional, "Distribution (alternative to --dist)");
  }
  sub->add_option("--seed", c.seed, "Master RNG seed");
  sub->add_option("--out", c.out_path, "Write results to PATH instead of stdout");
  sub->add_option("--format", c.format, "Machine-readable output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", "Flat key=value file; flags given on the command line win");
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ArgumentError("--q1-range expects LO,HI");
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const double lo = std::stod(s.substr(0, comma), &used_lo);
    const std::string hi_text = s.substr(comma + 1);
    const double hi = std::stod(hi_text, &used_hi);
    if (used_lo != comma || used_hi != hi_text.size()) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw ArgumentError("--q1-range expects LO,HI, got '" + s + "'");
  }
}

// thresholds ---------------------------------------------------------------

int cmd_thresholds(const Common& c, std::ostream& out, std::ostream& err) {
  const TypeDistribution d = c.distribution(err);
  const EquilibriumThresholds th = solve_thresholds(d);
  const AdmissibilityReport adm = check_admissibility(d);
  const TwoRoundCertificate cert = two_round_condition(d);
  const Record r = {
      {"distribution", d.describe()},
      {"theta_mu", th.theta_mu},
      {"theta_lower", th.theta_lower},
      {"theta_upper", th.theta_upper},
      {"lower_root_found", th.lower_root_found},
      {"upper_root_found", th.upper_root_found},
      {"mean", adm.mean},
      {"variance", adm.variance},
      {"branch", std::string(to_string(adm.branch))},
      {"admissibility_integral", adm.integral_value},
      {"admissible", adm.admissible},
      {"two_round_branch", std::string(to_string(cert.branch))},
      {"two_round_lhs_variance", cert.lhs_variance},
      {"two_round_rhs", cert.rhs},
      {"two_round_holds", cert.holds},
      {"F_theta_lower", d.cdf(th.theta_lower)},
      {"one_minus_F_theta_upper", 1.0 - d.cdf(th.theta_upper)},
  };
  Sink sink(c.out_path, out);
  write_record(sink.get(), r, c.output_format(Format::Text));
  return kExitOk;
}

// simulate -----------------------------------------------------------------

struct SimulateArgs {
  int rounds = 2;
  double q1 = 0.5;
  std::string q1_range;
  std::uint64_t reps = 10000;
  std::string voters = "sophisticated";
  std::string proposers = "equilibrium";
  std::string dump_path;
  std::uint64_t dump_count = 0;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  GameConfig cfg;
  cfg.distribution = c.distribution(err);
  cfg.rounds = a.rounds;
  cfg.initial_status_quo = a.q1;
  if (!a.q1_range.empty()) cfg.status_quo_range = parse_range(a.q1_range);
  cfg.voter_mode = a.voters == "myopic" ? VoterMode::Myopic : VoterMode::Sophisticated;
  cfg.proposer_mode =
      a.proposers == "naive" ? ProposerMode::OwnPeakNaive : ProposerMode::Equilibrium;
  cfg.seed = c.seed;
  cfg.replications = a.reps;
  cfg.threads = c.threads;

  const Simulator sim(cfg);
  const SimulationReport rep = sim.run_monte_carlo();
  Record r = {
      {"distribution", cfg.distribution.describe()},
      {"rounds", std::int64_t{cfg.rounds}},
  };
  if (cfg.status_quo_range) {
    r.emplace_back("q1_low", cfg.status_quo_range->first);
    r.emplace_back("q1_high", cfg.status_quo_range->second);
  } else {
    r.emplace_back("q1", cfg.initial_status_quo);
  }
  const Record rest = {
      {"voters", std::string(to_string(cfg.voter_mode))},
      {"proposers", std::string(to_string(cfg.proposer_mode))},
      {"seed", cfg.seed},
      {"replications", rep.replications},
      {"theta_mu", sim.thresholds().theta_mu},
      {"successes", rep.successes},
      {"p_hat", rep.p_hat},
      {"standard_error", rep.standard_error},
      {"closed_form", optional_value(rep.closed_form)},
      {"z_score", optional_value(rep.z_score)},
      {"mean_final_distance_to_median", rep.mean_final_distance_to_median},
  };
  r.insert(r.end(), rest.begin(), rest.end());

  if (!a.dump_path.empty()) {
    std::ofstream dump(a.dump_path);
    if (!dump) throw std::runtime_error("cannot open trajectory file " + a.dump_path);
    sim.write_trajectories_csv(dump, a.dump_count ? std::min(a.dump_count, a.reps) : a.reps);
  }
  Sink sink(c.out_path, out);
  write_record(sink.get(), r, c.output_format(Format::Text));
  return kExitOk;
}

// sweep --------------------------------------------------------------------

struct SweepArgs {
  int t_max = 5;
  std::uint64_t reps = 0;
  // Unset: the extreme status quo on the long tail's side, where the
  // closed form is the exact success probability.
  std::optional<double> q1;
};

int cmd_sweep(const Common& c, const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.t_max < 2) throw ArgumentError("--Tmax must be at least 2");
  const TypeDistribution d = c.distribution(err);
  const EquilibriumThresholds th = solve_thresholds(d);
  std::vector<Record> rows;
  for (int t = 2; t <= a.t_max; ++t) {
    Record r = {{"T", std::int64_t{t}}, {"closed_form", closed_form_probability(d, th, t)}};
    if (a.reps > 0) {
      GameConfig cfg;
      cfg.distribution = d;
      cfg.rounds = t;
      cfg.initial_status_quo = a.q1.value_or(th.theta_mu >= 0.5 ? 0.0 : 1.0);
      cfg.seed = c.seed;
      cfg.replications = a.reps;
      cfg.threads = c.threads;
      const SimulationReport rep = run_monte_carlo(cfg);
      r.emplace_back("monte_carlo", rep.p_hat);
      r.emplace_back("stderr", rep.standard_error);
    } else {
      r.emplace_back("monte_carlo", Value{});
      r.emplace_back("stderr", Value{});
    }
    rows.push_back(std::move(r));
  }
  Sink sink(c.out_path, out);
  write_table(sink.get(), rows, c.output_format(Format::Csv));
  return kExitOk;
}

// verify -------------------------------------------------------------------

struct VerifyArgs {
  std::size_t grid = 201;
  std::size_t panel = 1001;
  int rounds = 2;
  std::size_t type_nodes = kDefaultTypeNodes;
  std::string violations_path;
};

int cmd_verify(const Common& c, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const TypeDistribution d = c.distribution(err);
  const EquilibriumThresholds th = solve_thresholds(d);
  const DiscreteGame g = build_discrete_game(d, a.grid, a.panel, a.rounds, a.type_nodes);
  const ValueTable table = backward_induction(g, c.threads);
  const TheoremReport thm = verify_theorem(g, table, th);
  const StrategyProofnessReport sp = verify_strategy_proofness(g, th, c.threads);
  const bool lemma1 = verify_lemma1_sign(d, th, std::max<std::size_t>(a.type_nodes, 10));
  const bool passed = thm.passed() && sp.passed() && lemma1;

  double max_gap = 0.0;
  for (const TheoremViolation& v : thm.violations) max_gap = std::max(max_gap, v.gap);
  const Record r = {
      {"distribution", d.describe()},
      {"N", std::uint64_t{a.grid}},
      {"M", std::uint64_t{a.panel}},
      {"T", std::int64_t{a.rounds}},
      {"K", std::uint64_t{a.type_nodes}},
      {"snapped_theta_mu", g.snapped_theta_mu},
      {"theorem_checked", std::uint64_t{thm.checked}},
      {"theorem_excluded", std::uint64_t{thm.excluded}},
      {"theorem_violations", std::uint64_t{thm.violations.size()}},
      {"theorem_max_gap", max_gap},
      {"proposer_checks", std::uint64_t{sp.proposer_checks}},
      {"voter_checks", std::uint64_t{sp.voter_checks}},
      {"deviation_violations", std::uint64_t{sp.violations.size()}},
      {"max_deviation_gain", sp.max_gain},
      {"lemma1_sign", lemma1},
      {"passed", passed},
  };
  Sink sink(c.out_path, out);
  write_record(sink.get(), r, c.output_format(Format::Text));
  if (!a.violations_path.empty()) {
    std::ofstream f(a.violations_path);
    if (!f) throw std::runtime_error("cannot open violations file " + a.violations_path);
    write_violations(f, thm);
  }
  return passed ? kExitOk : kExitVerificationFailed;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config requires a path");
      const auto more = config_tokens(args[++i]);
      config.insert(config.end(), more.begin(), more.end());
    } else if (a.rfind("--config=", 0) == 0) {
      const auto more = config_tokens(a.substr(9));
      config.insert(config.end(), more.begin(), more.end());
    } else {
      rest.push_back(a);
    }
  }
  if (config.empty() || rest.empty()) return rest;
  // Subcommand first, then file settings, then the command line.
  std::vector<std::string> merged{rest.front()};
  merged.insert(merged.end(), config.begin(), config.end());
  merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voting with random proposers: thresholds, simulation and oracle checks", "vrp"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common th_common;
  CLI::App* th = app.add_subcommand("thresholds", "Threshold types, admissibility, two-round test");
  add_common(th, th_common, true);

  Common sim_common;
  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the success probability");
  add_common(sim, sim_common, true);
  sim->add_option("--T", sim_args.rounds, "Rounds")->check(CLI::PositiveNumber);
  sim->add_option("--q1", sim_args.q1, "Initial status quo")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--q1-range", sim_args.q1_range, "Draw q1 uniformly from LO,HI per replication");
  sim->add_option("--reps", sim_args.reps, "Replications")->check(CLI::PositiveNumber);
  sim->add_option("--voters", sim_args.voters)->check(CLI::IsMember({"sophisticated", "myopic"}));
  sim->add_option("--proposers", sim_args.proposers)->check(CLI::IsMember({"equilibrium", "naive"}));
  sim->add_option("--dump-trajectories", sim_args.dump_path, "Write per-round CSV to PATH");
  sim->add_option("--dump-count", sim_args.dump_count, "Replications to dump (default: all)");

  Common sw_common;
  SweepArgs sw_args;
  CLI::App* sw = app.add_subcommand("sweep", "Closed-form (and optional simulated) probability for T = 2..Tmax");
  add_common(sw, sw_common, true);
  sw->add_option("--Tmax", sw_args.t_max, "Largest horizon");
  sw->add_option("--reps", sw_args.reps, "Replications per horizon (0: closed form only)");
  sw->add_option("--q1", sw_args.q1, "Initial status quo")->check(CLI::Range(0.0, 1.0));

  Common ver_common;
  VerifyArgs ver_args;
  CLI::App* ver = app.add_subcommand("verify", "Brute-force oracle checks");
  add_common(ver, ver_common, true);
  ver->add_option("--N", ver_args.grid, "Grid points");
  ver->add_option("--M", ver_args.panel, "Panel size (odd)");
  ver->add_option("--T", ver_args.rounds, "Rounds");
  ver->add_option("--K", ver_args.type_nodes, "Proposer-type nodes");
  ver->add_option("--violations", ver_args.violations_path,
                  "Write round,type_index,q_index,analytic,oracle,gap lines to PATH");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (th->parsed()) return cmd_thresholds(th_common, out, err);
    if (sim->parsed()) return cmd_simulate(sim_common, sim_args, out, err);
    if (sw->parsed()) return cmd_sweep(sw_common, sw_args, out, err);
    return cmd_verify(ver_common, ver_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace vrp::cli
