#include "vrp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "parallel.hpp"
#include "vrp/equilibrium.hpp"
#include "vrp/mechanism.hpp"
#include "vrp/numerics.hpp"

namespace vrp {

namespace {

constexpr double kValueTie = 1e-12;
constexpr double kDistanceTie = 1e-15;
constexpr std::size_t kRowsPerBlock = 8;

struct Moments2 {
  double mean;
  double second;
};

// Final-outcome moments when grid[w] wins round t.
Moments2 after_round(const DiscreteGame& g, const ValueTable& table, int t, std::size_t w) {
  if (t == table.rounds()) {
    return {g.grid[w], g.grid[w] * g.grid[w]};
  }
  const RoundPolicy& next = table.round(t + 1);
  return {next.outcome_mean[w], next.outcome_second[w]};
}

double lottery_utility(Moments2 m, double theta) {
  return -(m.second - 2.0 * theta * m.mean + theta * theta);
}

std::vector<Moments2> continuation_moments(const DiscreteGame& g, const ValueTable& table,
                                           int t) {
  std::vector<Moments2> out(g.grid_size());
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = after_round(g, table, t, w);
  return out;
}

// Truthful ballots: each voter backs the strictly closer alternative.
void truthful_accepts(const DiscreteGame& g, RoundPolicy& rp) {
  const std::size_t n = g.grid_size();
  rp.accepts.assign(n * n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      rp.accepts[p * n + q] =
          panel_vote(g.panel, g.grid[p], g.grid[q]).winner == g.grid[p] ? 1 : 0;
    }
  }
}

// Sophisticated ballots: each voter backs the alternative whose win gives the
// higher continuation utility; indifference counts for the proposal.
void sophisticated_accepts(const DiscreteGame& g, const std::vector<Moments2>& cont,
                           RoundPolicy& rp, unsigned threads) {
  const std::size_t n = g.grid_size();
  const std::size_t m = g.panel.size();
  rp.accepts.assign(n * n, 0);
  const std::size_t blocks = (n + kRowsPerBlock - 1) / kRowsPerBlock;
  detail::parallel_blocks(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kRowsPerBlock);
    for (std::size_t p = b * kRowsPerBlock; p < end; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (p == q) {
          rp.accepts[p * n + q] = 1;
          continue;
        }
        const double dm = cont[p].mean - cont[q].mean;
        const double ds = cont[p].second - cont[q].second;
        std::size_t support = 0;
        for (double v : g.panel) {
          if (2.0 * v * dm - ds >= -kValueTie) ++support;
        }
        rp.accepts[p * n + q] = 2 * support >= m ? 1 : 0;
      }
    }
  });
}

using ProposalRule = std::function<std::size_t(std::size_t q, std::size_t k)>;

// Fills proposal/winner/value for every (q, k). With a rule, proposals are
// prescribed; otherwise each proposer best-responds.
void play_round(const DiscreteGame& g, const std::vector<Moments2>& cont, RoundPolicy& rp,
                bool final_round, const ProposalRule* rule, unsigned threads) {
  const std::size_t n = g.grid_size();
  const std::size_t kk = g.type_count();
  rp.proposal.assign(n * kk, 0);
  rp.winner.assign(n * kk, 0);
  rp.value.assign(n * kk, 0.0);

  const std::size_t blocks = (n + kRowsPerBlock - 1) / kRowsPerBlock;
  detail::parallel_blocks(blocks, threads, [&](std::size_t b) {
    std::vector<double> utility_of(n);
    const std::size_t end = std::min(n, (b + 1) * kRowsPerBlock);
    for (std::size_t q = b * kRowsPerBlock; q < end; ++q) {
      for (std::size_t k = 0; k < kk; ++k) {
        const double theta = g.type_grid[k];
        const std::size_t cell = q * kk + k;
        if (rule != nullptr) {
          const std::size_t p = (*rule)(q, k);
          const std::size_t w = rp.accepts[p * n + q] ? p : q;
          rp.proposal[cell] = static_cast<std::uint32_t>(p);
          rp.winner[cell] = static_cast<std::uint32_t>(w);
          rp.value[cell] = lottery_utility(cont[w], theta);
          continue;
        }
        for (std::size_t w = 0; w < n; ++w) utility_of[w] = lottery_utility(cont[w], theta);
        // Equal values: prefer the winner nearest the own type in the last
        // round and nearest the median before it.
        const double anchor = final_round ? theta : g.snapped_theta_mu;
        std::size_t best_p = 0;
        std::size_t best_w = rp.accepts[q] ? 0 : q;
        double best_v = utility_of[best_w];
        for (std::size_t p = 1; p < n; ++p) {
          const std::size_t w = rp.accepts[p * n + q] ? p : q;
          const double v = utility_of[w];
          bool take = v > best_v + kValueTie;
          if (!take && v >= best_v - kValueTie) {
            const double dw = std::fabs(g.grid[w] - anchor);
            const double bdw = std::fabs(g.grid[best_w] - anchor);
            if (dw < bdw - kDistanceTie) {
              take = true;
            } else if (dw <= bdw + kDistanceTie) {
              take = std::fabs(g.grid[p] - theta) < std::fabs(g.grid[best_p] - theta) - kDistanceTie;
            }
          }
          if (take) {
            best_p = p;
            best_w = w;
            best_v = v;
          }
        }
        rp.proposal[cell] = static_cast<std::uint32_t>(best_p);
        rp.winner[cell] = static_cast<std::uint32_t>(best_w);
        rp.value[cell] = best_v;
      }
    }
  });

  rp.outcome_mean.assign(n, 0.0);
  rp.outcome_second.assign(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      const Moments2& c = cont[rp.winner[q * kk + k]];
      m1 += g.type_weights[k] * c.mean;
      m2 += g.type_weights[k] * c.second;
    }
    rp.outcome_mean[q] = m1;
    rp.outcome_second[q] = m2;
  }
}

bool in_band(const DiscreteGame& g, const EquilibriumThresholds& th, double theta) {
  const double band = 2.0 * g.cell() + 1e-12;
  return std::fabs(theta - th.theta_lower) <= band || std::fabs(theta - th.theta_upper) <= band;
}

}  // namespace

std::size_t DiscreteGame::snap(double x) const {
  const double scaled = clamp_unit(x) * static_cast<double>(grid.size() - 1);
  return std::min(grid.size() - 1, static_cast<std::size_t>(std::floor(scaled + 0.5)));
}

DiscreteGame build_discrete_game(const TypeDistribution& d, std::size_t grid_points,
                                 std::size_t panel_size, int rounds, std::size_t type_nodes) {
  if (grid_points < 3) throw ArgumentError("oracle grid needs at least 3 points");
  if (panel_size < 1 || panel_size % 2 == 0) throw ArgumentError("panel size must be odd");
  if (rounds < 1) throw ArgumentError("rounds must be at least 1");
  if (type_nodes < 2) throw ArgumentError("type grid needs at least 2 nodes");

  DiscreteGame g;
  g.distribution = d;
  g.rounds = rounds;
  g.grid.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    g.grid[i] = static_cast<double>(i) / static_cast<double>(grid_points - 1);
  }
  g.theta_mu = d.median();
  g.median_index = g.snap(g.theta_mu);
  g.snapped_theta_mu = g.grid[g.median_index];
  // The median voter sits on the snapped median so that the grid game has a
  // Condorcet winner; peaks crossed by the move collapse onto it.
  g.panel = quantile_panel(d, panel_size);
  const std::size_t mid = panel_size / 2;
  for (std::size_t i = 0; i < panel_size; ++i) {
    if (i < mid) g.panel[i] = std::min(g.panel[i], g.snapped_theta_mu);
    if (i > mid) g.panel[i] = std::max(g.panel[i], g.snapped_theta_mu);
  }
  g.panel[mid] = g.snapped_theta_mu;

  g.type_grid.resize(type_nodes);
  for (std::size_t k = 0; k < type_nodes; ++k) {
    g.type_grid[k] = static_cast<double>(k) / static_cast<double>(type_nodes - 1);
  }
  // CDF mass of the cell around each node; stays finite for unbounded densities.
  g.type_weights.resize(type_nodes);
  double lower_cdf = 0.0;
  for (std::size_t k = 0; k < type_nodes; ++k) {
    const double upper_edge =
        k + 1 == type_nodes ? 1.0 : 0.5 * (g.type_grid[k] + g.type_grid[k + 1]);
    const double upper_cdf = k + 1 == type_nodes ? 1.0 : d.cdf(upper_edge);
    g.type_weights[k] = upper_cdf - lower_cdf;
    lower_cdf = upper_cdf;
  }
  return g;
}

ValueTable::ValueTable(std::size_t grid_size, std::size_t type_count, int rounds)
    : grid_size_(grid_size), type_count_(type_count), policy_(static_cast<std::size_t>(rounds)) {}

double ValueTable::continuation_value(const DiscreteGame& g, int t, std::size_t w,
                                      double theta) const {
  return lottery_utility(after_round(g, *this, t, w), theta);
}

ValueTable backward_induction(const DiscreteGame& g, unsigned threads) {
  ValueTable table(g.grid_size(), g.type_count(), g.rounds);
  for (int t = g.rounds; t >= 1; --t) {
    const std::vector<Moments2> cont = continuation_moments(g, table, t);
    RoundPolicy& rp = table.round(t);
    if (t == g.rounds) {
      truthful_accepts(g, rp);
    } else {
      sophisticated_accepts(g, cont, rp, threads);
    }
    play_round(g, cont, rp, t == g.rounds, nullptr, threads);
  }
  return table;
}

double analytic_intermediate_winner(const EquilibriumThresholds& th, double proposer_type,
                                    double status_quo) {
  if (!in_own_type_regime(th, proposer_type, status_quo)) {
    return th.theta_mu;
  }
  if (std::max(status_quo, proposer_type) < th.theta_lower) {
    return std::max(status_quo, proposer_type);
  }
  return std::min(status_quo, proposer_type);
}

TheoremReport verify_theorem(const DiscreteGame& g, const ValueTable& table,
                             const EquilibriumThresholds& th) {
  TheoremReport rep;
  const double allowed = g.cell() + 1e-12;
  for (int t = 1; t < g.rounds; ++t) {
    for (std::size_t q = 0; q < g.grid_size(); ++q) {
      for (std::size_t k = 0; k < g.type_count(); ++k) {
        const double theta = g.type_grid[k];
        if (in_band(g, th, theta)) {
          ++rep.excluded;
          continue;
        }
        ++rep.checked;
        const double analytic = analytic_intermediate_winner(th, theta, g.grid[q]);
        const double oracle = g.grid[table.winner(t, q, k)];
        const double gap = std::fabs(oracle - analytic);
        if (gap > allowed) {
          rep.violations.push_back({t, k, q, analytic, oracle, gap});
        }
      }
    }
  }
  return rep;
}

StrategyProofnessReport verify_strategy_proofness(const DiscreteGame& g,
                                                  const EquilibriumThresholds& th,
                                                  unsigned threads) {
  const std::size_t n = g.grid_size();
  const std::size_t kk = g.type_count();
  ValueTable profile(n, kk, g.rounds);
  const ProposalRule closed_form = [&](std::size_t q, std::size_t k) {
    const ProposalDecision dec = optimal_proposal_intermediate(th, g.type_grid[k], g.grid[q]);
    return dec.rationale == ProposalRationale::OwnType ? g.snap(dec.proposal) : g.median_index;
  };
  for (int t = g.rounds; t >= 1; --t) {
    const std::vector<Moments2> cont = continuation_moments(g, profile, t);
    RoundPolicy& rp = profile.round(t);
    truthful_accepts(g, rp);
    play_round(g, cont, rp, t == g.rounds, t == g.rounds ? nullptr : &closed_form, threads);
  }

  StrategyProofnessReport rep;
  for (int t = 1; t <= g.rounds; ++t) {
    const RoundPolicy& rp = profile.round(t);
    const std::vector<Moments2> cont = continuation_moments(g, profile, t);

    // Proposers: any grid proposal against the prescribed one.
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t k = 0; k < kk; ++k) {
        ++rep.proposer_checks;
        const double theta = g.type_grid[k];
        const double eq_value = rp.value[q * kk + k];
        double best = eq_value;
        std::size_t best_p = rp.proposal[q * kk + k];
        for (std::size_t p = 0; p < n; ++p) {
          const std::size_t w = rp.accepts[p * n + q] ? p : q;
          const double v = lottery_utility(cont[w], theta);
          if (v > best) {
            best = v;
            best_p = p;
          }
        }
        const double gain = best - eq_value;
        rep.max_gain = std::max(rep.max_gain, gain);
        if (gain > tol::dev) {
          rep.violations.push_back({t, false, k, q, rp.proposal[q * kk + k], best_p, gain});
        }
      }
    }

    // Pivotal voters on every ballot the prescribed proposals produce.
    for (std::size_t q = 0; q < n; ++q) {
      std::set<std::size_t> ballots;
      for (std::size_t k = 0; k < kk; ++k) ballots.insert(rp.proposal[q * kk + k]);
      for (std::size_t p : ballots) {
        if (p == q) continue;
        const double gp = g.grid[p];
        const double gq = g.grid[q];
        std::size_t support = 0;
        std::vector<char> backs(g.panel.size());
        for (std::size_t i = 0; i < g.panel.size(); ++i) {
          backs[i] = weakly_prefers(g.panel[i], gp, gq) ? 1 : 0;
          support += backs[i];
        }
        const std::size_t m = g.panel.size();
        const bool p_wins = 2 * support >= m;
        const std::size_t winner = p_wins ? p : q;
        const std::size_t loser = p_wins ? q : p;
        for (std::size_t i = 0; i < m; ++i) {
          const bool on_winning_side = (backs[i] != 0) == p_wins;
          if (!on_winning_side) continue;
          // Withdrawing this vote must flip the result for it to be pivotal.
          const std::size_t after = p_wins ? support - 1 : support + 1;
          if ((2 * after >= m) == p_wins) continue;
          ++rep.voter_checks;
          const double v = g.panel[i];
          const double gain = lottery_utility(cont[loser], v) - lottery_utility(cont[winner], v);
          rep.max_gain = std::max(rep.max_gain, gain);
          if (gain > tol::dev) {
            rep.violations.push_back({t, true, i, q, p, loser, gain});
          }
        }
      }
    }
  }
  return rep;
}

bool verify_lemma1_sign(const TypeDistribution& d, const EquilibriumThresholds& th,
                        std::size_t points) {
  if (points < 10) throw ArgumentError("verify_lemma1_sign needs at least 10 points");
  constexpr double kSignTol = 1e-9;
  for (std::size_t i = 0; i < points; ++i) {
    const double theta = static_cast<double>(i) / static_cast<double>(points - 1);
    const double gap =
        expected_utility_of_winner(d, theta, theta) - utility(theta, th.theta_mu);
    // A clamped threshold is not itself an indifferent type, so the
    // own-type side is taken open.
    const bool extreme = theta < th.theta_lower || theta > th.theta_upper;
    if (extreme ? gap < -kSignTol : gap > kSignTol) return false;
  }
  return true;
}

void write_violations(std::ostream& out, const TheoremReport& report) {
  out << "round,type_index,q_index,analytic,oracle,gap\n";
  char line[192];
  for (const TheoremViolation& v : report.violations) {
    std::snprintf(line, sizeof line, "%d,%zu,%zu,%.17g,%.17g,%.17g\n", v.round, v.type_index,
                  v.q_index, v.analytic, v.oracle, v.gap);
    out << line;
  }
}

}  // namespace vrp
