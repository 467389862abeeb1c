#include "minechain/sim.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "minechain/rng.hpp"

namespace minechain {

namespace {

struct TurnOutcome {
  State next;
  double reward1 = 0, reward2 = 0;
};

// One game turn: the winner extends its branch; the loser either keeps mining
// or capitulates, validating the winner's branch past the released prefix.
TurnOutcome play_turn(const SimConfig& config, State m, int winner) {
  int s1 = config.policy1.s, s2 = config.policy2.s;
  TurnOutcome out;
  if (winner == 1) {
    if (config.policy2.decide(m.l1, m.l2) == Decision::CapitulateIfLose) {
      out.reward1 = m.l1 + 1 - s2;
      out.next = {s2, 0};
    } else {
      out.next = {m.l1 + 1, m.l2};
    }
  } else {
    if (config.policy1.decide(m.l1, m.l2) == Decision::CapitulateIfLose) {
      out.reward2 = m.l2 + 1 - s1;
      out.next = {0, s1};
    } else {
      out.next = {m.l1, m.l2 + 1};
    }
  }
  return out;
}

void check_domain(const SimConfig& config, State m) {
  if (!config.policy1.in_domain(m.l1, m.l2) ||
      !config.policy2.in_domain(m.l1, m.l2))
    throw std::runtime_error("trajectory left the policy domain at (" +
                             std::to_string(m.l1) + "," +
                             std::to_string(m.l2) +
                             "); policy depth does not cover the game");
}

void check_config(const SimConfig& config) {
  if (!(config.p1 > 0.0 && config.p1 < 1.0))
    throw std::invalid_argument("p1 must lie in (0,1)");
  if (config.turns < 1) throw std::invalid_argument("turns must be positive");
  if (config.batches < 1)
    throw std::invalid_argument("batches must be positive");
  auto violations = validate(config.policy1, config.policy2);
  if (!violations.empty())
    throw std::invalid_argument("policy validation failed: " +
                                violations[0].what);
}

double batch_se(const std::vector<double>& xs) {
  std::size_t n = xs.size();
  if (n < 2) return 0.0;
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

SimStats run(const SimConfig& config) {
  check_config(config);
  Xoshiro256pp rng(config.seed, 0);

  SimStats stats;
  stats.turns = config.turns;
  stats.seed = config.seed;

  std::uint64_t n = config.turns;
  int nbatch = config.batches;
  std::vector<double> batch_b1(nbatch, 0.0), batch_b2(nbatch, 0.0);
  std::vector<std::uint64_t> batch_len(nbatch, 0);
  std::map<std::pair<int, int>, std::uint64_t> visits;

  State m{0, 0};
  double exp_unit_total = 0;  // durations accumulated as Exp(1), scaled below
  for (std::uint64_t t = 0; t < n; ++t) {
    check_domain(config, m);
    ++visits[{m.l1, m.l2}];
    int batch = static_cast<int>(t * static_cast<std::uint64_t>(nbatch) / n);
    int winner = rng.next_double() < config.p1 ? 1 : 2;
    TurnOutcome out = play_turn(config, m, winner);
    stats.blocks1 += out.reward1;
    stats.blocks2 += out.reward2;
    batch_b1[batch] += out.reward1;
    batch_b2[batch] += out.reward2;
    ++batch_len[batch];
    if (config.exponential_durations)
      exp_unit_total += -std::log1p(-rng.next_double());
    m = out.next;
  }

  double total = stats.blocks1 + stats.blocks2;
  if (total > 0) {
    stats.g1_hat = stats.blocks1 / total;
    stats.g2_hat = stats.blocks2 / total;
  } else {
    stats.g1_hat = stats.g2_hat = 0.5;  // degenerate: no validated blocks
  }
  // The chain starts with one validated block already on it; the estimator
  // itself is blocks per turn, matching the per-batch rates behind se_h.
  stats.chain_blocks = 1.0 + total;
  stats.h_hat = total / static_cast<double>(n);
  double rho1 = stats.blocks1 / static_cast<double>(n);
  double rho2 = stats.blocks2 / static_cast<double>(n);
  stats.rev1_hat = rho1 - config.c1 * config.tau_bar * stats.h_hat;
  stats.rev2_hat = rho2 - config.c2 * config.tau_bar * stats.h_hat;
  if (config.exponential_durations)
    stats.duration_total = stats.h_hat * config.tau_bar * exp_unit_total;

  std::vector<double> g1s, hs;
  for (int b = 0; b < nbatch; ++b) {
    if (batch_len[b] == 0) continue;
    double bt = batch_b1[b] + batch_b2[b];
    if (bt > 0) g1s.push_back(batch_b1[b] / bt);
    hs.push_back(bt / static_cast<double>(batch_len[b]));
  }
  stats.se_g1 = batch_se(g1s);
  stats.se_h = batch_se(hs);

  stats.visit_freq.reserve(visits.size());
  for (const auto& [cell, count] : visits)
    stats.visit_freq.push_back({State{cell.first, cell.second},
                                static_cast<double>(count) /
                                    static_cast<double>(n)});
  return stats;
}

std::vector<HittingSample> hitting_samples(const SimConfig& config,
                                           State target, int replications) {
  check_config(config);
  if (replications < 1)
    throw std::invalid_argument("replications must be positive");
  std::vector<HittingSample> samples;
  samples.reserve(replications);
  for (int r = 0; r < replications; ++r) {
    Xoshiro256pp rng(config.seed, static_cast<std::uint64_t>(r));
    State m{0, 0};
    HittingSample sample;
    sample.censored = true;
    sample.turns = config.turns;
    for (std::uint64_t t = 0; t <= config.turns; ++t) {
      if (m == target) {
        sample.turns = t;
        sample.censored = false;
        break;
      }
      if (t == config.turns) break;
      check_domain(config, m);
      int winner = rng.next_double() < config.p1 ? 1 : 2;
      m = play_turn(config, m, winner).next;
    }
    samples.push_back(sample);
  }
  return samples;
}

std::string stats_to_json(const SimStats& stats) {
  nlohmann::json j;
  j["turns"] = stats.turns;
  j["seed"] = stats.seed;
  j["blocks1"] = stats.blocks1;
  j["blocks2"] = stats.blocks2;
  j["chain_blocks"] = stats.chain_blocks;
  j["g1_hat"] = stats.g1_hat;
  j["g2_hat"] = stats.g2_hat;
  j["h_hat"] = stats.h_hat;
  j["rev1_hat"] = stats.rev1_hat;
  j["rev2_hat"] = stats.rev2_hat;
  j["se_g1"] = stats.se_g1;
  j["se_h"] = stats.se_h;
  j["duration_total"] = stats.duration_total;
  auto freq = nlohmann::json::array();
  for (const auto& [state, f] : stats.visit_freq)
    freq.push_back({{"l1", state.l1}, {"l2", state.l2}, {"freq", f}});
  j["visit_freq"] = freq;
  return j.dump();
}

}  // namespace minechain
