#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "minechain/chain.hpp"
#include "minechain/policy.hpp"

namespace minechain {

struct SimConfig {
  CapitulationPolicy policy1, policy2;
  double p1 = 0.5;
  std::uint64_t turns = 1000000;
  std::uint64_t seed = 1;
  double c1 = 0, c2 = 0;   // cost rates for the revenue estimators
  double tau_bar = 10.0;
  int batches = 32;        // batch-means blocks
  bool exponential_durations = false;  // draw per-turn durations ~ Exp(mean tau_b)
};

struct SimStats {
  std::uint64_t turns = 0;
  std::uint64_t seed = 0;
  double blocks1 = 0, blocks2 = 0;  // validated block totals per player
  double chain_blocks = 0;  // 1 + blocks1 + blocks2: the chain keeps its start block
  double g1_hat = 0, g2_hat = 0;    // block shares (sum exactly 1)
  double h_hat = 0;                 // validated blocks per turn
  double rev1_hat = 0, rev2_hat = 0;
  double se_g1 = 0, se_h = 0;       // batch-means standard errors
  double duration_total = 0;        // only when exponential_durations
  std::vector<std::pair<State, double>> visit_freq;  // sorted by state
};

// Turn-by-turn simulation from (0,0) with a deterministic seeded generator.
// Throws std::runtime_error if the trajectory leaves a bounded policy's
// domain (policy/depth mismatch).
SimStats run(const SimConfig& config);

struct HittingSample {
  std::uint64_t turns = 0;
  bool censored = false;  // budget (config.turns) hit before the target
};

// Independent first-passage replications to `target`; replication r uses
// stream r of config.seed.
std::vector<HittingSample> hitting_samples(const SimConfig& config,
                                           State target, int replications);

std::string stats_to_json(const SimStats& stats);

}  // namespace minechain
