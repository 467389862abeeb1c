#pragma once

#include <string>
#include <vector>

#include "minechain/chain.hpp"

namespace minechain {

// Per-state expected round-ending reward rates:
//   r1[m] = p1 * (l1+1-s2) on boundary1, else 0;
//   r2[m] = p2 * (l2+1-s1) on boundary2, else 0.
struct RewardVectors {
  std::vector<double> r1, r2;
};
RewardVectors reward_vectors(const MiningChain& chain);

struct PayoffReport {
  double rho1 = 0, rho2 = 0;  // validated blocks per turn
  double h = 0;               // rho1 + rho2
  double share1 = 0, share2 = 0;    // G_i = rho_i / h
  double revenue1 = 0, revenue2 = 0;  // R_i = rho_i - c_i * tau_bar * h
  double c1 = 0, c2 = 0;      // cost rates, units per minute
  double tau_bar = 0;         // minutes per validated block
  double tau_turn = 0;        // average turn duration, h * tau_bar
};

// Asymptotic payoffs from a stationary distribution. Throws
// std::runtime_error if the total validation rate h is not positive.
PayoffReport evaluate(const MiningChain& chain, const Distribution& pi,
                      double c1, double c2, double tau_bar);

// The reference cost model: mining cost proportional to hash share.
inline double default_cost(double p) { return 0.005 * p; }

std::string report_to_json(const PayoffReport& report);

// CSV keyed by game parameters; g and s are blank for non-constant-gap rows.
struct ReportKey {
  double p1 = 0;
  int g = -1, s = -1, d = 0;
};
std::string report_csv_header();
std::string report_csv_row(const ReportKey& key, const PayoffReport& report);

}  // namespace minechain
