#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace minechain {

// A player's reaction to losing a mining race at a given branch state.
enum class Decision : std::uint8_t { Continue = 0, CapitulateIfLose = 1 };

enum class PolicyKind : std::uint8_t { ConstantGap, Frontier, SlowMixing, Table };

// Depth sentinel: rule-based policies may be defined on the whole quadrant.
inline constexpr int kUnboundedDepth = -1;

// Capitulation policy (C, s): decide(l1, l2) says whether the owning player
// abandons its branch upon losing the race at state (l1, l2); s is the number
// of opponent blocks left un-surpassed after the restart.
//
// The decide map is shared-state: l1 is always player 1's branch length and
// l2 player 2's, regardless of which player owns the policy.
class CapitulationPolicy {
 public:
  PolicyKind kind = PolicyKind::Frontier;
  int g = -1;       // constant-gap tolerance (ConstantGap only)
  int s = 0;        // restart depth
  int d = kUnboundedDepth;
  int player = 2;   // Frontier orientation: which player mines honestly
  std::vector<Decision> table;  // Table kind, row-major (d+1)x(d+1)

  bool unbounded() const { return d == kUnboundedDepth; }
  bool in_domain(int l1, int l2) const {
    return l1 >= 0 && l2 >= 0 && (unbounded() || (l1 <= d && l2 <= d));
  }
  // Throws std::out_of_range outside the policy domain.
  Decision decide(int l1, int l2) const;

  bool operator==(const CapitulationPolicy&) const = default;
};

// CapitulateIfLose iff l2 - l1 >= g, restart depth s. Requires g >= 1,
// 0 <= s <= g, and g <= d when bounded.
CapitulationPolicy make_constant_gap(int g, int s, int d = kUnboundedDepth);

// The honest strategy: capitulate as soon as not strictly ahead, s = 0.
// player selects the orientation (2 = the standing opponent convention).
CapitulationPolicy make_frontier(int d = kUnboundedDepth, int player = 2);

// Player-1 policy exhibiting exponentially slow mixing: s = d and
// CapitulateIfLose only at l2 = d. Requires d >= 1.
CapitulationPolicy make_slow_mixing(int d);

// Explicit decide table, row-major over [0,d]^2 with d = rows-1.
CapitulationPolicy make_table_policy(std::vector<Decision> table, int d, int s);

struct PolicyViolation {
  int l1, l2;
  std::string what;
};

// Structural checks for a (policy1, policy2) pairing:
//   - rationality in slot orientation: once policy1 continues at (l1, l2) it
//     continues at every l2' <= l2 (mirrored in l1 for policy2);
//   - restart feasibility: at every reachable state where player i
//     capitulates, the winner's round reward l_{-i}+1-s_i stays positive.
// Reachability is probed on [0, D]^2 with D = the bounded policy depth
// (128 when both policies are unbounded) using the truncated-game closure.
std::vector<PolicyViolation> validate(const CapitulationPolicy& policy1,
                                      const CapitulationPolicy& policy2,
                                      int probe_depth = -1);

// Def-style gap tolerances of a player-1 policy.
struct GapProfile {
  std::vector<int> per_row;  // g(l1) = max{l2-l1 : decide==Continue}, -1 if none
  int max_gap = 0;           // max l2-l1 over states reachable against `opponent`
};

GapProfile gap_profile(const CapitulationPolicy& policy,
                       const CapitulationPolicy& opponent, double p1);

// JSON round trip: {"kind": "constant_gap"|"frontier"|"slow_mixing"|"table",
//                   "g"?, "s", "d" (int or "unbounded"), "player"?, "table"?}
std::string policy_to_json(const CapitulationPolicy& policy);
CapitulationPolicy policy_from_json(const std::string& text);

}  // namespace minechain
