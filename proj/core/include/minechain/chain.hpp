#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "minechain/policy.hpp"

namespace minechain {

struct State {
  int l1 = 0, l2 = 0;
  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;
};

enum class EdgeKind : std::uint8_t {
  Interior,          // the loser keeps mining its branch
  Capitulation,      // the loser's policy says CapitulateIfLose
  TruncationForced,  // the move would leave [0,depth]^2; truncated-game capitulation
};

// One transition per (state, winner). Rewards are kept per winner even when
// both winners lead to the same successor, so boundary accounting never reads
// merged-edge probabilities.
struct HalfEdge {
  int to = -1;
  double r1 = 0, r2 = 0;
  EdgeKind kind = EdgeKind::Interior;
};

// The two-policy mining game as a finite Markov chain over branch-length
// states (l1, l2), truncated to [0,depth]^2.
struct MiningChain {
  std::vector<State> states;  // lexicographic order
  std::unordered_map<std::uint64_t, int> index;
  std::vector<std::array<HalfEdge, 2>> step;  // [state][winner-1]
  std::vector<int> boundary1, boundary2;      // sorted state ids; see below
  double p1 = 0, p2 = 0;
  int depth = 0;
  int s1 = 0, s2 = 0;
  int start1 = -1;  // id of (s2, 0): entered when player 2 capitulates
  int start2 = -1;  // id of (0, s1): entered when player 1 capitulates
  bool truncation_forced = false;  // some edge is TruncationForced
  CapitulationPolicy policy1, policy2;

  int size() const { return static_cast<int>(states.size()); }
  int id_of(State m) const;  // -1 if absent
  // Row m of the transition matrix as (to, prob) pairs (may merge winners).
  std::array<std::pair<int, double>, 2> row(int m) const;
};

// BFS closure from the two restart states. boundary1 collects states where a
// player-1 win ends the round (player 2 capitulates, by policy or truncation);
// boundary2 mirrors it. Fails (std::invalid_argument / std::runtime_error) on
// validate() violations, depth < max(s1, s2), bounded policies narrower than
// depth, or a closure that is not irreducible.
MiningChain build_chain(const CapitulationPolicy& policy1,
                        const CapitulationPolicy& policy2, double p1,
                        int depth);

struct Distribution {
  std::vector<double> p;
};

// Stationary distribution: solves pi P = pi, sum(pi) = 1 as a sparse linear
// system and verifies the residual ||pi P - pi||_inf <= 1e-10.
Distribution stationary(const MiningChain& chain);

// Least n with max over starts m of ||P^n(m,.) - pi||_TV <= eps. Exact: the
// worst-start TV distance is nonincreasing in n, so the search doubles P^(2^k)
// and then binary-searches on cached squares. Throws std::runtime_error if the
// answer exceeds budget.
std::uint64_t exact_mixing_time(const MiningChain& chain, double eps,
                                std::uint64_t budget = (1ull << 22));

// Worst-start TV distance after each of steps 1..n (literal distribution-
// matrix iteration; small chains only).
std::vector<double> tv_profile(const MiningChain& chain, int n);

// Expected turns to first reach `target` from `from` (absorbing-system solve).
// +inf when the target is not almost-surely reached.
double expected_hitting_time(const MiningChain& chain, State target,
                             State from);

// Expected number of rounds until some round visits (d, d), starting a round
// at (0,0). Requires policy2 to act as Frontier with s2 = 0 and d equal to the
// chain truncation depth (the round decomposition is the truncated game's).
// Computed by within-round reach-probability DP plus a 2x2 restart system.
double exact_rounds_to_hit(const MiningChain& chain, int d);

std::string chain_to_json(const MiningChain& chain);
std::string chain_to_dot(const MiningChain& chain);

}  // namespace minechain
