#include "minechain/policy.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace minechain {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Decision CapitulationPolicy::decide(int l1, int l2) const {
  if (!in_domain(l1, l2))
    throw std::out_of_range("state (" + std::to_string(l1) + "," +
                            std::to_string(l2) + ") outside policy domain");
  switch (kind) {
    case PolicyKind::ConstantGap:
      return l2 - l1 >= g ? Decision::CapitulateIfLose : Decision::Continue;
    case PolicyKind::Frontier:
      if (player == 2)
        return l1 >= l2 ? Decision::CapitulateIfLose : Decision::Continue;
      return l2 >= l1 ? Decision::CapitulateIfLose : Decision::Continue;
    case PolicyKind::SlowMixing:
      return l2 == d ? Decision::CapitulateIfLose : Decision::Continue;
    case PolicyKind::Table:
      return table[static_cast<std::size_t>(l1) * (d + 1) + l2];
  }
  throw std::logic_error("bad policy kind");
}

CapitulationPolicy make_constant_gap(int g, int s, int d) {
  require(g >= 1, "constant gap needs g >= 1");
  require(s >= 0 && s <= g, "constant gap needs 0 <= s <= g");
  require(d == kUnboundedDepth || (d >= 1 && g <= d && s <= d),
          "constant gap needs g <= d");
  CapitulationPolicy p;
  p.kind = PolicyKind::ConstantGap;
  p.g = g;
  p.s = s;
  p.d = d;
  return p;
}

CapitulationPolicy make_frontier(int d, int player) {
  require(player == 1 || player == 2, "frontier player must be 1 or 2");
  require(d == kUnboundedDepth || d >= 0, "bad depth");
  CapitulationPolicy p;
  p.kind = PolicyKind::Frontier;
  p.s = 0;
  p.d = d;
  p.player = player;
  return p;
}

CapitulationPolicy make_slow_mixing(int d) {
  require(d >= 1, "slow-mixing policy needs d >= 1");
  CapitulationPolicy p;
  p.kind = PolicyKind::SlowMixing;
  p.s = d;
  p.d = d;
  return p;
}

CapitulationPolicy make_table_policy(std::vector<Decision> table, int d,
                                     int s) {
  require(d >= 0, "table policy needs d >= 0");
  require(static_cast<int>(table.size()) == (d + 1) * (d + 1),
          "table must be (d+1)^2 entries");
  require(s >= 0 && s <= d, "table policy needs 0 <= s <= d");
  CapitulationPolicy p;
  p.kind = PolicyKind::Table;
  p.s = s;
  p.d = d;
  p.table = std::move(table);
  return p;
}

namespace {

// Rationality in the policy-1 orientation: scanning a row upward in l2, a
// Continue after a CapitulateIfLose breaks Eq-(2) monotonicity. swap_coords
// checks the mirrored (policy-2) orientation.
void check_rational(const CapitulationPolicy& pol, int depth, bool swap_coords,
                    std::vector<PolicyViolation>& out) {
  for (int a = 0; a <= depth; ++a) {
    bool seen_cap = false;
    for (int b = 0; b <= depth; ++b) {
      int l1 = swap_coords ? b : a;
      int l2 = swap_coords ? a : b;
      Decision dec = pol.decide(l1, l2);
      if (dec == Decision::CapitulateIfLose) {
        seen_cap = true;
      } else if (seen_cap) {
        out.push_back({l1, l2, "continue above a capitulation state"});
        break;  // one violation per row
      }
    }
  }
}

}  // namespace

std::vector<PolicyViolation> validate(const CapitulationPolicy& policy1,
                                      const CapitulationPolicy& policy2,
                                      int probe_depth) {
  int depth = probe_depth;
  if (depth < 0) {
    if (!policy1.unbounded())
      depth = policy1.d;
    else if (!policy2.unbounded())
      depth = policy2.d;
    else
      depth = 128;
  }
  if (!policy1.unbounded()) depth = std::min(depth, policy1.d);
  if (!policy2.unbounded()) depth = std::min(depth, policy2.d);

  std::vector<PolicyViolation> out;
  check_rational(policy1, depth, false, out);
  check_rational(policy2, depth, true, out);

  // Reachability closure under truncated-game dynamics, then the positive
  // round reward check at capitulation states: l_{-i} + 1 > s_i.
  using Cell = std::pair<int, int>;
  int s1 = policy1.s, s2 = policy2.s;
  if (s1 > depth || s2 > depth) {
    out.push_back({0, 0, "restart depth exceeds probe depth"});
    return out;
  }
  std::set<Cell> seen;
  std::deque<Cell> work{{s2, 0}, {0, s1}};
  while (!work.empty()) {
    auto [l1, l2] = work.front();
    work.pop_front();
    if (!seen.insert({l1, l2}).second) continue;
    bool cap2 = policy2.decide(l1, l2) == Decision::CapitulateIfLose;
    bool cap1 = policy1.decide(l1, l2) == Decision::CapitulateIfLose;
    if ((cap2 || l1 + 1 > depth) && l1 + 1 - s2 <= 0)
      out.push_back({l1, l2, "player 2 capitulation yields nonpositive reward"});
    if ((cap1 || l2 + 1 > depth) && l2 + 1 - s1 <= 0)
      out.push_back({l1, l2, "player 1 capitulation yields nonpositive reward"});
    work.push_back(cap2 || l1 + 1 > depth ? Cell{s2, 0} : Cell{l1 + 1, l2});
    work.push_back(cap1 || l2 + 1 > depth ? Cell{0, s1} : Cell{l1, l2 + 1});
  }
  return out;
}

GapProfile gap_profile(const CapitulationPolicy& policy,
                       const CapitulationPolicy& opponent, double p1) {
  (void)p1;  // reachability does not depend on the win probability
  require(!policy.unbounded() || !opponent.unbounded(),
          "gap_profile needs a bounded depth");
  int depth = policy.unbounded() ? opponent.d : policy.d;
  if (!opponent.unbounded()) depth = std::min(depth, opponent.d);

  GapProfile prof;
  prof.per_row.assign(depth + 1, -1);
  for (int l1 = 0; l1 <= depth; ++l1) {
    for (int l2 = depth; l2 >= 0; --l2) {
      if (policy.decide(l1, l2) == Decision::Continue) {
        prof.per_row[l1] = std::max(l2 - l1, -1);
        break;
      }
    }
  }

  // Max gap over the truncated-game closure.
  using Cell = std::pair<int, int>;
  int s1 = policy.s, s2 = opponent.s;
  require(s1 <= depth && s2 <= depth, "restart depth exceeds policy depth");
  std::set<Cell> seen;
  std::deque<Cell> work{{s2, 0}, {0, s1}};
  int max_gap = 0;
  while (!work.empty()) {
    auto [l1, l2] = work.front();
    work.pop_front();
    if (!seen.insert({l1, l2}).second) continue;
    max_gap = std::max(max_gap, l2 - l1);
    bool cap2 = opponent.decide(l1, l2) == Decision::CapitulateIfLose;
    bool cap1 = policy.decide(l1, l2) == Decision::CapitulateIfLose;
    work.push_back(cap2 || l1 + 1 > depth ? Cell{s2, 0} : Cell{l1 + 1, l2});
    work.push_back(cap1 || l2 + 1 > depth ? Cell{0, s1} : Cell{l1, l2 + 1});
  }
  prof.max_gap = max_gap;
  return prof;
}

std::string policy_to_json(const CapitulationPolicy& policy) {
  nlohmann::json j;
  switch (policy.kind) {
    case PolicyKind::ConstantGap:
      j["kind"] = "constant_gap";
      j["g"] = policy.g;
      break;
    case PolicyKind::Frontier:
      j["kind"] = "frontier";
      j["player"] = policy.player;
      break;
    case PolicyKind::SlowMixing:
      j["kind"] = "slow_mixing";
      break;
    case PolicyKind::Table: {
      j["kind"] = "table";
      nlohmann::json rows = nlohmann::json::array();
      for (int l1 = 0; l1 <= policy.d; ++l1) {
        std::string row(policy.d + 1, '0');
        for (int l2 = 0; l2 <= policy.d; ++l2)
          if (policy.table[static_cast<std::size_t>(l1) * (policy.d + 1) +
                           l2] == Decision::CapitulateIfLose)
            row[l2] = '1';
        rows.push_back(row);
      }
      j["table"] = rows;
      break;
    }
  }
  j["s"] = policy.s;
  if (policy.unbounded())
    j["d"] = "unbounded";
  else
    j["d"] = policy.d;
  return j.dump();
}

CapitulationPolicy policy_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  int d = kUnboundedDepth;
  if (j.contains("d") && !j["d"].is_string()) d = j["d"].get<int>();
  int s = j.value("s", 0);
  if (kind == "constant_gap") return make_constant_gap(j.at("g").get<int>(), s, d);
  if (kind == "frontier") return make_frontier(d, j.value("player", 2));
  if (kind == "slow_mixing") return make_slow_mixing(d);
  if (kind == "table") {
    auto rows = j.at("table").get<std::vector<std::string>>();
    int dd = static_cast<int>(rows.size()) - 1;
    std::vector<Decision> table;
    table.reserve(static_cast<std::size_t>(dd + 1) * (dd + 1));
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != dd + 1)
        throw std::invalid_argument("ragged policy table");
      for (char c : row)
        table.push_back(c == '1' ? Decision::CapitulateIfLose
                                 : Decision::Continue);
    }
    return make_table_policy(std::move(table), dd, s);
  }
  throw std::invalid_argument("unknown policy kind: " + kind);
}

}  // namespace minechain
