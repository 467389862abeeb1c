#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "minechain/policy.hpp"

#include <stdexcept>

using namespace minechain;

TEST_CASE("constant-gap capitulates exactly when the deficit reaches g") {
  CapitulationPolicy pol = make_constant_gap(2, 1);
  CHECK(pol.decide(0, 2) == Decision::CapitulateIfLose);
  CHECK(pol.decide(0, 1) == Decision::Continue);
  CHECK(pol.decide(3, 5) == Decision::CapitulateIfLose);
  CHECK(pol.decide(5, 3) == Decision::Continue);  // ahead: keeps mining
  CHECK(pol.s == 1);
  CHECK(pol.unbounded());
}

TEST_CASE("constant-gap rejects bad parameters") {
  CHECK_THROWS_AS(make_constant_gap(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_constant_gap(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_constant_gap(2, -1), std::invalid_argument);
  CHECK_THROWS_AS(make_constant_gap(5, 0, 4), std::invalid_argument);
}

TEST_CASE("frontier orientation") {
  CapitulationPolicy honest2 = make_frontier();  // player 2 default
  CHECK(honest2.decide(3, 3) == Decision::CapitulateIfLose);
  CHECK(honest2.decide(2, 3) == Decision::Continue);
  CHECK(honest2.decide(4, 3) == Decision::CapitulateIfLose);
  CHECK(honest2.s == 0);

  CapitulationPolicy honest1 = make_frontier(kUnboundedDepth, 1);
  CHECK(honest1.decide(3, 3) == Decision::CapitulateIfLose);
  CHECK(honest1.decide(3, 2) == Decision::Continue);
  CHECK(honest1.decide(2, 3) == Decision::CapitulateIfLose);

  CHECK_THROWS_AS(make_frontier(kUnboundedDepth, 3), std::invalid_argument);
}

TEST_CASE("slow-mixing policy holds out until the opponent hits d") {
  CapitulationPolicy pol = make_slow_mixing(4);
  CHECK(pol.s == 4);
  CHECK(pol.d == 4);
  CHECK(pol.decide(0, 4) == Decision::CapitulateIfLose);
  CHECK(pol.decide(2, 4) == Decision::CapitulateIfLose);
  CHECK(pol.decide(0, 3) == Decision::Continue);
  CHECK(pol.decide(3, 2) == Decision::Continue);
  CHECK_THROWS_AS(pol.decide(0, 5), std::out_of_range);
  CHECK_THROWS_AS(make_slow_mixing(0), std::invalid_argument);
}

TEST_CASE("table policies are row-major over the bounded square") {
  // d = 1: entries (0,0),(0,1),(1,0),(1,1)
  std::vector<Decision> t = {Decision::Continue, Decision::CapitulateIfLose,
                             Decision::Continue, Decision::CapitulateIfLose};
  CapitulationPolicy pol = make_table_policy(t, 1, 0);
  CHECK(pol.decide(0, 0) == Decision::Continue);
  CHECK(pol.decide(0, 1) == Decision::CapitulateIfLose);
  CHECK(pol.decide(1, 0) == Decision::Continue);
  CHECK(pol.decide(1, 1) == Decision::CapitulateIfLose);
  CHECK_THROWS_AS(pol.decide(2, 0), std::out_of_range);
  CHECK_THROWS_AS(make_table_policy(t, 2, 0), std::invalid_argument);
}

TEST_CASE("bounded domains reject out-of-range queries") {
  CapitulationPolicy pol = make_constant_gap(2, 0, 6);
  CHECK(pol.in_domain(6, 6));
  CHECK_FALSE(pol.in_domain(7, 0));
  CHECK_THROWS_AS(pol.decide(7, 0), std::out_of_range);
  CHECK_THROWS_AS(pol.decide(-1, 0), std::out_of_range);
}

TEST_CASE("honest pairings validate cleanly") {
  CHECK(validate(make_frontier(kUnboundedDepth, 1), make_frontier()).empty());
  CHECK(validate(make_constant_gap(2, 1), make_frontier()).empty());
  CHECK(validate(make_slow_mixing(5), make_frontier(5)).empty());
}

TEST_CASE("a capitulation hole below a continue is flagged as irrational") {
  // Row l1 = 0 capitulates at l2 = 1 but keeps mining at l2 = 2.
  std::vector<Decision> t(9, Decision::Continue);
  t[0 * 3 + 1] = Decision::CapitulateIfLose;
  CapitulationPolicy pol = make_table_policy(t, 2, 0);
  auto violations = validate(pol, make_frontier());
  REQUIRE_FALSE(violations.empty());
  CHECK(violations[0].l1 == 0);
}

TEST_CASE("the mirrored rationality check covers player 2") {
  // As a player-2 rule, constant-gap capitulates when ahead, which stops
  // being monotone in l1: continue at (1,1) but capitulate at (0,1).
  auto violations = validate(make_frontier(kUnboundedDepth, 1),
                             make_constant_gap(1, 0));
  CHECK_FALSE(violations.empty());
}

TEST_CASE("restarts that wipe out the round reward are flagged") {
  // All-capitulate with s = 2: capitulating at (0,0) would hand the winner
  // 0+1-2 < 0 blocks.
  std::vector<Decision> t(9, Decision::CapitulateIfLose);
  CapitulationPolicy pol = make_table_policy(t, 2, 2);
  auto violations = validate(pol, make_frontier());
  CHECK_FALSE(violations.empty());
}

TEST_CASE("gap profile reports per-row tolerances and the reachable maximum") {
  GapProfile prof =
      gap_profile(make_constant_gap(3, 0, 12), make_frontier(12), 0.5);
  REQUIRE(prof.per_row.size() == 13);
  CHECK(prof.per_row[0] == 2);   // continues while l2 - l1 <= 2
  CHECK(prof.per_row[10] == 2);
  CHECK(prof.per_row[11] == 1);  // clipped by the domain edge
  CHECK(prof.per_row[12] == 0);
  CHECK(prof.max_gap == 3);      // (0,3) is reached before the first restart
}

TEST_CASE("gap profile of a player-1 frontier is degenerate") {
  GapProfile prof =
      gap_profile(make_frontier(5, 1), make_frontier(5, 2), 0.5);
  REQUIRE(prof.per_row.size() == 6);
  CHECK(prof.per_row[0] == -1);  // row 0 never continues
  CHECK(prof.per_row[3] == -1);  // continue only strictly ahead: l2-l1 < 0
  CHECK(prof.max_gap == 0);      // mutual frontier pins play to (0,0)
}

TEST_CASE("policies survive a JSON round trip") {
  for (const CapitulationPolicy& pol :
       {make_constant_gap(4, 2), make_constant_gap(3, 1, 20), make_frontier(),
        make_frontier(9, 1), make_slow_mixing(6),
        make_table_policy({Decision::Continue, Decision::CapitulateIfLose,
                           Decision::Continue, Decision::CapitulateIfLose},
                          1, 0)}) {
    CapitulationPolicy back = policy_from_json(policy_to_json(pol));
    CHECK(back == pol);
  }
}

TEST_CASE("malformed policy JSON is rejected") {
  CHECK_THROWS(policy_from_json("{\"kind\":\"nonsense\",\"s\":0}"));
  CHECK_THROWS(policy_from_json("not json"));
}
