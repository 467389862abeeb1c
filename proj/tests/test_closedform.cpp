#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "minechain/closedform.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "minechain/chain.hpp"
#include "minechain/payoff.hpp"

using namespace minechain;

// Independent g = 1 reduction: with states (l,l) and (l,l+1) the balance
// equations telescope to
//   Gamma(1,p)  = (3/2)(1+p2)/(1-p1 p2)
//   rho2(1,p)   = p2^2 (2-p1 p2) / ((1-p1 p2)(1+p2))
// which pin p = 1/2 to Gamma = 3, rho1 = 4/9, rho2 = 7/18.

TEST_CASE("gap-1 normalization constant") {
  CHECK(gamma_const_gap(1, 0.5) == doctest::Approx(3.0).epsilon(1e-12));
  for (int i = 1; i <= 19; ++i) {
    double p1 = i / 20.0, p2 = 1 - p1;
    double expect = 1.5 * (1 + p2) / (1 - p1 * p2);
    CHECK(gamma_const_gap(1, p1) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gamma_const_gap(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_const_gap(1, 1.0), std::invalid_argument);
}

TEST_CASE("gap-1 payoff rates") {
  RhoPair r = rho_const_gap(1, 0.5);
  CHECK(r.rho1 == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(r.rho2 == doctest::Approx(7.0 / 18).epsilon(1e-12));
  for (int i = 1; i <= 19; ++i) {
    double p1 = i / 20.0, p2 = 1 - p1;
    double expect2 =
        p2 * p2 * (2 - p1 * p2) / ((1 - p1 * p2) * (1 + p2));
    CHECK(rho_const_gap(1, p1).rho2 ==
          doctest::Approx(expect2).epsilon(1e-11));
  }
}

TEST_CASE("origin occupancy inverts the normalization constant") {
  CHECK(stationary_origin_const_gap(1, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
  for (int g = 1; g <= 8; ++g)
    for (double p1 : {0.2, 0.5, 0.8}) {
      double pi00 = stationary_origin_const_gap(g, p1);
      CHECK(pi00 > 0.0);
      CHECK(pi00 < 1.0);
      CHECK(pi00 * (2.0 / (g + 2)) * gamma_const_gap(g, p1) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("closed forms track the deep truncated chain") {
  for (auto [g, p1] : std::vector<std::pair<int, double>>{
           {2, 0.35}, {4, 0.55}, {7, 0.5}}) {
    RhoPair closed = rho_const_gap(g, p1);
    MiningChain chain =
        build_chain(make_constant_gap(g, 0), make_frontier(), p1, 200);
    PayoffReport rep = evaluate(chain, stationary(chain), 0.0, 0.0, 10.0);
    CHECK(rep.rho1 == doctest::Approx(closed.rho1).epsilon(1e-7));
    CHECK(rep.rho2 == doctest::Approx(closed.rho2).epsilon(1e-7));
    double pi00 = stationary(chain).p[chain.id_of(State{0, 0})];
    CHECK(pi00 ==
          doctest::Approx(stationary_origin_const_gap(g, p1)).epsilon(1e-7));
  }
}

TEST_CASE("market-share sweep structure and baselines") {
  std::vector<int> gs = {1, 3};
  std::vector<double> p1s;
  for (int i = 1; i <= 9; ++i) p1s.push_back(i / 10.0);
  auto curve = market_share_curve(gs, p1s);
  REQUIRE(curve.size() == p1s.size() * (gs.size() + 1));
  for (std::size_t i = 0; i < p1s.size(); ++i) {
    const CurvePoint& base = curve[i * 3];
    CHECK(base.g == 0);
    CHECK(base.p1 == p1s[i]);
    CHECK(base.rho1 == base.p1);
    CHECK(base.h == 1.0);
    CHECK(base.share1 == base.p1);
    CHECK(base.revenue1 == doctest::Approx(0.95 * base.p1).epsilon(1e-15));
    CHECK(curve[i * 3 + 1].g == 1);
    CHECK(curve[i * 3 + 2].g == 3);
    CHECK(curve[i * 3 + 1].p1 == p1s[i]);
    for (int off = 0; off < 3; ++off) {
      const CurvePoint& pt = curve[i * 3 + off];
      CHECK(pt.share1 + pt.share2 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(pt.h > 0.0);
      CHECK(pt.h <= 1.0 + 1e-12);
      CHECK_FALSE(pt.precision_flag);
      // Revenue definition R_i = rho_i - c_i tau h with c_i = 0.005 p_i.
      CHECK(pt.revenue1 ==
            doctest::Approx(pt.rho1 - 0.005 * pt.p1 * 10 * pt.h)
                .epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(market_share_curve({0}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(market_share_curve({2}, {1.5}), std::invalid_argument);
}

TEST_CASE("curve CSV carries the precision flag") {
  CHECK(curve_csv_header() ==
        "g,p1,rho1,rho2,h,share1,share2,revenue1,revenue2,precision_flag");
  auto curve = market_share_curve({1}, {0.5});
  std::string row = curve_csv_row(curve[1]);
  CHECK(row.find("1,0.5,") == 0);
  CHECK(row.rfind(",0") == row.size() - 2);
}
