#include "minechain/payoff.hpp"

#include <stdexcept>

#include <json.hpp>

#include "minechain/format.hpp"

namespace minechain {

RewardVectors reward_vectors(const MiningChain& chain) {
  RewardVectors rv;
  rv.r1.assign(chain.states.size(), 0.0);
  rv.r2.assign(chain.states.size(), 0.0);
  for (int m : chain.boundary1) rv.r1[m] = chain.p1 * chain.step[m][0].r1;
  for (int m : chain.boundary2) rv.r2[m] = chain.p2 * chain.step[m][1].r2;
  return rv;
}

PayoffReport evaluate(const MiningChain& chain, const Distribution& pi,
                      double c1, double c2, double tau_bar) {
  if (pi.p.size() != chain.states.size())
    throw std::invalid_argument("distribution size does not match the chain");
  RewardVectors rv = reward_vectors(chain);
  PayoffReport rep;
  for (std::size_t m = 0; m < pi.p.size(); ++m) {
    rep.rho1 += pi.p[m] * rv.r1[m];
    rep.rho2 += pi.p[m] * rv.r2[m];
  }
  rep.h = rep.rho1 + rep.rho2;
  if (!(rep.h > 0))
    throw std::runtime_error("validation rate is not positive");
  rep.share1 = rep.rho1 / rep.h;
  rep.share2 = rep.rho2 / rep.h;
  rep.c1 = c1;
  rep.c2 = c2;
  rep.tau_bar = tau_bar;
  rep.tau_turn = rep.h * tau_bar;
  rep.revenue1 = rep.rho1 - c1 * tau_bar * rep.h;
  rep.revenue2 = rep.rho2 - c2 * tau_bar * rep.h;
  return rep;
}

std::string report_to_json(const PayoffReport& report) {
  nlohmann::json j;
  j["rho1"] = report.rho1;
  j["rho2"] = report.rho2;
  j["h"] = report.h;
  j["share1"] = report.share1;
  j["share2"] = report.share2;
  j["revenue1"] = report.revenue1;
  j["revenue2"] = report.revenue2;
  j["c1"] = report.c1;
  j["c2"] = report.c2;
  j["tau_bar"] = report.tau_bar;
  j["tau_turn"] = report.tau_turn;
  return j.dump();
}

std::string report_csv_header() {
  return "p1,g,s,depth,rho1,rho2,h,share1,share2,revenue1,revenue2,tau_turn";
}

std::string report_csv_row(const ReportKey& key, const PayoffReport& report) {
  std::string row = fmt_g12(key.p1);
  row += ',';
  if (key.g >= 0) row += std::to_string(key.g);
  row += ',';
  if (key.s >= 0) row += std::to_string(key.s);
  row += ',';
  row += std::to_string(key.d);
  for (double v : {report.rho1, report.rho2, report.h, report.share1,
                   report.share2, report.revenue1, report.revenue2,
                   report.tau_turn}) {
    row += ',';
    row += fmt_g12(v);
  }
  return row;
}

}  // namespace minechain
