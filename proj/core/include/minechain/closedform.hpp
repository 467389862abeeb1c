#pragma once

#include <string>
#include <vector>

namespace minechain {

// Closed forms for the constant-gap(g, s=0) strategy against Frontier in the
// deep-truncation limit. Every trig sum is evaluated twice (Kahan-compensated
// double and long double); points whose evaluations disagree beyond 1e-9
// relative are flagged.

// Normalization constant Gamma; pi(0,0) = ((2/(g+2)) * Gamma)^-1.
double gamma_const_gap(int g, double p1);
double stationary_origin_const_gap(int g, double p1);

struct RhoPair {
  double rho1 = 0, rho2 = 0;
};
RhoPair rho_const_gap(int g, double p1);

struct CurvePoint {
  int g = 0;  // 0 encodes the mutual-Frontier baseline row
  double p1 = 0;
  double rho1 = 0, rho2 = 0, h = 0;
  double share1 = 0, share2 = 0;
  double revenue1 = 0, revenue2 = 0;
  bool precision_flag = false;
};

// Sweep of the closed forms over g values and a p1 grid under the linear cost
// model c_i = cost_rate * p_i. A g = 0 baseline row (exact: rho_i = p_i,
// h = 1) is emitted for every p1 ahead of the requested g values.
std::vector<CurvePoint> market_share_curve(const std::vector<int>& gs,
                                           const std::vector<double>& p1s,
                                           double cost_rate = 0.005,
                                           double tau_bar = 10.0);

std::string curve_csv_header();
std::string curve_csv_row(const CurvePoint& point);

}  // namespace minechain
