#include "minechain/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "minechain/format.hpp"
#include "minechain/lattice.hpp"

namespace minechain {

std::uint64_t mixing_upper_bound(double p1, int gbar, double eps) {
  if (!(p1 > 0.0 && p1 < 1.0)) throw std::invalid_argument("p1 must lie in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (gbar < 0) throw std::invalid_argument("gbar must be nonnegative");
  double q = std::pow(p1, gbar + 1);  // per-window coupling probability
  double blocks = std::ceil(std::log(eps) / std::log1p(-q));
  double total = blocks * (gbar + 1);
  if (!(total < 9.2e18))  // saturate instead of overflowing the cast
    return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(blocks) *
         static_cast<std::uint64_t>(gbar + 1);
}

double min_power_rapid_mixing(double eps, double T, int gbar) {
  if (!(T > gbar + 1))
    throw std::invalid_argument("horizon must exceed one window");
  double w = gbar + 1;
  return std::pow(1.0 - std::pow(eps, w / (T - w)), 1.0 / w);
}

int max_gap_rapid_mixing(double eps, double T, double p1, int scan_cap) {
  int best = 0;
  for (int gbar = 0; gbar <= scan_cap; ++gbar) {
    if (static_cast<double>(mixing_upper_bound(p1, gbar, eps)) > T)
      break;  // the bound is increasing in gbar
    best = gbar;
  }
  return best;
}

RoundsBounds expected_rounds_bounds(int d, int g, int s, double p1) {
  if (!(p1 > 0.0 && p1 < 1.0)) throw std::invalid_argument("p1 must lie in (0,1)");
  ConstantGapCounts counts = count_constant_gap(d, g, s);
  double p2 = 1.0 - p1;
  double ln_n00 = counts.n00.log_value;
  double ln_n0s = counts.n0s.log_value;
  RoundsBounds b;
  b.ln_lower = ln_n0s + 2.0 * s * std::log(p2) - 2.0 * ln_n00 -
               d * std::log(p1) - d * std::log(p2);
  b.ln_upper = ln_n00 - 2.0 * ln_n0s - d * std::log(p1) -
               (d + s) * std::log(p2);
  return b;
}

double expected_rounds_minimax_lower(int d, int g, int s) {
  if (!(2 * s < d))
    throw std::invalid_argument("minimax floor needs s < d/2");
  ConstantGapCounts counts = count_constant_gap(d, g, s);
  double ds = d - s;
  return counts.n0s.log_value - 2.0 * counts.n00.log_value +
         ds * std::log(4.0) + 2.0 * ds * std::log(ds) - d * std::log(double(d)) -
         (d - 2.0 * s) * std::log(d - 2.0 * s);
}

const char* to_string(SafetyLabel label) {
  switch (label) {
    case SafetyLabel::Safe: return "safe";
    case SafetyLabel::Unsafe: return "unsafe";
    case SafetyLabel::Undetermined: return "undetermined";
  }
  return "?";
}

SafetyVerdict classify_safety(int d, int g, int s, double p1, double horizon) {
  if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
  RoundsBounds b = expected_rounds_bounds(d, g, s, p1);
  SafetyVerdict v;
  v.d = d;
  v.g = g;
  v.s = s;
  v.p1 = p1;
  v.horizon = horizon;
  v.ln_er_lower = b.ln_lower;
  v.ln_er_upper = b.ln_upper;
  v.ln_t_lower = b.ln_lower;  // each round costs at least one turn
  v.ln_t_upper = std::log(2.0 * d) + b.ln_upper;
  double ln_T = std::log(horizon);
  if (b.ln_lower >= ln_T)
    v.label = SafetyLabel::Safe;
  else if (b.ln_upper < ln_T)
    v.label = SafetyLabel::Unsafe;
  else
    v.label = SafetyLabel::Undetermined;
  return v;
}

std::string safety_csv_header() {
  return "d,g,s,p1,horizon,ln_er_lower,ln_er_upper,label";
}

std::string safety_csv_row(const SafetyVerdict& v) {
  std::string row = std::to_string(v.d);
  row += ',';
  row += std::to_string(v.g);
  row += ',';
  row += std::to_string(v.s);
  row += ',';
  row += fmt_g12(v.p1);
  row += ',';
  row += fmt_g12(v.horizon);
  row += ',';
  row += fmt_g12(v.ln_er_lower);
  row += ',';
  row += fmt_g12(v.ln_er_upper);
  row += ',';
  row += to_string(v.label);
  return row;
}

}  // namespace minechain
