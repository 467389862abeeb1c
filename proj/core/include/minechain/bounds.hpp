#pragma once

#include <cstdint>
#include <string>

namespace minechain {

// Coupling bound on the mixing time of a gap-bounded policy chain:
//   ceil(ln eps / ln(1 - p1^(gbar+1))) * (gbar + 1).
std::uint64_t mixing_upper_bound(double p1, int gbar, double eps);

// Least p1 whose bound stays within T turns:
//   (1 - eps^((gbar+1)/(T-(gbar+1))))^(1/(gbar+1)).  Requires T > gbar+1.
double min_power_rapid_mixing(double eps, double T, int gbar);

// Largest gbar whose bound stays within T turns (increasing scan; 0 if even
// gbar = 0 misses). Scan stops at scan_cap.
int max_gap_rapid_mixing(double eps, double T, double p1,
                         int scan_cap = 1000000);

// Bounds on the expected number of rounds E(R) until a round reaches (d,d),
// in natural log space (d = 100 overflows doubles):
//   ln_lower = ln N(0,s) + 2s ln p2 - 2 ln N(0,0) - d ln p1 - d ln p2
//   ln_upper = ln N(0,0) - 2 ln N(0,s) - d ln p1 - (d+s) ln p2
// The two coincide at s = 0 (E(R) = 1/(N(0,0) p1^d p2^d) exactly).
struct RoundsBounds {
  double ln_lower = 0, ln_upper = 0;
};
RoundsBounds expected_rounds_bounds(int d, int g, int s, double p1);

// ln of the p1-independent floor of the lower bound (attained at
// p1 = d/(2(d-s))). Requires s < d/2.
double expected_rounds_minimax_lower(int d, int g, int s);

enum class SafetyLabel : std::uint8_t { Safe, Unsafe, Undetermined };
const char* to_string(SafetyLabel label);

struct SafetyVerdict {
  int d = 0, g = 0, s = 0;
  double p1 = 0;
  double horizon = 0;        // T, in turns
  double ln_er_lower = 0, ln_er_upper = 0;  // bounds on E(R)
  double ln_t_lower = 0;     // ln bound on T(d,d): equals ln_er_lower
  double ln_t_upper = 0;     // ln(2d) + ln_er_upper
  SafetyLabel label = SafetyLabel::Undetermined;
};

// Safe when even the round count provably exceeds the horizon
// (ln_er_lower >= ln T, since a round costs at least one turn); Unsafe when
// the expected round count provably falls inside it (ln_er_upper < ln T, the
// published methodology of the unsafe-strategy tables); else Undetermined.
SafetyVerdict classify_safety(int d, int g, int s, double p1, double horizon);

std::string safety_csv_header();
std::string safety_csv_row(const SafetyVerdict& verdict);

}  // namespace minechain
