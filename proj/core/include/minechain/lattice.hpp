#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace minechain {

using BigInt = boost::multiprecision::cpp_int;

// ln of a positive big integer (top-bits extraction; relative error ~1e-16).
// Returns -inf for zero.
double log_big(const BigInt& v);

BigInt binomial(int n, int k);  // 0 outside 0 <= k <= n

struct PathCount {
  BigInt value;
  double log_value;  // ln(value)
};

PathCount make_path_count(BigInt v);

// Exact number of monotone right/up lattice paths from (from_l1, from_l2) to
// (to_l1, to_l2) with every visited state inside the band 0 <= l2-l1 <= g.
// Endpoints must lie in the band themselves.
PathCount count_paths_dp(int from_l1, int from_l2, int to_l1, int to_l2, int g);

// Interior path counts N(0,0), N(0,s) into the corner (d,d) of the depth-d
// constant-gap band, by the alternating reflection sums. Gated against
// count_paths_dp in the test suite.
struct ConstantGapCounts {
  PathCount n00;  // from (0,0)
  PathCount n0s;  // from (0,s)
};
ConstantGapCounts count_constant_gap(int d, int g, int s);

// Band path count L(l, l+m) from the origin via the spectral (trig) sum.
// The float evaluation is rounded to the nearest integer when it is within
// 1e-6 of one; otherwise the value silently comes from the exact DP and
// used_fallback is set (for 2l+m large the sum exceeds what a double can
// resolve to +-1e-6, which is a representation limit, not a formula defect).
struct BandPathCount {
  PathCount count;
  double trig_value;
  bool used_fallback;
};
BandPathCount count_band_paths(int l, int m, int g);

}  // namespace minechain
