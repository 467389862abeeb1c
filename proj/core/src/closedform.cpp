#include "minechain/closedform.hpp"

#include <cmath>
#include <stdexcept>

#include "minechain/format.hpp"

namespace minechain {

namespace {

template <typename Real>
struct KahanSum {
  Real sum = 0, carry = 0;
  void add(Real v) {
    Real y = v - carry;
    Real t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

template <typename Real>
struct TrigEval {
  Real gamma = 0, rho1 = 0, rho2 = 0;
};

// One pass over the spectral decomposition of the in-band walk. The band has
// g+1 interior modes theta_k = pi k / (g+2); every quantity below is a sum
// over those modes. q_k = 1 - 4 p1 p2 cos^2(theta_k) > 0 on p1 in (0,1).
template <typename Real>
TrigEval<Real> trig_eval(int g, Real p1) {
  const Real pi = std::acos(Real(-1));
  Real p2 = 1 - p1;
  Real x = p1 * p2;
  KahanSum<Real> gamma, srho1, srho2;
  for (int k = 1; k <= g + 1; ++k) {
    Real th = pi * k / (g + 2);
    Real c = std::cos(th), s = std::sin(th);
    Real q = 1 - 4 * c * c * x;

    KahanSum<Real> inner;
    Real base = 2 * c * p2;
    Real pw = 1;
    for (int m = 0; m <= g; ++m) {
      inner.add(std::sin((m + 1) * th) * pw);
      pw *= base;
    }
    gamma.add(s * inner.sum / q);

    srho1.add(s * s / (q * q));

    Real pow2c = 1;  // (2 cos theta_k)^g, sign kept exact
    for (int m = 0; m < g; ++m) pow2c *= 2 * c;
    Real sign = (k % 2 == 1) ? Real(1) : Real(-1);
    srho2.add(sign * s * s * pow2c * (g * q + 1) / (q * q));
  }
  TrigEval<Real> out;
  out.gamma = gamma.sum;
  out.rho1 = p1 * srho1.sum / gamma.sum;
  Real p2pow = 1;
  for (int m = 0; m <= g; ++m) p2pow *= p2;
  out.rho2 = p2pow * srho2.sum / gamma.sum;
  return out;
}

void check_args(int g, double p1) {
  if (g < 1) throw std::invalid_argument("gap must be at least 1");
  if (!(p1 > 0.0 && p1 < 1.0))
    throw std::invalid_argument("p1 must lie in (0,1)");
}

bool disagree(double a, long double b) {
  long double scale = std::max<long double>({std::fabs((long double)a),
                                             std::fabs(b), 1e-300L});
  return std::fabs((long double)a - b) / scale > 1e-9L;
}

}  // namespace

double gamma_const_gap(int g, double p1) {
  check_args(g, p1);
  return static_cast<double>(trig_eval<long double>(g, p1).gamma);
}

double stationary_origin_const_gap(int g, double p1) {
  check_args(g, p1);
  long double gamma = trig_eval<long double>(g, p1).gamma;
  return static_cast<double>(1.0L / ((2.0L / (g + 2)) * gamma));
}

RhoPair rho_const_gap(int g, double p1) {
  check_args(g, p1);
  TrigEval<long double> e = trig_eval<long double>(g, p1);
  return {static_cast<double>(e.rho1), static_cast<double>(e.rho2)};
}

std::vector<CurvePoint> market_share_curve(const std::vector<int>& gs,
                                           const std::vector<double>& p1s,
                                           double cost_rate, double tau_bar) {
  for (int g : gs)
    if (g < 1) throw std::invalid_argument("gap values must be at least 1");
  std::vector<CurvePoint> out;
  out.reserve((gs.size() + 1) * p1s.size());
  for (double p1 : p1s) {
    if (!(p1 > 0.0 && p1 < 1.0))
      throw std::invalid_argument("p1 must lie in (0,1)");
    double p2 = 1.0 - p1;
    double drag = cost_rate * tau_bar;  // cost per validated block, per miner

    CurvePoint base;  // both sides race at the frontier: h = 1 exactly
    base.g = 0;
    base.p1 = p1;
    base.rho1 = p1;
    base.rho2 = p2;
    base.h = 1.0;
    base.share1 = p1;
    base.share2 = p2;
    base.revenue1 = p1 * (1.0 - drag);
    base.revenue2 = p2 * (1.0 - drag);
    out.push_back(base);

    for (int g : gs) {
      TrigEval<double> lo = trig_eval<double>(g, p1);
      TrigEval<long double> hi = trig_eval<long double>(g, (long double)p1);
      CurvePoint pt;
      pt.g = g;
      pt.p1 = p1;
      pt.rho1 = static_cast<double>(hi.rho1);
      pt.rho2 = static_cast<double>(hi.rho2);
      pt.h = pt.rho1 + pt.rho2;
      pt.share1 = pt.rho1 / pt.h;
      pt.share2 = pt.rho2 / pt.h;
      pt.revenue1 = pt.rho1 - cost_rate * p1 * tau_bar * pt.h;
      pt.revenue2 = pt.rho2 - cost_rate * p2 * tau_bar * pt.h;
      pt.precision_flag = disagree(lo.rho1, hi.rho1) ||
                          disagree(lo.rho2, hi.rho2) ||
                          disagree(lo.gamma, hi.gamma);
      out.push_back(pt);
    }
  }
  return out;
}

std::string curve_csv_header() {
  return "g,p1,rho1,rho2,h,share1,share2,revenue1,revenue2,precision_flag";
}

std::string curve_csv_row(const CurvePoint& pt) {
  std::string row = std::to_string(pt.g);
  for (double v : {pt.p1, pt.rho1, pt.rho2, pt.h, pt.share1, pt.share2,
                   pt.revenue1, pt.revenue2}) {
    row += ',';
    row += fmt_g12(v);
  }
  row += ',';
  row += pt.precision_flag ? '1' : '0';
  return row;
}

}  // namespace minechain
