#include "minechain/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace minechain {

namespace {

std::uint64_t key_of(State m) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(m.l1)) << 32) |
         static_cast<std::uint32_t>(m.l2);
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Successor of state m when `winner` wins the race, under truncated-game
// dynamics: policy capitulation first, then the depth wall.
HalfEdge successor(const CapitulationPolicy& policy1,
                   const CapitulationPolicy& policy2, State m, int winner,
                   int depth) {
  int s1 = policy1.s, s2 = policy2.s;
  HalfEdge e;
  if (winner == 1) {
    bool cap = policy2.decide(m.l1, m.l2) == Decision::CapitulateIfLose;
    if (cap || m.l1 + 1 > depth) {
      e.kind = cap ? EdgeKind::Capitulation : EdgeKind::TruncationForced;
      e.r1 = m.l1 + 1 - s2;
      e.to = -1;  // (s2, 0), resolved by the caller
    } else {
      e.kind = EdgeKind::Interior;
      e.to = -2;  // (l1+1, l2)
    }
  } else {
    bool cap = policy1.decide(m.l1, m.l2) == Decision::CapitulateIfLose;
    if (cap || m.l2 + 1 > depth) {
      e.kind = cap ? EdgeKind::Capitulation : EdgeKind::TruncationForced;
      e.r2 = m.l2 + 1 - s1;
      e.to = -1;
    } else {
      e.kind = EdgeKind::Interior;
      e.to = -2;
    }
  }
  return e;
}

State successor_state(State m, int winner, const HalfEdge& e, int s1, int s2) {
  if (e.kind == EdgeKind::Interior)
    return winner == 1 ? State{m.l1 + 1, m.l2} : State{m.l1, m.l2 + 1};
  return winner == 1 ? State{s2, 0} : State{0, s1};
}

}  // namespace

int MiningChain::id_of(State m) const {
  auto it = index.find(key_of(m));
  return it == index.end() ? -1 : it->second;
}

std::array<std::pair<int, double>, 2> MiningChain::row(int m) const {
  return {{{step[m][0].to, p1}, {step[m][1].to, p2}}};
}

MiningChain build_chain(const CapitulationPolicy& policy1,
                        const CapitulationPolicy& policy2, double p1,
                        int depth) {
  require(p1 > 0.0 && p1 < 1.0, "p1 must lie in (0,1)");
  require(depth >= 1, "depth must be positive");
  require(policy1.unbounded() || policy1.d >= depth,
          "closure escapes depth: policy 1 domain is narrower than the chain");
  require(policy2.unbounded() || policy2.d >= depth,
          "closure escapes depth: policy 2 domain is narrower than the chain");
  int s1 = policy1.s, s2 = policy2.s;
  require(depth >= std::max(s1, s2), "depth must cover both restart depths");
  auto violations = validate(policy1, policy2, depth);
  if (!violations.empty())
    throw std::invalid_argument(
        "policy validation failed at (" + std::to_string(violations[0].l1) +
        "," + std::to_string(violations[0].l2) + "): " + violations[0].what);

  MiningChain chain;
  chain.p1 = p1;
  chain.p2 = 1.0 - p1;
  chain.depth = depth;
  chain.s1 = s1;
  chain.s2 = s2;
  chain.policy1 = policy1;
  chain.policy2 = policy2;

  // Closure from the two restart states.
  std::deque<State> work{{s2, 0}, {0, s1}};
  std::unordered_map<std::uint64_t, int> seen;
  std::vector<State> found;
  while (!work.empty()) {
    State m = work.front();
    work.pop_front();
    if (!seen.emplace(key_of(m), 0).second) continue;
    found.push_back(m);
    for (int winner : {1, 2}) {
      HalfEdge e = successor(policy1, policy2, m, winner, depth);
      work.push_back(successor_state(m, winner, e, s1, s2));
    }
  }
  std::sort(found.begin(), found.end());
  chain.states = std::move(found);
  for (int i = 0; i < chain.size(); ++i)
    chain.index[key_of(chain.states[i])] = i;
  chain.start1 = chain.id_of({s2, 0});
  chain.start2 = chain.id_of({0, s1});

  chain.step.resize(chain.states.size());
  for (int i = 0; i < chain.size(); ++i) {
    State m = chain.states[i];
    bool b1 = false, b2 = false;
    for (int winner : {1, 2}) {
      HalfEdge e = successor(policy1, policy2, m, winner, depth);
      e.to = chain.id_of(successor_state(m, winner, e, s1, s2));
      chain.step[i][winner - 1] = e;
      if (e.kind != EdgeKind::Interior) {
        chain.truncation_forced |= e.kind == EdgeKind::TruncationForced;
        (winner == 1 ? b1 : b2) = true;
      }
    }
    if (b1) chain.boundary1.push_back(i);
    if (b2) chain.boundary2.push_back(i);
  }

  // Irreducibility: both restart states must be reachable from every state.
  for (int target : {chain.start1, chain.start2}) {
    std::vector<std::vector<int>> rev(chain.size());
    for (int i = 0; i < chain.size(); ++i)
      for (const auto& e : chain.step[i]) rev[e.to].push_back(i);
    std::vector<char> mark(chain.size(), 0);
    std::deque<int> q{target};
    mark[target] = 1;
    int count = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      ++count;
      for (int u : rev[v])
        if (!mark[u]) {
          mark[u] = 1;
          q.push_back(u);
        }
    }
    if (count != chain.size())
      throw std::runtime_error("chain closure is not irreducible");
  }
  return chain;
}

Distribution stationary(const MiningChain& chain) {
  int n = chain.size();
  // (P^T - I) pi = 0 with the last balance row replaced by normalization.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(3 * n));
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < 2; ++w) {
      const auto& e = chain.step[i][w];
      if (e.to != n - 1)
        trip.emplace_back(e.to, i, w == 0 ? chain.p1 : chain.p2);
    }
    if (i != n - 1) trip.emplace_back(i, i, -1.0);
    trip.emplace_back(n - 1, i, 1.0);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("stationary solve failed to factorize");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;
  Eigen::VectorXd pi = lu.solve(b);

  Distribution dist;
  dist.p.assign(pi.data(), pi.data() + n);
  double total = 0;
  for (double& v : dist.p) {
    if (v < 0) {
      if (v < -1e-9) throw std::runtime_error("stationary solve went negative");
      v = 0;
    }
    total += v;
  }
  for (double& v : dist.p) v /= total;

  // Residual ||pi P - pi||_inf.
  std::vector<double> piP(n, 0.0);
  for (int i = 0; i < n; ++i) {
    piP[chain.step[i][0].to] += dist.p[i] * chain.p1;
    piP[chain.step[i][1].to] += dist.p[i] * chain.p2;
  }
  double resid = 0;
  for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(piP[i] - dist.p[i]));
  if (resid > 1e-10)
    throw std::runtime_error("stationary residual " + std::to_string(resid) +
                             " exceeds 1e-10");
  return dist;
}

namespace {

Eigen::MatrixXd dense_transition(const MiningChain& chain) {
  int n = chain.size();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    P(i, chain.step[i][0].to) += chain.p1;
    P(i, chain.step[i][1].to) += chain.p2;
  }
  return P;
}

// Worst-start total variation distance to pi.
double worst_tv(const Eigen::MatrixXd& Q, const std::vector<double>& pi) {
  double worst = 0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    double acc = 0;
    for (Eigen::Index j = 0; j < Q.cols(); ++j)
      acc += std::abs(Q(i, j) - pi[static_cast<std::size_t>(j)]);
    worst = std::max(worst, 0.5 * acc);
  }
  return worst;
}

}  // namespace

std::uint64_t exact_mixing_time(const MiningChain& chain, double eps,
                                std::uint64_t budget) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("eps must lie in (0,1)");
  Distribution pi = stationary(chain);
  int n = chain.size();

  // n = 0 steps: P^0 = I.
  double tv0 = 0;
  for (int i = 0; i < n; ++i) {
    double acc = 1.0 - pi.p[i];
    for (int j = 0; j < n; ++j)
      if (j != i) acc += pi.p[j];
    tv0 = std::max(tv0, 0.5 * acc);
  }
  if (tv0 <= eps) return 0;

  // Worst-start TV is nonincreasing in the step count, so bracket by doubling
  // P^(2^k) and finish with a predecessor walk over the cached squares.
  std::vector<Eigen::MatrixXd> pow2;  // pow2[k] = P^(2^k)
  pow2.push_back(dense_transition(chain));
  while (worst_tv(pow2.back(), pi.p) > eps) {
    std::uint64_t reached = 1ull << (pow2.size() - 1);
    if (reached >= budget)
      throw std::runtime_error("mixing-time search exceeded budget");
    pow2.push_back(pow2.back() * pow2.back());
  }
  std::size_t k = pow2.size() - 1;
  if (k == 0) return 1;

  std::uint64_t lo = 1ull << (k - 1);  // f(lo) > eps
  Eigen::MatrixXd acc = pow2[k - 1];
  for (std::size_t j = k - 1; j-- > 0;) {
    Eigen::MatrixXd trial = acc * pow2[j];
    if (worst_tv(trial, pi.p) > eps) {
      acc = std::move(trial);
      lo += 1ull << j;
    }
  }
  return lo + 1;
}

std::vector<double> tv_profile(const MiningChain& chain, int n_steps) {
  Distribution pi = stationary(chain);
  int n = chain.size();
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd next(n, n);
  std::vector<double> profile;
  profile.reserve(n_steps);
  for (int s = 0; s < n_steps; ++s) {
    next.setZero();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = D(i, j);
        if (v == 0) continue;
        next(i, chain.step[j][0].to) += v * chain.p1;
        next(i, chain.step[j][1].to) += v * chain.p2;
      }
    D.swap(next);
    profile.push_back(worst_tv(D, pi.p));
  }
  return profile;
}

double expected_hitting_time(const MiningChain& chain, State target,
                             State from) {
  int t = chain.id_of(target);
  int f = chain.id_of(from);
  require(t >= 0 && f >= 0, "hitting endpoints must be chain states");
  if (t == f) return 0.0;

  // Forward closure from `from`; if it contains a state that cannot reach the
  // target, the hitting time is infinite.
  int n = chain.size();
  std::vector<char> fwd(n, 0);
  std::deque<int> q{f};
  fwd[f] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    if (v == t) continue;  // stop at the target
    for (const auto& e : chain.step[v])
      if (!fwd[e.to]) {
        fwd[e.to] = 1;
        q.push_back(e.to);
      }
  }
  if (!fwd[t]) return std::numeric_limits<double>::infinity();
  std::vector<char> canreach(n, 0);
  {
    std::vector<std::vector<int>> rev(n);
    for (int i = 0; i < n; ++i)
      for (const auto& e : chain.step[i]) rev[e.to].push_back(i);
    std::deque<int> r{t};
    canreach[t] = 1;
    while (!r.empty()) {
      int v = r.front();
      r.pop_front();
      for (int u : rev[v])
        if (!canreach[u]) {
          canreach[u] = 1;
          r.push_back(u);
        }
    }
  }
  for (int i = 0; i < n; ++i)
    if (fwd[i] && !canreach[i]) return std::numeric_limits<double>::infinity();

  // (I - P) h = 1 over the forward closure minus the absorbing target.
  std::vector<int> sys;  // state id -> row
  std::vector<int> rowof(n, -1);
  for (int i = 0; i < n; ++i)
    if (fwd[i] && i != t) {
      rowof[i] = static_cast<int>(sys.size());
      sys.push_back(i);
    }
  int m = static_cast<int>(sys.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(3 * m));
  for (int r = 0; r < m; ++r) {
    trip.emplace_back(r, r, 1.0);
    int i = sys[r];
    for (int w = 0; w < 2; ++w) {
      const auto& e = chain.step[i][w];
      if (e.to != t)
        trip.emplace_back(r, rowof[e.to], -(w == 0 ? chain.p1 : chain.p2));
    }
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("hitting-time solve failed to factorize");
  Eigen::VectorXd h = lu.solve(Eigen::VectorXd::Ones(m));
  double resid = (A * h - Eigen::VectorXd::Ones(m)).lpNorm<Eigen::Infinity>();
  if (resid > 1e-8)
    throw std::runtime_error("hitting-time residual exceeds 1e-8");
  return h[rowof[f]];
}

double exact_rounds_to_hit(const MiningChain& chain, int d) {
  require(d == chain.depth,
          "round decomposition is defined on the chain truncation depth");
  require(chain.s2 == 0, "round decomposition needs a Frontier opponent");
  for (int l1 = 0; l1 <= d; ++l1)
    for (int l2 = 0; l2 <= d; ++l2) {
      bool cap =
          chain.policy2.decide(l1, l2) == Decision::CapitulateIfLose;
      if (cap != (l1 >= l2))
        throw std::invalid_argument(
            "round decomposition needs a Frontier opponent");
    }

  int s = chain.s1;
  double p1 = chain.p1, p2 = chain.p2;
  // Within-round DP: interior moves strictly increase l1+l2, and (d,d) is the
  // unique state on its diagonal, so "reach (d,d)" and "end in a capitulation
  // before (d,d)" partition the round outcomes.
  auto analyze = [&](State start) {
    std::vector<std::vector<double>> u(
        d + 1, std::vector<double>(static_cast<std::size_t>(d) + 1, 0.0));
    u[start.l1][start.l2] = 1.0;
    double hit = 0, cap1 = 0, cap2 = 0;
    for (int sum = start.l1 + start.l2; sum <= 2 * d; ++sum) {
      for (int l1 = std::max(0, sum - d); l1 <= std::min(d, sum); ++l1) {
        int l2 = sum - l1;
        double v = u[l1][l2];
        if (v == 0) continue;
        if (l1 == d && l2 == d) {
          hit += v;
          continue;
        }
        bool c2 = chain.policy2.decide(l1, l2) == Decision::CapitulateIfLose;
        bool c1 = chain.policy1.decide(l1, l2) == Decision::CapitulateIfLose;
        if (c2 || l1 + 1 > d)
          cap2 += v * p1;
        else
          u[l1 + 1][l2] += v * p1;
        if (c1 || l2 + 1 > d)
          cap1 += v * p2;
        else
          u[l1][l2 + 1] += v * p2;
      }
    }
    return std::array<double, 3>{hit, cap1, cap2};
  };

  auto [hA, aA, bA] = analyze({0, 0});   // a: player-1 cap -> (0,s); b: -> (0,0)
  auto [hB, aB, bB] = analyze({0, s});
  double det = (1 - bA) * (1 - aB) - aA * bB;
  if (std::abs(det) < 1e-300)
    throw std::runtime_error("target diagonal is unreachable in-round");
  return ((1 - aB) + aA) / det;
}

namespace {

const char* kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Interior: return "interior";
    case EdgeKind::Capitulation: return "capitulation";
    case EdgeKind::TruncationForced: return "truncation_forced";
  }
  return "?";
}

}  // namespace

std::string chain_to_json(const MiningChain& chain) {
  nlohmann::json j;
  j["p1"] = chain.p1;
  j["p2"] = chain.p2;
  j["depth"] = chain.depth;
  j["s1"] = chain.s1;
  j["s2"] = chain.s2;
  j["start1"] = chain.start1;
  j["start2"] = chain.start2;
  j["truncation_forced"] = chain.truncation_forced;
  j["policy1"] = nlohmann::json::parse(policy_to_json(chain.policy1));
  j["policy2"] = nlohmann::json::parse(policy_to_json(chain.policy2));
  auto states = nlohmann::json::array();
  for (const auto& m : chain.states) states.push_back({m.l1, m.l2});
  j["states"] = states;
  j["boundary1"] = chain.boundary1;
  j["boundary2"] = chain.boundary2;
  auto edges = nlohmann::json::array();
  for (int i = 0; i < chain.size(); ++i)
    for (int w = 0; w < 2; ++w) {
      const auto& e = chain.step[i][w];
      edges.push_back({{"from", i},
                       {"winner", w + 1},
                       {"to", e.to},
                       {"prob", w == 0 ? chain.p1 : chain.p2},
                       {"r1", e.r1},
                       {"r2", e.r2},
                       {"kind", kind_name(e.kind)}});
    }
  j["edges"] = edges;
  return j.dump();
}

std::string chain_to_dot(const MiningChain& chain) {
  std::string out = "digraph mining_chain {\n  rankdir=LR;\n";
  for (int i = 0; i < chain.size(); ++i) {
    const auto& m = chain.states[i];
    std::string name = std::to_string(m.l1) + "," + std::to_string(m.l2);
    bool b1 = std::binary_search(chain.boundary1.begin(),
                                 chain.boundary1.end(), i);
    bool b2 = std::binary_search(chain.boundary2.begin(),
                                 chain.boundary2.end(), i);
    out += "  s" + std::to_string(i) + " [label=\"" + name + "\"" +
           (b1 || b2 ? ", shape=doublecircle" : ", shape=circle") + "];\n";
  }
  char buf[64];
  for (int i = 0; i < chain.size(); ++i)
    for (int w = 0; w < 2; ++w) {
      const auto& e = chain.step[i][w];
      std::snprintf(buf, sizeof buf, "p%d=%.4g", w + 1,
                    w == 0 ? chain.p1 : chain.p2);
      std::string label = buf;
      if (e.r1 != 0 || e.r2 != 0) {
        std::snprintf(buf, sizeof buf, " r=(%g,%g)", e.r1, e.r2);
        label += buf;
      }
      if (e.kind == EdgeKind::TruncationForced) label += " forced";
      out += "  s" + std::to_string(i) + " -> s" + std::to_string(e.to) +
             " [label=\"" + label + "\"];\n";
    }
  out += "}\n";
  return out;
}

}  // namespace minechain
