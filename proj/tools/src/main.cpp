// Batch CLI over the mining-game library: every subcommand reads flags,
// computes, and emits CSV (grids/tables) or JSON (single reports) with an
// embedded run manifest. Exit codes: 0 success, 2 usage, 1 computation.
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minechain/bounds.hpp"
#include "minechain/chain.hpp"
#include "minechain/closedform.hpp"
#include "minechain/format.hpp"
#include "minechain/lattice.hpp"
#include "minechain/payoff.hpp"
#include "minechain/policy.hpp"
#include "minechain/sim.hpp"

namespace {

using nlohmann::json;
using namespace minechain;

int thread_count() {
  if (const char* env = std::getenv("MINECHAIN_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Work-stealing loop over [0, n); results must be written to disjoint slots.
void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first;
  auto body = [&] {
    while (true) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

// Grid syntax: comma-separated pieces, each "a", "a..b" (step 1) or
// "a..b..step", endpoints inclusive.
std::vector<double> parse_grid(const std::string& name,
                               const std::string& text) {
  try {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
      if (piece.empty()) continue;
      auto r1 = piece.find("..");
      if (r1 == std::string::npos) {
        out.push_back(std::stod(piece));
        continue;
      }
      double a = std::stod(piece.substr(0, r1));
      std::string rest = piece.substr(r1 + 2);
      auto r2 = rest.find("..");
      double b = 0, step = 1.0;
      if (r2 == std::string::npos) {
        b = std::stod(rest);
      } else {
        b = std::stod(rest.substr(0, r2));
        step = std::stod(rest.substr(r2 + 2));
      }
      if (!(step > 0) || b < a) throw std::invalid_argument("bad range");
      for (int k = 0;; ++k) {
        double x = a + k * step;
        if (x > b + step * 1e-9) break;
        out.push_back(x);
      }
    }
    return out;
  } catch (const std::exception&) {
    throw CLI::ValidationError(name + ": malformed grid '" + text + "'");
  }
}

std::vector<int> parse_int_grid(const std::string& name,
                                const std::string& text) {
  std::vector<int> out;
  for (double x : parse_grid(name, text)) {
    if (std::fabs(x - std::round(x)) > 1e-9)
      throw CLI::ValidationError(name + ": expected integers in '" + text +
                                 "'");
    out.push_back(static_cast<int>(std::llround(x)));
  }
  return out;
}

double single_value(const std::string& name, const std::string& text) {
  auto v = parse_grid(name, text);
  if (v.size() != 1)
    throw CLI::ValidationError(name + ": expected a single value");
  return v[0];
}

json make_manifest(const std::string& subcommand, json params) {
  return json{{"tool", "minechain"},
              {"version", MINECHAIN_VERSION},
              {"subcommand", subcommand},
              {"params", std::move(params)}};
}

// Output sink: path or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_csv(Sink& sink, const json& manifest, const std::string& header,
              const std::vector<std::string>& rows) {
  sink.os() << "# manifest " << manifest.dump() << "\n" << header << "\n";
  for (const auto& row : rows) sink.os() << row << "\n";
}

void emit_json(Sink& sink, json payload) {
  sink.os() << payload.dump(2) << "\n";
}

// Shared policy-pair selection: mutual Frontier, constant-gap(g,s) against a
// Frontier player 2, or explicit policy JSON files per slot.
struct PolicyArgs {
  bool frontier_vs_frontier = false;
  int gap = -1;
  int s = 0;
  std::string policy1_path, policy2_path;
};

void add_policy_flags(CLI::App* cmd, PolicyArgs& pa) {
  cmd->add_flag("--frontier-vs-frontier", pa.frontier_vs_frontier,
                "both players capitulate at the frontier");
  cmd->add_option("--gap", pa.gap,
                  "player 1 plays constant-gap(g) against a Frontier player 2");
  cmd->add_option("--s", pa.s, "restart depth for --gap (default 0)");
  cmd->add_option("--policy1", pa.policy1_path,
                  "player 1 policy as a JSON file");
  cmd->add_option("--policy2", pa.policy2_path,
                  "player 2 policy as a JSON file");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<CapitulationPolicy, CapitulationPolicy> resolve_policies(
    const PolicyArgs& pa) {
  bool has_gap = pa.gap >= 0;
  int selections = (pa.frontier_vs_frontier ? 1 : 0) + (has_gap ? 1 : 0) +
                   (!pa.policy1_path.empty() || !pa.policy2_path.empty() ? 1 : 0);
  if (selections == 0)
    throw CLI::ValidationError(
        "select --frontier-vs-frontier, --gap, or --policy1/--policy2");
  if (selections > 1)
    throw CLI::ValidationError("policy selections are mutually exclusive");
  CapitulationPolicy p1 = make_frontier(kUnboundedDepth, 1);
  CapitulationPolicy p2 = make_frontier(kUnboundedDepth, 2);
  if (has_gap) p1 = make_constant_gap(pa.gap, pa.s);
  if (!pa.policy1_path.empty()) p1 = policy_from_json(read_file(pa.policy1_path));
  if (!pa.policy2_path.empty()) p2 = policy_from_json(read_file(pa.policy2_path));
  return {p1, p2};
}

json policy_params(const PolicyArgs& pa) {
  json j;
  if (pa.frontier_vs_frontier) j["frontier_vs_frontier"] = true;
  if (pa.gap >= 0) {
    j["gap"] = pa.gap;
    j["s"] = pa.s;
  }
  if (!pa.policy1_path.empty()) j["policy1"] = pa.policy1_path;
  if (!pa.policy2_path.empty()) j["policy2"] = pa.policy2_path;
  return j;
}

// ---- analyze: exact stationary payoff report for one parameter point ----

struct AnalyzeOpts {
  PolicyArgs policy;
  double p1 = 0;
  int depth = 200;
  double c1 = NAN, c2 = NAN;  // NAN = use the reference cost model
  double tau_bar = 10.0;
  std::string out;
};

void run_analyze(const AnalyzeOpts& opt) {
  auto [pol1, pol2] = resolve_policies(opt.policy);
  MiningChain chain = build_chain(pol1, pol2, opt.p1, opt.depth);
  Distribution pi = stationary(chain);
  double c1 = std::isnan(opt.c1) ? default_cost(opt.p1) : opt.c1;
  double c2 = std::isnan(opt.c2) ? default_cost(1.0 - opt.p1) : opt.c2;
  PayoffReport rep = evaluate(chain, pi, c1, c2, opt.tau_bar);

  json params = policy_params(opt.policy);
  params["p1"] = opt.p1;
  params["depth"] = opt.depth;
  params["c1"] = c1;
  params["c2"] = c2;
  params["tau_bar"] = opt.tau_bar;
  json out;
  out["manifest"] = make_manifest("analyze", params);
  out["report"] = json::parse(report_to_json(rep));
  out["states"] = chain.size();
  out["truncation_forced"] = chain.truncation_forced;
  Sink sink(opt.out);
  emit_json(sink, out);
}

// ---- mix: rapid-mixing table / bound grid / exact mixing time ----

struct MixOpts {
  double eps = 1e-3;
  double horizon = 1e4;
  std::string gbar = "1..10";
  std::string p1;  // empty: power table; grid: bound table; --exact: single
  bool exact = false;
  PolicyArgs policy;
  int depth = 30;
  std::string out;
};

void run_mix(const MixOpts& opt) {
  if (!(opt.eps > 0.0 && opt.eps < 1.0))
    throw CLI::ValidationError("--eps must lie in (0,1)");
  Sink sink(opt.out);
  if (opt.exact) {
    if (opt.p1.empty())
      throw CLI::ValidationError("--exact needs --p1");
    double p1 = single_value("--p1", opt.p1);
    auto [pol1, pol2] = resolve_policies(opt.policy);
    MiningChain chain = build_chain(pol1, pol2, p1, opt.depth);
    std::uint64_t exact = exact_mixing_time(chain, opt.eps);
    int gbar = 0;  // max gap over the reachable states
    for (const auto& m : chain.states) gbar = std::max(gbar, m.l2 - m.l1);
    std::uint64_t bound = mixing_upper_bound(p1, gbar, opt.eps);
    json params = policy_params(opt.policy);
    params["p1"] = p1;
    params["depth"] = opt.depth;
    params["eps"] = opt.eps;
    json out;
    out["manifest"] = make_manifest("mix", params);
    out["exact_mixing_time"] = exact;
    out["gbar"] = gbar;
    out["upper_bound"] = bound;
    out["states"] = chain.size();
    emit_json(sink, out);
    return;
  }
  std::vector<int> gbars = parse_int_grid("--gbar", opt.gbar);
  if (gbars.empty()) throw CLI::ValidationError("--gbar grid is empty");
  if (opt.p1.empty()) {
    // Least power that keeps the mixing bound within the horizon.
    if (!(opt.horizon > 0)) throw CLI::ValidationError("--T must be positive");
    std::vector<std::string> rows(gbars.size());
    parallel_for(static_cast<int>(gbars.size()), [&](int i) {
      double p = min_power_rapid_mixing(opt.eps, opt.horizon, gbars[i]);
      rows[i] = std::to_string(gbars[i]) + "," + fmt_g12(p);
    });
    json params{{"eps", opt.eps}, {"T", opt.horizon}, {"gbar", opt.gbar}};
    emit_csv(sink, make_manifest("mix", params), "gbar,p1_tilde", rows);
    return;
  }
  std::vector<double> p1s = parse_grid("--p1", opt.p1);
  if (p1s.empty()) throw CLI::ValidationError("--p1 grid is empty");
  std::vector<std::string> rows(gbars.size() * p1s.size());
  parallel_for(static_cast<int>(rows.size()), [&](int i) {
    int gi = i / static_cast<int>(p1s.size());
    int pi_ = i % static_cast<int>(p1s.size());
    std::uint64_t bound = mixing_upper_bound(p1s[pi_], gbars[gi], opt.eps);
    rows[i] = std::to_string(gbars[gi]) + "," + fmt_g12(p1s[pi_]) + "," +
              std::to_string(bound);
  });
  json params{{"eps", opt.eps}, {"gbar", opt.gbar}, {"p1", opt.p1}};
  emit_csv(sink, make_manifest("mix", params), "gbar,p1,bound_turns", rows);
}

// ---- safety: hitting-time classification grid ----

struct SafetyOpts {
  int d = 100;
  double horizon = 1e8;
  std::string g = "1..15";
  std::string s = "0..3";
  std::string p1 = "0.01..0.99..0.01";
  double p1max = 1.0;
  std::string out;
};

void run_safety(const SafetyOpts& opt) {
  if (!(opt.horizon > 0)) throw CLI::ValidationError("--T must be positive");
  std::vector<int> gs = parse_int_grid("--g", opt.g);
  std::vector<int> ss = parse_int_grid("--s", opt.s);
  std::vector<double> p1s_all = parse_grid("--p1", opt.p1);
  std::vector<double> p1s;
  for (double p : p1s_all)
    if (p <= opt.p1max + 1e-12) p1s.push_back(p);
  if (gs.empty() || ss.empty() || p1s.empty())
    throw CLI::ValidationError("empty grid");

  struct Cell {
    int g, s;
    double p1;
  };
  std::vector<Cell> cells;
  for (int g : gs)
    for (int s : ss) {
      if (s > g || s > 2 * opt.d) continue;  // outside the strategy family
      for (double p : p1s) cells.push_back({g, s, p});
    }
  std::vector<std::string> rows(cells.size());
  parallel_for(static_cast<int>(cells.size()), [&](int i) {
    rows[i] = safety_csv_row(classify_safety(opt.d, cells[i].g, cells[i].s,
                                             cells[i].p1, opt.horizon));
  });
  json params{{"d", opt.d}, {"T", opt.horizon}, {"g", opt.g},
              {"s", opt.s}, {"p1", opt.p1}};
  if (opt.p1max < 1.0) params["p1max"] = opt.p1max;
  Sink sink(opt.out);
  emit_csv(sink, make_manifest("safety", params), safety_csv_header(), rows);
}

// ---- curve: market-share / revenue sweep from the closed forms ----

struct CurveOpts {
  std::string g = "1..49..2";
  std::string p1 = "0.005..0.995..0.005";
  double cost_rate = 0.005;
  double tau_bar = 10.0;
  std::string out;
};

void run_curve(const CurveOpts& opt) {
  std::vector<int> gs = parse_int_grid("--g", opt.g);
  std::vector<double> p1s = parse_grid("--p1", opt.p1);
  if (gs.empty()) throw CLI::ValidationError("--g grid is empty");
  if (p1s.empty()) throw CLI::ValidationError("--p1 grid is empty");
  std::vector<CurvePoint> points =
      market_share_curve(gs, p1s, opt.cost_rate, opt.tau_bar);
  std::vector<std::string> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) rows.push_back(curve_csv_row(pt));
  json params{{"g", opt.g},
              {"p1", opt.p1},
              {"cost_rate", opt.cost_rate},
              {"tau_bar", opt.tau_bar}};
  Sink sink(opt.out);
  emit_csv(sink, make_manifest("curve", params), curve_csv_header(), rows);
}

// ---- simulate: Monte Carlo oracle ----

struct SimulateOpts {
  PolicyArgs policy;
  double p1 = 0.5;
  double turns = 1e6;
  std::uint64_t seed = 1;
  int batches = 32;
  double c1 = NAN, c2 = NAN;
  double tau_bar = 10.0;
  bool durations = false;
  std::string hitting;  // "l1,l2" first-passage target
  int replications = 100;
  std::string out;
};

void run_simulate(const SimulateOpts& opt) {
  if (!(opt.turns >= 1 && opt.turns <= 4e15))
    throw CLI::ValidationError("--turns out of range");
  auto [pol1, pol2] = resolve_policies(opt.policy);
  SimConfig config;
  config.policy1 = pol1;
  config.policy2 = pol2;
  config.p1 = opt.p1;
  config.turns = static_cast<std::uint64_t>(opt.turns);
  config.seed = opt.seed;
  config.batches = opt.batches;
  config.c1 = std::isnan(opt.c1) ? default_cost(opt.p1) : opt.c1;
  config.c2 = std::isnan(opt.c2) ? default_cost(1.0 - opt.p1) : opt.c2;
  config.tau_bar = opt.tau_bar;
  config.exponential_durations = opt.durations;

  json params = policy_params(opt.policy);
  params["p1"] = opt.p1;
  params["turns"] = config.turns;
  params["seed"] = opt.seed;
  params["batches"] = opt.batches;
  params["c1"] = config.c1;
  params["c2"] = config.c2;
  params["tau_bar"] = opt.tau_bar;
  Sink sink(opt.out);

  if (!opt.hitting.empty()) {
    int l1 = 0, l2 = 0;
    if (std::sscanf(opt.hitting.c_str(), "%d,%d", &l1, &l2) != 2)
      throw CLI::ValidationError("--hitting expects 'l1,l2'");
    if (opt.replications < 1)
      throw CLI::ValidationError("--replications must be positive");
    params["hitting"] = opt.hitting;
    params["replications"] = opt.replications;
    auto samples = hitting_samples(config, State{l1, l2}, opt.replications);
    json rows = json::array();
    double mean = 0;
    int uncensored = 0;
    for (const auto& s : samples) {
      rows.push_back({{"turns", s.turns}, {"censored", s.censored}});
      if (!s.censored) {
        mean += static_cast<double>(s.turns);
        ++uncensored;
      }
    }
    json out;
    out["manifest"] = make_manifest("simulate", params);
    out["samples"] = rows;
    out["uncensored"] = uncensored;
    out["censored"] = static_cast<int>(samples.size()) - uncensored;
    if (uncensored > 0) out["mean_uncensored_turns"] = mean / uncensored;
    emit_json(sink, out);
    return;
  }
  SimStats stats = run(config);
  json out;
  out["manifest"] = make_manifest("simulate", params);
  out["stats"] = json::parse(stats_to_json(stats));
  emit_json(sink, out);
}

// ---- paths: exact lattice path counts ----

struct PathsOpts {
  int d = -1, g = -1, s = 0;
  bool band = false;
  int l = -1, m = -1;
  std::string out;
};

void run_paths(const PathsOpts& opt) {
  Sink sink(opt.out);
  if (opt.band) {
    if (opt.l < 0 || opt.m < 0 || opt.g < 0)
      throw CLI::ValidationError("--band needs --l, --m and --g");
    BandPathCount r = count_band_paths(opt.l, opt.m, opt.g);
    json params{{"band", true}, {"l", opt.l}, {"m", opt.m}, {"g", opt.g}};
    json out;
    out["manifest"] = make_manifest("paths", params);
    out["count"] = r.count.value.str();
    out["ln_count"] = r.count.log_value;
    out["trig_value"] = r.trig_value;
    out["used_fallback"] = r.used_fallback;
    emit_json(sink, out);
    return;
  }
  if (opt.d < 0 || opt.g < 0)
    throw CLI::ValidationError("need --d and --g (or --band)");
  ConstantGapCounts counts = count_constant_gap(opt.d, opt.g, opt.s);
  json params{{"d", opt.d}, {"g", opt.g}, {"s", opt.s}};
  json out;
  out["manifest"] = make_manifest("paths", params);
  out["n00"] = counts.n00.value.str();
  out["ln_n00"] = counts.n00.log_value;
  out["n0s"] = counts.n0s.value.str();
  out["ln_n0s"] = counts.n0s.log_value;
  emit_json(sink, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-player mining-game analysis toolkit"};
  app.require_subcommand(1);

  AnalyzeOpts an;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "exact stationary payoff report for a policy pair");
  add_policy_flags(analyze, an.policy);
  analyze->add_option("--p1", an.p1, "player 1 win probability")->required();
  analyze->add_option("--depth", an.depth, "truncation depth (default 200)");
  analyze->add_option("--c1", an.c1, "player 1 cost rate (default 0.005*p1)");
  analyze->add_option("--c2", an.c2, "player 2 cost rate (default 0.005*p2)");
  analyze->add_option("--tau-bar", an.tau_bar, "minutes per validated block");
  analyze->add_option("-o,--output", an.out, "output file (default stdout)");
  analyze->callback([&an] { run_analyze(an); });

  MixOpts mx;
  CLI::App* mix = app.add_subcommand(
      "mix", "rapid-mixing power table, bound grid, or exact mixing time");
  mix->add_option("--eps", mx.eps, "total-variation threshold");
  mix->add_option("--T", mx.horizon, "turn horizon for the power table");
  mix->add_option("--gbar", mx.gbar, "gap-bound grid (default 1..10)");
  mix->add_option("--p1", mx.p1, "power grid (bound table) or value (--exact)");
  mix->add_flag("--exact", mx.exact, "exact mixing time of a built chain");
  add_policy_flags(mix, mx.policy);
  mix->add_option("--depth", mx.depth, "truncation depth for --exact");
  mix->add_option("-o,--output", mx.out, "output file (default stdout)");
  mix->callback([&mx] { run_mix(mx); });

  SafetyOpts sf;
  CLI::App* safety = app.add_subcommand(
      "safety", "hitting-time safety classification over a strategy grid");
  safety->add_option("--d", sf.d, "truncation depth (default 100)");
  safety->add_option("--T", sf.horizon, "difficulty-adjustment horizon");
  safety->add_option("--g", sf.g, "gap grid");
  safety->add_option("--s", sf.s, "restart-depth grid");
  safety->add_option("--p1", sf.p1, "power grid");
  safety->add_option("--p1max", sf.p1max, "keep only p1 <= p1max");
  safety->add_option("-o,--output", sf.out, "output file (default stdout)");
  safety->callback([&sf] { run_safety(sf); });

  CurveOpts cv;
  CLI::App* curve = app.add_subcommand(
      "curve", "market-share and revenue curves from the closed forms");
  curve->add_option("--g", cv.g, "gap list (default 1..49..2)");
  curve->add_option("--p1", cv.p1, "power grid (default 0.005 steps)");
  curve->add_option("--cost-rate", cv.cost_rate, "cost per unit power");
  curve->add_option("--tau-bar", cv.tau_bar, "minutes per validated block");
  curve->add_option("-o,--output", cv.out, "output file (default stdout)");
  curve->callback([&cv] { run_curve(cv); });

  SimulateOpts sm;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo game simulation (shares, revenues, hitting)");
  add_policy_flags(simulate, sm.policy);
  simulate->add_option("--p1", sm.p1, "player 1 win probability")->required();
  simulate->add_option("--turns", sm.turns, "turn budget (default 1e6)");
  simulate->add_option("--seed", sm.seed, "RNG seed");
  simulate->add_option("--batches", sm.batches, "batch-means blocks");
  simulate->add_option("--c1", sm.c1, "player 1 cost rate (default 0.005*p1)");
  simulate->add_option("--c2", sm.c2, "player 2 cost rate (default 0.005*p2)");
  simulate->add_option("--tau-bar", sm.tau_bar, "minutes per validated block");
  simulate->add_flag("--durations", sm.durations,
                     "draw exponential turn durations");
  simulate->add_option("--hitting", sm.hitting,
                       "first-passage target 'l1,l2' (replication mode)");
  simulate->add_option("--replications", sm.replications,
                       "replications for --hitting (default 100)");
  simulate->add_option("-o,--output", sm.out, "output file (default stdout)");
  simulate->callback([&sm] { run_simulate(sm); });

  PathsOpts pt;
  CLI::App* paths = app.add_subcommand(
      "paths", "exact in-band lattice path counts (corner or band forms)");
  paths->add_option("--d", pt.d, "band depth (corner mode)");
  paths->add_option("--g", pt.g, "gap");
  paths->add_option("--s", pt.s, "start offset (corner mode, default 0)");
  paths->add_flag("--band", pt.band, "band count L(l, l+m) mode");
  paths->add_option("--l", pt.l, "band mode: diagonal coordinate");
  paths->add_option("--m", pt.m, "band mode: lead within the band");
  paths->add_option("-o,--output", pt.out, "output file (default stdout)");
  paths->callback([&pt] { run_paths(pt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
