// Acceptance suite: one PASS/FAIL line per criterion. Criterion 8 is soft and
// never changes the exit status.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "../unit/test_support.hpp"

namespace mc = motifcascade;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int hard_failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, bool soft = false) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail << ")";
  if (soft && !ok) std::cout << " [warning only]";
  std::cout << std::endl;
  if (!ok && !soft) ++hard_failures;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Likelihood oracles

mc::ExposureMap random_exposures(const mc::Cascade& c, std::mt19937_64& rng, double p = 0.3) {
  std::bernoulli_distribution coin(p);
  mc::ExposureMap out;
  for (std::size_t i = 2; i < c.size(); ++i) {
    mc::ExposureSet s;
    s.target = c[i].node;
    s.cascade_id = c.id();
    for (std::size_t k = 0; k < i; ++k)
      if (c[k].node != *c[i].parent && coin(rng)) s.members.push_back(c[k].node);
    std::sort(s.members.begin(), s.members.end());
    if (!s.members.empty()) out.emplace(s.target, s);
  }
  return out;
}

mc::ModelParams random_params(const mc::Cascade& c, const mc::ExposureMap& ex, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::bernoulli_distribution coin(0.7);
  mc::ModelParams p;
  p.lambda = u(rng);
  p.beta = u(rng);
  for (std::size_t i = 1; i < c.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (coin(rng)) p.alpha[{c[k].node, c[i].node}] = u(rng);
  for (const auto& [v, s] : ex)
    for (auto m : s.members)
      if (coin(rng)) p.eta[m] = u(rng);
  return p;
}

// Parent density times the survival of every other earlier adopter times the
// exposure factors, multiplied out per node in extended precision.
long double product_form(const mc::Cascade& c, const mc::ExposureMap& ex, const mc::ModelParams& p,
                         const mc::CentralityVector& x) {
  long double total = 0.0L;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const long double ti = c.normalized_time(i);
    const auto j = *c[i].parent;
    long double prod = 1.0L;
    for (std::size_t k = 0; k < i; ++k) {
      const long double gap = ti - c.normalized_time(k);
      const long double a = p.alpha_for({c[k].node, c[i].node}, x);
      prod *= c[k].node == j ? a * gap * std::exp(-0.5L * a * gap * gap) : std::exp(-0.5L * a * gap * gap);
    }
    if (auto it = ex.find(c[i].node); it != ex.end())
      for (auto m : it->second.members)
        prod *= p.eta_for(m, x) * std::exp(-(ti - static_cast<long double>(c.normalized_time_of(m))));
    total += std::log(prod);
  }
  return total;
}

struct Instance {
  std::vector<mc::Cascade> corpus;
  std::vector<mc::ExposureMap> exposures;
  mc::CentralityVector x;
  mc::ModelParams params;
};

Instance random_instance(std::mt19937_64& rng, std::size_t cascades = 2, std::size_t size = 7) {
  Instance in;
  const std::size_t n = 12;
  in.x = mctest::random_attributes(n, rng);
  auto pool = mctest::iota_nodes(n);
  for (std::size_t c = 0; c < cascades; ++c) {
    std::shuffle(pool.begin(), pool.end(), rng);
    in.corpus.push_back(mctest::random_cascade("c" + std::to_string(c), {pool.begin(), pool.begin() + size}, rng));
    in.exposures.push_back(random_exposures(in.corpus.back(), rng));
    auto p = random_params(in.corpus.back(), in.exposures.back(), rng);
    in.params.alpha.insert(p.alpha.begin(), p.alpha.end());
    in.params.eta.insert(p.eta.begin(), p.eta.end());
    in.params.lambda = p.lambda;
    in.params.beta = p.beta;
  }
  return in;
}

void criterion_1() {
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 49;
    auto x = mctest::random_attributes(n, rng);
    auto c = mctest::random_cascade("c", mctest::iota_nodes(n), rng);
    auto ex = random_exposures(c, rng);
    auto p = random_params(c, ex, rng);
    const double hazard = mc::cascade_log_likelihood(c, ex, p, x).total;
    const auto product = static_cast<double>(product_form(c, ex, p, x));
    worst = std::max(worst, std::abs(hazard - product) / std::max(1.0, std::abs(product)));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "500 cascades, max relative gap " << worst << ", " << secs << " s";
  report(1, worst <= 1e-10 && secs < 30.0, "hazard form equals product form", d.str());
}

void criterion_2() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> weight(0.0, 5.0), gamma(0.0, 0.2);
  const double h = 1e-6;
  std::size_t partials = 0, bad = 0;
  double worst = 0.0;
  for (int point = 0; point < 200; ++point) {
    auto in = random_instance(rng);
    const mc::ObjectiveWeights w{weight(rng), weight(rng), gamma(rng), gamma(rng)};
    auto G = [&](const mc::ModelParams& p) { return mc::objective_G(in.corpus, in.exposures, p, in.x, w).G; };
    auto g = mc::gradients(in.corpus, in.exposures, in.params, in.x, w);
    auto check = [&](double analytic, auto&& bump) {
      auto plus = in.params, minus = in.params;
      bump(plus, h);
      bump(minus, -h);
      const double fd = (G(plus) - G(minus)) / (2 * h);
      const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
      worst = std::max(worst, rel);
      ++partials;
      if (rel > 1e-5) ++bad;
    };
    for (const auto& [pair, a] : in.params.alpha)
      check(g.alpha.at(pair), [pair = pair](mc::ModelParams& p, double d) { p.alpha[pair] += d; });
    for (const auto& [m, e] : in.params.eta)
      check(g.eta.at(m), [m = m](mc::ModelParams& p, double d) { p.eta[m] += d; });
    check(g.lambda, [](mc::ModelParams& p, double d) { p.lambda += d; });
    check(g.beta, [](mc::ModelParams& p, double d) { p.beta += d; });
  }
  std::ostringstream d;
  d << "200 points, " << partials << " partials, " << bad << " outside 1e-5, worst " << worst;
  report(2, bad == 0, "analytic gradients match central differences", d.str());
}

void criterion_3() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(1e-3, 10.0);
  std::size_t violations = 0;
  double worst = -INFINITY;
  for (int block = 0; block < 2; ++block)
    for (int seg = 0; seg < 1000; ++seg) {
      auto in = random_instance(rng);
      auto nll = [&](const mc::ModelParams& p) { return mc::negative_log_likelihood(in.corpus, in.exposures, p, in.x); };
      auto p = in.params, q = in.params, mid = in.params;
      if (block == 0) {
        for (auto& [k, v] : q.alpha) v = u(rng);
        for (auto& [k, v] : mid.alpha) v = 0.5 * (p.alpha.at(k) + q.alpha.at(k));
      } else {
        for (auto& [k, v] : q.eta) v = u(rng);
        for (auto& [k, v] : mid.eta) v = 0.5 * (p.eta.at(k) + q.eta.at(k));
      }
      const double gap = nll(mid) - 0.5 * (nll(p) + nll(q));
      worst = std::max(worst, gap);
      if (gap > 1e-9) ++violations;
    }
  std::ostringstream d;
  d << "1000 segments in A and 1000 in Z, " << violations << " violations, max G1(mid) - mean " << worst;
  report(3, violations == 0, "G1 is midpoint convex in A and in Z", d.str());
}

// Checks a trace CSV for non-increasing G.
bool trace_descends(const std::string& csv, double& worst_rise) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  double prev = INFINITY;
  bool ok = true;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string iter, g;
    std::getline(row, iter, ',');
    std::getline(row, g, ',');
    const double G = std::stod(g);
    if (std::isfinite(prev)) worst_rise = std::max(worst_rise, G - prev);
    if (G > prev + 1e-9) ok = false;
    prev = G;
  }
  return ok;
}

void criterion_4(const fs::path& experiment_dir) {
  double worst_rise = -INFINITY;
  std::size_t runs = 0, bad_runs = 0;
  // Direct fits from random starts on generated corpora.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    mc::SynthConfig sc;
    sc.n_nodes = 300;
    sc.n_cascades = 10;
    sc.min_cascade_size = 60;
    sc.seed = seed;
    auto data = mc::generate_synthetic(sc);
    std::vector<mc::ExposureMap> ex;
    for (const auto& c : data.cascades)
      ex.push_back(mc::compute_cascade_exposures(c, data.graph, 10, mc::default_patterns(), 1.0));
    mc::TrainConfig cfg;
    cfg.init = seed % 2 ? mc::InitRule::random : mc::InitRule::decomposition;
    cfg.seed = seed;
    auto r = mc::fit(data.cascades, ex, data.planted, cfg);
    ++runs;
    worst_rise = std::max(worst_rise, r.trace.max_block_increase);
    bool ok = r.trace.max_block_increase <= 1e-9;
    for (std::size_t i = 1; i < r.trace.rows.size(); ++i)
      if (r.trace.rows[i].G > r.trace.rows[i - 1].G + 1e-9) ok = false;
    if (!ok) ++bad_runs;
  }
  // Every trace written by the experiment run.
  std::vector<fs::path> traces{experiment_dir / "trace.csv"};
  if (fs::exists(experiment_dir / "checkpoints"))
    for (const auto& e : fs::directory_iterator(experiment_dir / "checkpoints"))
      if (e.path().string().ends_with(".trace.csv")) traces.push_back(e.path());
  for (const auto& t : traces) {
    ++runs;
    if (!trace_descends(slurp(t), worst_rise)) ++bad_runs;
  }
  // Restarts on instances with three pairs and one exposure node.
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> t(0.1, 0.9);
  double widest = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    std::vector<mc::Cascade> corpus{mc::make_cascade("c", {{mc::node_id(0), std::nullopt, 0.0},
                                                           {mc::node_id(1), mc::node_id(0), t(rng)},
                                                           {mc::node_id(2), mc::node_id(1), 1.0}})};
    mc::ExposureMap exm;
    exm[mc::node_id(2)] = {mc::node_id(2), "c", {mc::node_id(0)}, {}, false};
    std::vector<mc::ExposureMap> ex{exm};
    auto x = mctest::random_attributes(3, rng);
    double lo = INFINITY, hi = -INFINITY;
    for (std::uint64_t restart = 0; restart < 10; ++restart) {
      mc::TrainConfig cfg;
      cfg.init = mc::InitRule::random;
      cfg.seed = restart;
      cfg.outer_tol = 1e-15;
      cfg.max_outer_iters = 100000;
      auto r = mc::fit(corpus, ex, x, cfg);
      lo = std::min(lo, r.trace.rows.back().G);
      hi = std::max(hi, r.trace.rows.back().G);
    }
    widest = std::max(widest, hi - lo);
  }
  std::ostringstream d;
  d << runs << " training runs, " << bad_runs << " with an increase, largest rise " << worst_rise
    << "; widest restart spread " << widest << " over 20 instances";
  report(4, bad_runs == 0 && widest <= 1e-6, "coordinate descent never increases G; restarts agree", d.str());
}

// ---------------------------------------------------------------------------
// Motif oracles

using InstanceKey = std::pair<std::array<std::uint32_t, 3>, std::vector<mc::TypedEdge>>;

std::multiset<InstanceKey> all_triples(const mc::TemporalWindow& w) {
  auto nodes = w.nodes();
  std::sort(nodes.begin(), nodes.end());
  std::multiset<InstanceKey> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      for (std::size_t k = j + 1; k < nodes.size(); ++k) {
        const std::set<mc::NodeId> tri{nodes[i], nodes[j], nodes[k]};
        std::vector<mc::TypedEdge> induced;
        std::set<std::pair<mc::NodeId, mc::NodeId>> links;
        for (const auto& e : w.edges)
          if (tri.count(e.src) && tri.count(e.dst)) {
            induced.push_back(e);
            links.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
          }
        if (links.size() < 2) continue;
        std::sort(induced.begin(), induced.end());
        out.insert({{mc::index_of(nodes[i]), mc::index_of(nodes[j]), mc::index_of(nodes[k])}, induced});
      }
  return out;
}

std::vector<mc::NodeId> gate_line_by_line(std::vector<mc::GateCandidate> list, double th) {
  std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
    return a.delta < b.delta || (a.delta == b.delta && a.node < b.node);
  });
  while (!list.empty()) {
    double product = 1.0;
    for (const auto& c : list) product *= c.delta;
    if (product > th) break;
    list.erase(list.begin());
  }
  std::vector<mc::NodeId> out;
  for (const auto& c : list) out.push_back(c.node);
  std::sort(out.begin(), out.end());
  return out;
}

void criterion_5() {
  std::mt19937_64 rng(105);
  std::size_t window_mismatch = 0, instances = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial) % 13;
    std::bernoulli_distribution coin(0.05 + 0.03 * (trial % 5));
    mc::TemporalWindow w;
    for (std::uint32_t i = 0; i < n; ++i) (i < n / 2 ? w.prior_nodes : w.current_nodes).push_back(mc::node_id(i));
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b) {
        if (a == b) continue;
        if (coin(rng)) w.edges.push_back({mc::node_id(a), mc::node_id(b), mc::EdgeType::cascade});
        if (coin(rng)) w.edges.push_back({mc::node_id(a), mc::node_id(b), mc::EdgeType::historical});
      }
    std::sort(w.edges.begin(), w.edges.end());
    std::multiset<InstanceKey> got;
    for (const auto& m : mc::enumerate_size3(w))
      got.insert({{mc::index_of(m.vertices[0]), mc::index_of(m.vertices[1]), mc::index_of(m.vertices[2])}, m.edges});
    const auto want = all_triples(w);
    instances += want.size();
    if (got != want) ++window_mismatch;
  }
  std::size_t gate_mismatch = 0;
  std::uniform_int_distribution<int> size(0, 10);
  std::uniform_real_distribution<double> logd(-3.0, 3.0), logth(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<mc::GateCandidate> list;
    const int k = size(rng);
    for (int i = 0; i < k; ++i) list.push_back({mc::node_id(static_cast<std::uint32_t>(i)), std::exp(logd(rng))});
    const double th = std::exp(logth(rng));
    auto got = mc::and_gate(list, th);
    std::vector<mc::NodeId> nodes;
    for (const auto& c : got) nodes.push_back(c.node);
    std::sort(nodes.begin(), nodes.end());
    if (nodes != gate_line_by_line(list, th)) ++gate_mismatch;
  }
  std::ostringstream d;
  d << "100 windows (" << instances << " instances), " << window_mismatch << " mismatched; 100 gate lists, "
    << gate_mismatch << " mismatched";
  report(5, window_mismatch == 0 && gate_mismatch == 0, "motif enumerator and AND gate match their oracles", d.str());
}

void criterion_6() {
  auto g = mctest::graph_from(2, {{0, 1}});
  mc::CentralityVector x{mc::CentralityKind::degree, {0.9, 0.4}};
  mc::SynthConfig cfg;
  cfg.true_lambda = 2.0;
  const double alpha = 2.0 * 0.9 * 0.4;
  std::mt19937_64 rng(106);
  std::vector<double> gaps;
  for (int i = 0; i < 10000; ++i) {
    auto acts = mc::simulate_cascade(g, x, mc::node_id(0), cfg, 2, rng);
    if (acts.size() == 2) gaps.push_back(acts[1].time - acts[0].time);
  }
  std::sort(gaps.begin(), gaps.end());
  const double n = static_cast<double>(gaps.size());
  double d = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double f = 1.0 - std::exp(-0.5 * alpha * gaps[i] * gaps[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  std::ostringstream s;
  s << gaps.size() << " samples, KS statistic " << d;
  report(6, gaps.size() == 10000 && d < 0.05, "two-node gaps follow the Rayleigh law", s.str());
}

// ---------------------------------------------------------------------------
// Experiment-level criteria

std::map<std::pair<std::string, std::size_t>, double> recall_by_cell(const std::vector<mc::RawRecord>& records) {
  std::map<std::pair<std::string, std::size_t>, std::pair<double, std::size_t>> acc;
  for (const auto& r : records) {
    if (r.experiment != "main" || r.status != mc::RecordStatus::scored) continue;
    auto& a = acc[{std::string(mc::to_string(r.method)), r.interval}];
    a.first += r.eval.recall;
    ++a.second;
  }
  std::map<std::pair<std::string, std::size_t>, double> out;
  for (const auto& [k, a] : acc) out[k] = a.second ? a.first / static_cast<double>(a.second) : 0.0;
  return out;
}

void criterion_7(const mc::ExperimentReport& rep, double secs) {
  const auto recall = recall_by_cell(rep.records);
  bool margins = true;
  std::ostringstream d;
  d << std::fixed << std::setprecision(3);
  for (std::size_t i = 2; i <= 5; ++i) {
    const double ic = recall.count({"infercut", i}) ? recall.at({"infercut", i}) : 0.0;
    const double rnd = recall.count({"random", i}) ? recall.at({"random", i}) : 0.0;
    const double ne = recall.count({"infercut-ne", i}) ? recall.at({"infercut-ne", i}) : 0.0;
    if (ic - rnd < 0.10) margins = false;
    d << "k=" << i << " infercut " << ic << " random " << rnd << " no-exposure " << ne << "; ";
  }
  const double ic2 = recall.count({"infercut", 2}) ? recall.at({"infercut", 2}) : 0.0;
  const double ne2 = recall.count({"infercut-ne", 2}) ? recall.at({"infercut-ne", 2}) : 0.0;
  const bool exposure_helps = ic2 >= ne2;
  d << "runtime " << std::setprecision(1) << secs << " s";
  report(7, margins && exposure_helps && secs < 1200.0,
         "InferCut beats random by 0.10 at intervals 2-5 and matches no-exposure at interval 2", d.str());
}

void criterion_8(const mc::ExperimentReport& rep) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& r : rep.records) {
    if (r.experiment != "sweep_m" || r.status != mc::RecordStatus::scored) continue;
    acc[r.m].first += r.eval.recall;
    ++acc[r.m].second;
  }
  std::vector<double> curve;
  std::ostringstream d;
  d << std::fixed << std::setprecision(4);
  for (const auto& [m, a] : acc) {
    curve.push_back(a.second ? a.first / static_cast<double>(a.second) : 0.0);
    d << "m=" << m << ":" << curve.back() << " ";
  }
  // Non-decreasing up to the peak, then within 0.03 of it.
  bool ok = curve.size() == 5;
  if (ok) {
    const auto peak = static_cast<std::size_t>(std::max_element(curve.begin(), curve.end()) - curve.begin());
    for (std::size_t i = 1; i <= peak; ++i)
      if (curve[i] < curve[i - 1] - 0.03) ok = false;
    for (std::size_t i = peak; i < curve.size(); ++i)
      if (curve[peak] - curve[i] > 0.03) ok = false;
  }
  report(8, ok, "recall rises then saturates in m", d.str(), true);
}

void criterion_9(const mc::ExperimentReport& rep) {
  std::size_t eligible = 0, unequal = 0;
  for (const auto& r : rep.records) {
    if (r.status != mc::RecordStatus::scored || r.eval.predicted_edges != r.eval.truth_edges) continue;
    ++eligible;
    if (r.eval.precision != r.eval.recall) ++unequal;
  }
  std::ostringstream d;
  d << eligible << " fully covered evaluations, " << unequal << " with precision != recall";
  report(9, eligible > 0 && unequal == 0, "precision equals recall under one prediction per target", d.str());
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MOTIFCASCADE_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_10(const fs::path& root) {
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string synth = " --n-nodes 300 --n-cascades 12 --min-size 60 --seed 5";
  std::size_t commands = 0, failures = 0;
  std::vector<std::string> differing;
  for (int pass = 0; pass < 2; ++pass) {
    const auto dir = root / ("run" + std::to_string(pass));
    fs::create_directories(dir);
    auto p = [&](const std::string& rel) { return (dir / rel).string(); };
    const std::string data = " --edges " + p("data/edges.tsv") + " --cascades " + p("data/cascades.tsv");
    const std::vector<std::string> steps{
        "synth --out " + p("data") + synth,
        "ingest" + data + " --out " + p("ingested"),
        "partition" + data + " --window-size 10 --out " + p("subs.tsv"),
        "motifs" + data + " --window-size 10 --out " + p("exposures.tsv"),
        "train" + data + " --max-iters 50 --out " + p("cp.json") + " --trace " + p("trace.csv"),
        "infer --checkpoint " + p("cp.json") + data + " --method all --intervals 1 2 3 4 5 --out " + p("pred.tsv"),
        "eval --predictions " + p("pred.tsv") + data + " --checkpoint " + p("cp.json") + " --out " + p("metrics.json"),
        "all --out-dir " + p("exp") + synth + " --max-iters 50",
        "report --dir " + p("exp"),
    };
    for (const auto& s : steps) {
      ++commands;
      if (run_cli(s, dir / "log.txt") != 0) ++failures;
    }
  }
  // Compare every file of the two runs, byte for byte.
  std::size_t files = 0;
  const auto a = root / "run0", b = root / "run1";
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "log.txt") continue;
    const auto rel = fs::relative(e.path(), a);
    ++files;
    if (rel == "exp/report.json") {
      // The resolved config records its own output directory.
      auto ja = nlohmann::json::parse(slurp(e.path())), jb = nlohmann::json::parse(slurp(b / rel));
      for (auto* j : {&ja, &jb}) {
        j->erase("config");
        j->erase("config_hash");
      }
      if (ja != jb) differing.push_back(rel.string());
      continue;
    }
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) differing.push_back(rel.string());
  }
  std::ostringstream d;
  d << commands << " commands (" << failures << " nonzero exits), " << files << " files compared, "
    << differing.size() << " differ";
  for (const auto& f : differing) d << " " << f;
  report(10, failures == 0 && differing.empty() && files > 0, "subcommands are byte-for-byte deterministic", d.str());
}

}  // namespace

int main() {
  std::cout << std::setprecision(6);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_5();
  criterion_6();

  // Default synthetic corpus: 2000 nodes, 200 cascades of at least 300.
  const fs::path exp_dir = fs::absolute("acceptance_out/default");
  mc::ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.synth.seed = 1;
  cfg.window_size = 10;
  cfg.intervals = {2, 3, 4, 5};
  cfg.centralities = {mc::CentralityKind::degree};
  cfg.out_dir = exp_dir.string();
  const auto t0 = Clock::now();
  std::optional<mc::ExperimentReport> rep;
  try {
    rep = mc::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cout << "experiment failed: " << e.what() << std::endl;
  }
  const double secs = seconds_since(t0);
  if (rep) {
    criterion_4(exp_dir);
    criterion_7(*rep, secs);
    criterion_8(*rep);
    criterion_9(*rep);
  } else {
    for (int id : {4, 7, 9}) report(id, false, "default experiment", "did not complete");
    report(8, false, "default experiment", "did not complete", true);
  }
  criterion_10(fs::absolute("acceptance_out/cli"));

  std::cout << (hard_failures ? "acceptance: " + std::to_string(hard_failures) + " hard criteria failed"
                              : std::string("acceptance: all hard criteria passed"))
            << std::endl;
  return hard_failures ? 1 : 0;
}
