#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "motifcascade/cascade.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/checkpoint.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/exposure.hpp"
#include "motifcascade/graph.hpp"
#include "motifcascade/infer.hpp"
#include "motifcascade/motif.hpp"
#include "motifcascade/parallel.hpp"
#include "motifcascade/synth.hpp"
#include "motifcascade/temporal.hpp"
#include "motifcascade/text.hpp"
#include "motifcascade/trainer.hpp"

namespace motifcascade {

namespace fs = std::filesystem;

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string out_dir = "out";
  // data source: files when both paths are set, else the generator
  std::string edges_path;
  std::string cascades_path;
  SynthConfig synth;
  std::size_t window_size = 10;
  double threshold = kDefaultGateThreshold;
  PatternSet patterns = default_patterns();
  TrainConfig train;
  CentralityKind centrality = CentralityKind::degree;
  std::vector<std::size_t> intervals{2, 3, 4, 5};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::optional<double> t_thresh;
  double t_thresh_percentile = 0.95;
  AlphaConvention convention = AlphaConvention::model;
  ContagionParams contagion;
  double train_fraction = 0.75;
  std::vector<CentralityKind> centralities{CentralityKind::degree, CentralityKind::betweenness,
                                           CentralityKind::pagerank};
  std::vector<double> sweep_values{1, 3, 5, 7, 9};

  bool uses_files() const { return !edges_path.empty() || !cascades_path.empty(); }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw ConfigError("config: section '" + std::string(section) + "' must be an object");
  for (const auto& [k, v] : j.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError("config: unknown key '" + std::string(section) + "." + k + "'");
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using detail::check_keys;
  ExperimentConfig c;
  try {
    check_keys(j, "<root>", {"seed", "workers", "out_dir", "data", "synth", "partition", "motifs", "train", "infer", "eval"});
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out_dir", c.out_dir);
    if (j.contains("data") && j.contains("synth")) throw ConfigError("config: give either 'data' or 'synth', not both");
    if (j.contains("data")) {
      const auto& d = j["data"];
      check_keys(d, "data", {"edges", "cascades"});
      c.edges_path = d.at("edges").get<std::string>();
      c.cascades_path = d.at("cascades").get<std::string>();
    }
    c.synth.seed = c.seed;
    if (j.contains("synth")) {
      check_keys(j["synth"], "synth",
                 {"n_nodes", "attachment", "reciprocity", "n_cascades", "min_cascade_size", "max_cascade_size",
                  "n_history_cascades", "history_cascade_size", "true_lambda", "true_beta", "exposure_boost",
                  "transmission", "planted_centrality", "resample_budget", "seed"});
      from_json(j["synth"], c.synth);
    }
    if (j.contains("partition")) {
      check_keys(j["partition"], "partition", {"window_size"});
      c.window_size = j["partition"].value("window_size", c.window_size);
    }
    if (j.contains("motifs")) {
      const auto& m = j["motifs"];
      check_keys(m, "motifs", {"threshold", "patterns"});
      c.threshold = m.value("threshold", c.threshold);
      if (m.contains("patterns")) c.patterns = parse_patterns(m["patterns"]);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      check_keys(t, "train", {"n", "m", "gamma_lambda", "gamma_beta", "max_iters", "tol", "centrality", "init",
                              "initial_lambda", "initial_beta"});
      c.train.weights.n = t.value("n", c.train.weights.n);
      c.train.weights.m = t.value("m", c.train.weights.m);
      c.train.weights.gamma_lambda = t.value("gamma_lambda", c.train.weights.gamma_lambda);
      c.train.weights.gamma_beta = t.value("gamma_beta", c.train.weights.gamma_beta);
      c.train.max_outer_iters = t.value("max_iters", c.train.max_outer_iters);
      c.train.outer_tol = t.value("tol", c.train.outer_tol);
      c.train.initial_lambda = t.value("initial_lambda", c.train.initial_lambda);
      c.train.initial_beta = t.value("initial_beta", c.train.initial_beta);
      c.centrality = parse_centrality_kind(t.value("centrality", std::string(to_string(c.centrality))));
      const auto init = t.value("init", std::string("decomposition"));
      if (init != "decomposition" && init != "random") throw ConfigError("config: train.init must be decomposition or random");
      c.train.init = init == "random" ? InitRule::random : InitRule::decomposition;
    }
    if (j.contains("infer")) {
      const auto& i = j["infer"];
      check_keys(i, "infer", {"intervals", "methods", "t_thresh", "t_thresh_percentile", "convention", "cc_slope",
                              "cc_intercept"});
      if (i.contains("intervals")) c.intervals = i["intervals"].get<std::vector<std::size_t>>();
      if (i.contains("methods")) {
        c.methods.clear();
        for (const auto& m : i["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
      }
      if (i.contains("t_thresh") && !i["t_thresh"].is_null()) c.t_thresh = i["t_thresh"].get<double>();
      c.t_thresh_percentile = i.value("t_thresh_percentile", c.t_thresh_percentile);
      const auto conv = i.value("convention", std::string("model"));
      if (conv != "model" && conv != "literal") throw ConfigError("config: infer.convention must be model or literal");
      c.convention = conv == "literal" ? AlphaConvention::literal : AlphaConvention::model;
      c.contagion.slope = i.value("cc_slope", c.contagion.slope);
      c.contagion.intercept = i.value("cc_intercept", c.contagion.intercept);
    }
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      check_keys(e, "eval", {"train_fraction", "centralities", "sweep_values"});
      c.train_fraction = e.value("train_fraction", c.train_fraction);
      if (e.contains("centralities")) {
        c.centralities.clear();
        for (const auto& k : e["centralities"]) c.centralities.push_back(parse_centrality_kind(k.get<std::string>()));
      }
      if (e.contains("sweep_values")) c.sweep_values = e["sweep_values"].get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (c.uses_files() && (c.edges_path.empty() || c.cascades_path.empty()))
    throw ConfigError("config: data needs both edges and cascades");
  if (c.window_size < 2) throw ConfigError("config: window_size must be at least 2");
  if (!(c.threshold > 0.0)) throw ConfigError("config: motifs.threshold must be positive");
  if (!c.uses_files()) {
    c.synth.validate();
    if (c.synth.min_cascade_size < 2 * c.window_size)
      throw ConfigError("config: synth.min_cascade_size must be at least twice the window size");
  }
  if (c.intervals.empty()) throw ConfigError("config: infer.intervals is empty");
  for (auto i : c.intervals)
    if (i < 1) throw ConfigError("config: intervals start at 1");
  if (c.methods.empty()) throw ConfigError("config: infer.methods is empty");
  if (c.t_thresh && !(*c.t_thresh > 0.0)) throw ConfigError("config: t_thresh must be positive");
  if (!(c.t_thresh_percentile > 0.0 && c.t_thresh_percentile <= 1.0))
    throw ConfigError("config: t_thresh_percentile must lie in (0, 1]");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) throw ConfigError("config: train_fraction must lie in (0, 1)");
  for (double v : c.sweep_values)
    if (!(v >= 0.0)) throw ConfigError("config: sweep values must be non-negative");
  return c;
}

// Fully resolved configuration; its hash tags every report cell.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  if (c.uses_files()) {
    j["data"] = {{"edges", c.edges_path}, {"cascades", c.cascades_path}};
  } else {
    const auto synth = to_json_value(c.synth);
    nlohmann::ordered_json s;
    for (const auto& [k, v] : synth.items()) s[k] = v;
    j["synth"] = s;
  }
  j["partition"] = {{"window_size", c.window_size}};
  j["motifs"] = {{"threshold", c.threshold}, {"patterns", patterns_to_json(c.patterns)}};
  j["train"] = {{"n", c.train.weights.n},
                {"m", c.train.weights.m},
                {"gamma_lambda", c.train.weights.gamma_lambda},
                {"gamma_beta", c.train.weights.gamma_beta},
                {"max_iters", c.train.max_outer_iters},
                {"tol", c.train.outer_tol},
                {"centrality", std::string(to_string(c.centrality))},
                {"init", c.train.init == InitRule::random ? "random" : "decomposition"},
                {"initial_lambda", c.train.initial_lambda},
                {"initial_beta", c.train.initial_beta}};
  nlohmann::ordered_json methods = nlohmann::ordered_json::array();
  for (auto m : c.methods) methods.push_back(std::string(to_string(m)));
  j["infer"] = {{"intervals", c.intervals},
                {"methods", methods},
                {"t_thresh", c.t_thresh ? nlohmann::ordered_json(*c.t_thresh) : nlohmann::ordered_json()},
                {"t_thresh_percentile", c.t_thresh_percentile},
                {"convention", c.convention == AlphaConvention::literal ? "literal" : "model"},
                {"cc_slope", c.contagion.slope},
                {"cc_intercept", c.contagion.intercept}};
  nlohmann::ordered_json kinds = nlohmann::ordered_json::array();
  for (auto k : c.centralities) kinds.push_back(std::string(to_string(k)));
  j["eval"] = {{"train_fraction", c.train_fraction}, {"centralities", kinds}, {"sweep_values", c.sweep_values}};
  return j;
}

inline std::string config_hash(const ExperimentConfig& c) {
  auto j = config_to_json(c);
  j.erase("workers");  // results do not depend on it
  j.erase("out_dir");
  return hex64(Fnv1a().add(std::string_view(j.dump())).value());
}

inline nlohmann::json load_json_file(const fs::path& path) {
  auto text = read_file(path);
  if (!text) throw ConfigError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(*text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Data

struct Dataset {
  NodeDictionary dict;
  std::vector<EdgeRecord> records;
  HistoricalGraph graph;
  std::vector<Cascade> cascades;
  GraphIngestStats ingest;
};

inline Dataset read_dataset(const fs::path& edges, const fs::path& cascades) {
  Dataset d;
  std::ifstream ein(edges);
  if (!ein) throw DataError("cannot open edges file " + edges.string());
  d.records = read_edge_records(ein, d.dict);
  std::ifstream cin(cascades);
  if (!cin) throw DataError("cannot open cascades file " + cascades.string());
  d.cascades = read_cascades(cin, d.dict);
  d.graph = build_historical_graph(d.records, d.dict.size(), &d.ingest);
  return d;
}

inline Dataset synthetic_dataset(const SynthConfig& cfg) {
  auto s = generate_synthetic(cfg);
  Dataset d;
  d.dict = std::move(s.dict);
  d.records = std::move(s.records);
  d.graph = build_historical_graph(d.records, d.dict.size(), &d.ingest);
  d.cascades = std::move(s.cascades);
  return d;
}

inline std::string edges_text(const Dataset& d) {
  std::ostringstream out;
  write_edge_records(out, d.records, d.dict);
  return out.str();
}

inline std::string cascades_text(const std::vector<Cascade>& cascades, const NodeDictionary& dict) {
  std::ostringstream out;
  write_cascades(out, cascades, dict);
  return out.str();
}

struct Split {
  std::vector<std::size_t> train;  // ascending corpus indices
  std::vector<std::size_t> test;
};

inline Split split_corpus(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (n < 2) throw DataError("need at least two cascades to split into train and test");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(Fnv1a().add(seed).add(std::string_view("split")).value());
  std::shuffle(order.begin(), order.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline std::vector<Cascade> select(const std::vector<Cascade>& all, const std::vector<std::size_t>& idx) {
  std::vector<Cascade> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Raw records and the tables derived from them

enum class RecordStatus { scored, excluded, skipped };

inline std::string_view to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::scored: return "scored";
    case RecordStatus::excluded: return "excluded";
    case RecordStatus::skipped: return "skipped";
  }
  return "scored";
}

struct RawRecord {
  std::string experiment;  // main | centrality | sweep_n | sweep_m
  CentralityKind centrality = CentralityKind::degree;
  double n = 0.0;
  double m = 0.0;
  Method method = Method::infercut;
  std::size_t interval = 0;
  std::string cascade_id;
  RecordStatus status = RecordStatus::scored;
  Evaluation eval;
};

inline void write_raw_records(std::ostream& out, const std::vector<RawRecord>& records) {
  out << "experiment\tcentrality\tn\tm\tmethod\tinterval\tcascade_id\tstatus\tprecision\trecall\ttruth_edges\t"
         "predicted_edges\thits\n";
  for (const auto& r : records)
    out << r.experiment << '\t' << to_string(r.centrality) << '\t' << format_double(r.n) << '\t'
        << format_double(r.m) << '\t' << to_string(r.method) << '\t' << r.interval << '\t' << r.cascade_id
        << '\t' << to_string(r.status) << '\t' << format_double(r.eval.precision) << '\t'
        << format_double(r.eval.recall) << '\t' << r.eval.truth_edges << '\t' << r.eval.predicted_edges << '\t'
        << r.eval.hits << '\n';
}

inline std::vector<RawRecord> read_raw_records(std::istream& in) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  auto num = [&](const std::string& s) {
    auto v = parse_double(s);
    if (!v) throw IngestionError(lineno, "bad number '" + s + "'");
    return *v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 13) throw IngestionError(lineno, "expected 13 columns");
    RawRecord r;
    r.experiment = f[0];
    r.centrality = parse_centrality_kind(f[1]);
    r.n = num(f[2]);
    r.m = num(f[3]);
    r.method = parse_method(f[4]);
    r.interval = static_cast<std::size_t>(num(f[5]));
    r.cascade_id = f[6];
    if (f[7] == "scored") r.status = RecordStatus::scored;
    else if (f[7] == "excluded") r.status = RecordStatus::excluded;
    else if (f[7] == "skipped") r.status = RecordStatus::skipped;
    else throw IngestionError(lineno, "bad status '" + f[7] + "'");
    r.eval.precision = num(f[8]);
    r.eval.recall = num(f[9]);
    r.eval.truth_edges = static_cast<std::size_t>(num(f[10]));
    r.eval.predicted_edges = static_cast<std::size_t>(num(f[11]));
    r.eval.hits = static_cast<std::size_t>(num(f[12]));
    r.eval.excluded = r.status == RecordStatus::excluded;
    out.push_back(std::move(r));
  }
  return out;
}

inline void add_record(MetricCell& cell, const RawRecord& r) {
  if (r.status == RecordStatus::skipped) ++cell.skipped;
  else cell.add(r.eval);
}

struct FigureTables {
  std::string fig6a;
  std::string fig6b;
  std::string fig7a;
  std::string fig7b;
  nlohmann::ordered_json json;
};

namespace detail {

inline std::string cell_columns(const MetricCell& c) {
  return format_double(c.recall()) + ',' + format_double(c.precision()) + ',' + std::to_string(c.cascades) + ',' +
         std::to_string(c.edges) + ',' + std::to_string(c.excluded) + ',' + std::to_string(c.skipped);
}

inline nlohmann::ordered_json cell_json(const MetricCell& c) {
  return {{"recall", c.recall()},       {"precision", c.precision()}, {"n_cascades", c.cascades},
          {"n_edges", c.edges},         {"excluded", c.excluded},     {"skipped", c.skipped}};
}

// One sweep table: a row per swept value, a recall column per interval and
// the mean over every scored record of the row.
inline std::string sweep_table(const std::vector<RawRecord>& records, std::string_view experiment, bool by_n,
                               nlohmann::ordered_json& json) {
  std::set<std::size_t> intervals;
  std::map<double, std::map<std::size_t, MetricCell>> cells;
  std::map<double, MetricCell> pooled;
  std::map<double, double> other;
  for (const auto& r : records) {
    if (r.experiment != experiment) continue;
    const double key = by_n ? r.n : r.m;
    intervals.insert(r.interval);
    add_record(cells[key][r.interval], r);
    add_record(pooled[key], r);
    other[key] = by_n ? r.m : r.n;
  }
  std::string out = by_n ? "n,m" : "m,n";
  for (auto i : intervals) out += ",recall_interval_" + std::to_string(i);
  out += ",recall_mean,n_records\n";
  json = nlohmann::ordered_json::array();
  for (const auto& [key, row] : cells) {
    out += format_double(key) + ',' + format_double(other[key]);
    nlohmann::ordered_json jr;
    jr[by_n ? "n" : "m"] = key;
    jr[by_n ? "m" : "n"] = other[key];
    for (auto i : intervals) {
      auto it = row.find(i);
      const double rc = it == row.end() ? 0.0 : it->second.recall();
      out += ',' + format_double(rc);
      jr["recall_by_interval"][std::to_string(i)] = rc;
    }
    out += ',' + format_double(pooled[key].recall()) + ',' + std::to_string(pooled[key].cascades) + '\n';
    jr["recall_mean"] = pooled[key].recall();
    jr["n_records"] = pooled[key].cascades;
    json.push_back(jr);
  }
  return out;
}

}  // namespace detail

// Every cell is the unweighted mean of its scored raw records.
inline FigureTables build_tables(const std::vector<RawRecord>& records) {
  FigureTables t;
  std::map<std::pair<int, std::size_t>, MetricCell> fig6a;
  std::map<std::pair<int, std::size_t>, MetricCell> fig6b;
  for (const auto& r : records) {
    if (r.experiment == "main") add_record(fig6a[{static_cast<int>(r.method), r.interval}], r);
    if (r.experiment == "centrality") add_record(fig6b[{static_cast<int>(r.centrality), r.interval}], r);
  }
  t.fig6a = "method,interval,recall,precision,n_cascades,n_edges,excluded,skipped\n";
  t.json["fig6a"] = nlohmann::ordered_json::array();
  for (const auto& [key, cell] : fig6a) {
    const auto method = std::string(to_string(static_cast<Method>(key.first)));
    t.fig6a += method + ',' + std::to_string(key.second) + ',' + detail::cell_columns(cell) + '\n';
    auto j = detail::cell_json(cell);
    j["method"] = method;
    j["interval"] = key.second;
    t.json["fig6a"].push_back(j);
  }
  t.fig6b = "centrality,interval,recall,precision,n_cascades,n_edges,excluded,skipped\n";
  t.json["fig6b"] = nlohmann::ordered_json::array();
  for (const auto& [key, cell] : fig6b) {
    const auto kind = std::string(to_string(static_cast<CentralityKind>(key.first)));
    t.fig6b += kind + ',' + std::to_string(key.second) + ',' + detail::cell_columns(cell) + '\n';
    auto j = detail::cell_json(cell);
    j["centrality"] = kind;
    j["interval"] = key.second;
    t.json["fig6b"].push_back(j);
  }
  t.fig7a = detail::sweep_table(records, "sweep_n", true, t.json["fig7a"]);
  t.fig7b = detail::sweep_table(records, "sweep_m", false, t.json["fig7b"]);
  return t;
}

// ---------------------------------------------------------------------------
// A_{v2u} of exposure members versus the other earlier in-neighbours.

struct Av2uHistogram {
  static constexpr std::size_t kBins = 11;  // 0..9 and 10+
  std::array<std::size_t, kBins> exposure{};
  std::array<std::size_t, kBins> other{};
  double exposure_sum = 0.0;
  double other_sum = 0.0;

  static std::size_t bin(std::uint32_t a) { return std::min<std::size_t>(a, kBins - 1); }
  std::size_t exposure_total() const { return std::accumulate(exposure.begin(), exposure.end(), std::size_t{0}); }
  std::size_t other_total() const { return std::accumulate(other.begin(), other.end(), std::size_t{0}); }
};

inline Av2uHistogram av2u_histogram(std::span<const Cascade> corpus, std::span<const ExposureMap> exposures,
                                    const HistoricalGraph& g) {
  Av2uHistogram h;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    const auto& c = corpus[ci];
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& a = c[i];
      auto it = exposures[ci].find(a.node);
      if (it == exposures[ci].end() || it->second.parent_outside_window) continue;
      const auto& members = it->second.members;
      for (NodeId u : g.in_neighbors(a.node)) {
        if (!c.contains(u) || c.position(u) >= i || u == *a.parent) continue;
        const auto count = compute_a_v2u(g, u, a.node);
        if (std::binary_search(members.begin(), members.end(), u)) {
          ++h.exposure[Av2uHistogram::bin(count)];
          h.exposure_sum += count;
        } else {
          ++h.other[Av2uHistogram::bin(count)];
          h.other_sum += count;
        }
      }
    }
  }
  return h;
}

inline std::string av2u_csv(const Av2uHistogram& h) {
  std::string out = "group,a_v2u,count,fraction\n";
  auto rows = [&](std::string_view group, const auto& bins, std::size_t total) {
    for (std::size_t b = 0; b < Av2uHistogram::kBins; ++b) {
      const std::string label = b + 1 == Av2uHistogram::kBins ? std::to_string(b) + "+" : std::to_string(b);
      const double frac = total ? static_cast<double>(bins[b]) / static_cast<double>(total) : 0.0;
      out += std::string(group) + ',' + label + ',' + std::to_string(bins[b]) + ',' + format_double(frac) + '\n';
    }
  };
  rows("exposure", h.exposure, h.exposure_total());
  rows("non_exposure", h.other, h.other_total());
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct StageFailure : Error {
  StageFailure(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage(std::move(stage)) {}
  std::string stage;
};

struct ExperimentReport {
  nlohmann::ordered_json json;
  FigureTables tables;
  std::vector<RawRecord> records;
  std::vector<fs::path> written;  // files whose bytes changed this run
};

struct ModelKey {
  CentralityKind centrality;
  double n;
  double m;
  auto operator<=>(const ModelKey&) const = default;
};

struct TrainedModel {
  Checkpoint checkpoint;
  bool resumed = false;
};

class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)), out_(cfg_.out_dir) {}

  ExperimentReport run() {
    workers_ = resolve_workers(cfg_.workers);
    report_.json["status"] = "running";
    report_.json["failed_stage"] = nullptr;
    report_.json["error"] = nullptr;
    report_.json["seed"] = cfg_.seed;
    report_.json["config_hash"] = config_hash(cfg_);
    report_.json["config"] = config_to_json(cfg_);
    try {
      stage("data", [&] { load_data(); });
      stage("partition", [&] { partition(); });
      stage("motifs", [&] { motifs(); });
      stage("train", [&] { train_main(); });
      stage("infer", [&] { infer_main(); });
      stage("centrality", [&] { centrality_series(); });
      stage("sweep", [&] { sweeps(); });
      stage("report", [&] { emit(); });
    } catch (const StageFailure& f) {
      report_.json["status"] = "failed";
      report_.json["failed_stage"] = f.stage;
      report_.json["error"] = f.what();
      write("report.json", report_.json.dump(1) + "\n");
      throw;
    }
    return std::move(report_);
  }

 private:
  template <typename F>
  void stage(const std::string& name, F&& fn) {
    try {
      fn();
    } catch (const StageFailure&) {
      throw;
    } catch (const Error& e) {
      throw StageFailure(name, e);
    } catch (const std::exception& e) {
      throw StageFailure(name, NumericalError(e.what()));
    }
  }

  void write(const fs::path& rel, const std::string& content) {
    const auto path = out_ / rel;
    if (write_if_changed(path, content)) report_.written.push_back(path);
  }

  void load_data() {
    if (cfg_.uses_files()) {
      data_ = read_dataset(cfg_.edges_path, cfg_.cascades_path);
    } else {
      data_ = synthetic_dataset(cfg_.synth);
      write("data/edges.tsv", edges_text(data_));
      write("data/cascades.tsv", cascades_text(data_.cascades, data_.dict));
    }
    split_ = split_corpus(data_.cascades.size(), cfg_.train_fraction, cfg_.seed);
    train_ = select(data_.cascades, split_.train);
    test_ = select(data_.cascades, split_.test);
    std::string split_text = "cascade_id\tpartition\n";
    for (auto i : split_.train) split_text += data_.cascades[i].id() + "\ttrain\n";
    for (auto i : split_.test) split_text += data_.cascades[i].id() + "\ttest\n";
    write("split.tsv", split_text);
    corpus_hash_ = corpus_hash(train_, data_.graph);
    report_.json["data"] = {{"nodes", data_.graph.node_count()},
                            {"edges", data_.graph.edge_count()},
                            {"self_loops_dropped", data_.ingest.skipped_self_loops},
                            {"cascades", data_.cascades.size()},
                            {"train_cascades", train_.size()},
                            {"test_cascades", test_.size()},
                            {"train_corpus_hash", corpus_hash_}};
  }

  void partition() {
    for (const auto* set : {&train_, &test_})
      for (const auto& c : *set)
        if (c.size() < 2 * cfg_.window_size)
          throw CascadeTooShort("cascade " + c.id() + " has " + std::to_string(c.size()) +
                                " activations, fewer than twice the window size");
    test_aug_.resize(test_.size());
    test_subs_.resize(test_.size());
    parallel_for(test_.size(), workers_, [&](std::size_t i) {
      test_aug_[i] = augment_cascade(test_[i], data_.graph);
      test_subs_[i] = partition_cascade(test_[i], cfg_.window_size);
    });
    std::size_t total = 0;
    for (const auto& s : test_subs_) total += s.size();
    report_.json["partition"] = {{"window_size", cfg_.window_size}, {"test_subsequences", total}};
  }

  void motifs() {
    exposures_.resize(train_.size());
    std::vector<ExposureStats> stats(train_.size());
    parallel_for(train_.size(), workers_, [&](std::size_t i) {
      exposures_[i] = compute_cascade_exposures(train_[i], data_.graph, cfg_.window_size, cfg_.patterns,
                                                cfg_.threshold, &stats[i]);
    });
    ExposureStats total;
    std::ostringstream dump;
    dump << "cascade_id\ttarget\tmember\tdelta\n";
    for (std::size_t i = 0; i < train_.size(); ++i) {
      total.targets += stats[i].targets;
      total.parent_outside_window += stats[i].parent_outside_window;
      total.nonempty += stats[i].nonempty;
      write_exposure_dump(dump, train_[i], exposures_[i], data_.dict);
    }
    write("exposures.tsv", dump.str());
    const auto hist = av2u_histogram(train_, exposures_, data_.graph);
    write("fig5.csv", av2u_csv(hist));
    auto mean = [](double s, std::size_t n) { return n ? s / static_cast<double>(n) : 0.0; };
    report_.json["exposure"] = {{"targets", total.targets},
                                {"parent_outside_window", total.parent_outside_window},
                                {"nonempty_sets", total.nonempty},
                                {"threshold", cfg_.threshold},
                                {"patterns", cfg_.patterns.size()}};
    report_.json["fig5"] = {{"exposure_pairs", hist.exposure_total()},
                            {"exposure_mean_a_v2u", mean(hist.exposure_sum, hist.exposure_total())},
                            {"non_exposure_pairs", hist.other_total()},
                            {"non_exposure_mean_a_v2u", mean(hist.other_sum, hist.other_total())}};
    t_thresh_ = cfg_.t_thresh ? *cfg_.t_thresh : parent_gap_percentile(train_, cfg_.t_thresh_percentile);
    report_.json["t_thresh"] = t_thresh_;
  }

  const CentralityVector& attributes(CentralityKind kind) {
    auto it = attributes_.find(kind);
    if (it == attributes_.end())
      it = attributes_.emplace(kind, normalize_centrality(compute_centrality(data_.graph, kind))).first;
    return it->second;
  }

  const LikelihoodStatistics& statistics(CentralityKind kind) {
    auto it = statistics_.find(kind);
    if (it == statistics_.end()) it = statistics_.emplace(kind, compile_statistics(train_, exposures_, attributes(kind))).first;
    return it->second;
  }

  std::string input_hash(const ModelKey& key, const TrainConfig& tc) const {
    Fnv1a h;
    h.add(std::string_view(corpus_hash_))
        .add(static_cast<std::uint64_t>(cfg_.window_size))
        .add(cfg_.threshold)
        .add(std::string_view(patterns_to_json(cfg_.patterns).dump()))
        .add(std::string_view(to_string(key.centrality)))
        .add(tc.weights.n)
        .add(tc.weights.m)
        .add(tc.weights.gamma_lambda)
        .add(tc.weights.gamma_beta)
        .add(static_cast<std::uint64_t>(tc.max_outer_iters))
        .add(tc.outer_tol)
        .add(static_cast<std::uint64_t>(tc.init))
        .add(tc.initial_lambda)
        .add(tc.initial_beta)
        .add(tc.seed);
    return hex64(h.value());
  }

  static std::string model_tag(const ModelKey& k) {
    return std::string(to_string(k.centrality)) + "_n" + format_double(k.n) + "_m" + format_double(k.m);
  }

  // Trains (or resumes) the model for `key`; files land under `stem`.
  const TrainedModel& model(const ModelKey& key, const fs::path& checkpoint_path, const fs::path& trace_path) {
    if (auto it = models_.find(key); it != models_.end()) return it->second;
    TrainConfig tc = cfg_.train;
    tc.weights.n = key.n;
    tc.weights.m = key.m;
    tc.seed = cfg_.seed;
    const auto hash = input_hash(key, tc);
    TrainedModel tm;
    if (auto text = read_file(out_ / checkpoint_path)) {
      try {
        auto cp = checkpoint_from_json(nlohmann::json::parse(*text), data_.dict);
        if (cp.input_hash == hash) {
          tm.checkpoint = std::move(cp);
          tm.resumed = true;
        }
      } catch (const std::exception&) {
        // stale or foreign checkpoint: retrain
      }
    }
    if (!tm.resumed) {
      Trainer trainer(statistics(key.centrality), tc);
      const auto trace = trainer.fit();
      tm.checkpoint = make_checkpoint(trainer, trace, tc);
      tm.checkpoint.centrality = key.centrality;
      tm.checkpoint.corpus_hash = corpus_hash_;
      tm.checkpoint.input_hash = hash;
      tm.checkpoint.window_size = cfg_.window_size;
      tm.checkpoint.threshold = cfg_.threshold;
      tm.checkpoint.t_thresh = t_thresh_;
      std::ostringstream trace_csv;
      write_trace_csv(trace_csv, trace, false);
      write(trace_path, trace_csv.str());
      write(checkpoint_path, checkpoint_text(tm.checkpoint, data_.dict));
    }
    report_.json["models"].push_back({{"tag", model_tag(key)},
                                      {"centrality", std::string(to_string(key.centrality))},
                                      {"n", key.n},
                                      {"m", key.m},
                                      {"lambda", tm.checkpoint.lambda},
                                      {"beta", tm.checkpoint.beta},
                                      {"converged", tm.checkpoint.converged},
                                      {"iterations", tm.checkpoint.iterations}});
    return models_.emplace(key, std::move(tm)).first->second;
  }

  const TrainedModel& sweep_model(const ModelKey& key) {
    const auto tag = model_tag(key);
    return model(key, fs::path("checkpoints") / (tag + ".json"), fs::path("checkpoints") / (tag + ".trace.csv"));
  }

  ModelKey main_key() const { return {cfg_.centrality, cfg_.train.weights.n, cfg_.train.weights.m}; }

  void train_main() {
    report_.json["models"] = nlohmann::ordered_json::array();
    model(main_key(), "checkpoint.json", "trace.csv");
  }

  struct Outcome {
    RawRecord record;
    CutEdgeSet predicted;
  };

  // Runs `methods` with the given model over every test cascade and interval.
  std::vector<Outcome> evaluate_model(const std::string& experiment, const ModelKey& key, const Checkpoint& cp,
                                      std::span<const Method> methods) {
    const InferenceModel im{cp.lambda, cp.beta, &attributes(key.centrality), cfg_.convention};
    const MethodContext ctx{&im, &data_.graph, cfg_.contagion, cfg_.seed};
    const std::size_t per_cascade = methods.size() * cfg_.intervals.size();
    std::vector<Outcome> out(test_.size() * per_cascade);
    parallel_for(test_.size(), workers_, [&](std::size_t ci) {
      const auto& c = test_[ci];
      std::size_t slot = ci * per_cascade;
      for (auto interval : cfg_.intervals) {
        const bool exists = interval < test_subs_[ci].size();
        std::optional<InferenceTask> task;
        if (exists) task = make_inference_task(c, test_aug_[ci], test_subs_[ci], interval, t_thresh_);
        for (auto m : methods) {
          auto& o = out[slot++];
          o.record = {experiment, key.centrality, key.n, key.m, m, interval, c.id(), RecordStatus::skipped, {}};
          if (!exists) continue;
          o.predicted = run_method(m, *task, ctx);
          o.record.eval = evaluate(o.predicted, c, *task);
          o.record.status = o.record.eval.excluded ? RecordStatus::excluded : RecordStatus::scored;
        }
      }
    });
    return out;
  }

  void infer_main() {
    const auto key = main_key();
    const auto outcomes = evaluate_model("main", key, models_.at(key).checkpoint, cfg_.methods);
    std::ostringstream preds;
    preds << "cascade_id\tinterval\tchild\tpredicted_parent\tscore\tmethod\n";
    for (const auto& o : outcomes) {
      report_.records.push_back(o.record);
      for (const auto& e : o.predicted.edges)
        preds << o.record.cascade_id << '\t' << o.record.interval << '\t' << data_.dict.label(e.child) << '\t'
              << data_.dict.label(e.parent) << '\t' << format_double(e.score) << '\t' << to_string(o.record.method)
              << '\n';
    }
    write("predictions.tsv", preds.str());
  }

  void run_series(const std::string& experiment, const ModelKey& key) {
    const std::array<Method, 1> infercut{Method::infercut};
    const auto& tm = key == main_key() ? models_.at(key) : sweep_model(key);
    for (auto& o : evaluate_model(experiment, key, tm.checkpoint, infercut)) report_.records.push_back(o.record);
  }

  void centrality_series() {
    for (auto kind : cfg_.centralities) run_series("centrality", {kind, cfg_.train.weights.n, cfg_.train.weights.m});
  }

  void sweeps() {
    for (double v : cfg_.sweep_values) run_series("sweep_n", {cfg_.centrality, v, cfg_.train.weights.m});
    for (double v : cfg_.sweep_values) run_series("sweep_m", {cfg_.centrality, cfg_.train.weights.n, v});
  }

  void emit() {
    std::ostringstream raw;
    write_raw_records(raw, report_.records);
    write("raw_records.tsv", raw.str());
    report_.tables = build_tables(report_.records);
    write("fig6a.csv", report_.tables.fig6a);
    write("fig6b.csv", report_.tables.fig6b);
    write("fig7a.csv", report_.tables.fig7a);
    write("fig7b.csv", report_.tables.fig7b);
    std::map<std::size_t, std::size_t> skipped;
    for (const auto& r : report_.records)
      if (r.experiment == "main" && r.status == RecordStatus::skipped && r.method == cfg_.methods.front())
        ++skipped[r.interval];
    report_.json["skipped_cascades_by_interval"] = nlohmann::ordered_json::object();
    for (auto i : cfg_.intervals) report_.json["skipped_cascades_by_interval"][std::to_string(i)] = skipped[i];
    report_.json["tables"] = report_.tables.json;
    report_.json["status"] = "complete";
    write("report.json", report_.json.dump(1) + "\n");
  }

  ExperimentConfig cfg_;
  fs::path out_;
  std::size_t workers_ = 1;
  ExperimentReport report_;
  Dataset data_;
  Split split_;
  std::vector<Cascade> train_;
  std::vector<Cascade> test_;
  std::vector<AugmentedCascadeGraph> test_aug_;
  std::vector<std::vector<Subsequence>> test_subs_;
  std::vector<ExposureMap> exposures_;
  std::string corpus_hash_;
  double t_thresh_ = 1.0;
  std::map<CentralityKind, CentralityVector> attributes_;
  std::map<CentralityKind, LikelihoodStatistics> statistics_;
  std::map<ModelKey, TrainedModel> models_;
};

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) { return ExperimentRunner(cfg).run(); }

}  // namespace motifcascade
