// motifcascade command line: data generation, the individual pipeline
// stages, and the full experiment.

#include <filesystem>
#include <functional>
#include <memory>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motifcascade/motifcascade.hpp"

namespace mc = motifcascade;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shadow config keys. Each registered flag writes its value into the
// config document at `section.key` (or `key` at the root) when given.
class Overrides {
 public:
  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& path, const std::string& help) {
    auto slot = std::make_shared<T>();
    auto* opt = app->add_option(flag, *slot, help);
    apply_.push_back([opt, slot, path](json& doc) {
      if (opt->count() == 0) return;
      auto dot = path.find('.');
      if (dot == std::string::npos) doc[path] = *slot;
      else doc[path.substr(0, dot)][path.substr(dot + 1)] = *slot;
    });
  }

  json resolve(const std::string& config_path) const {
    json doc = json::object();
    if (!config_path.empty()) doc = mc::load_json_file(config_path);
    for (const auto& f : apply_) f(doc);
    return doc;
  }

 private:
  std::vector<std::function<void(json&)>> apply_;
};

void add_model_flags(CLI::App* app, Overrides& o) {
  o.add<std::size_t>(app, "--window-size", "partition.window_size", "Subsequence length W");
  o.add<double>(app, "--threshold-th", "motifs.threshold", "AND-gate threshold");
  o.add<std::string>(app, "--centrality", "train.centrality", "degree | betweenness | pagerank");
  o.add<double>(app, "--n", "train.n", "Weight of the lambda block");
  o.add<double>(app, "--m", "train.m", "Weight of the beta block");
  o.add<double>(app, "--gamma-lambda", "train.gamma_lambda", "l1 weight on lambda");
  o.add<double>(app, "--gamma-beta", "train.gamma_beta", "l1 weight on beta");
  o.add<std::size_t>(app, "--max-iters", "train.max_iters", "Outer iteration cap");
  o.add<double>(app, "--tol", "train.tol", "Relative outer tolerance");
  o.add<std::uint64_t>(app, "--seed", "seed", "Global seed");
}

void add_synth_flags(CLI::App* app, Overrides& o) {
  o.add<std::size_t>(app, "--n-nodes", "synth.n_nodes", "Historical graph size");
  o.add<std::size_t>(app, "--n-cascades", "synth.n_cascades", "Cascades to generate");
  o.add<std::size_t>(app, "--min-size", "synth.min_cascade_size", "Reject cascades below this size");
  o.add<std::size_t>(app, "--max-size", "synth.max_cascade_size", "Simulation cap (0: twice the minimum)");
  o.add<double>(app, "--true-lambda", "synth.true_lambda", "Planted lambda");
  o.add<double>(app, "--true-beta", "synth.true_beta", "Planted exposure weight");
  o.add<double>(app, "--exposure-boost", "synth.exposure_boost", "Rate multiplier under co-exposure");
  o.add<std::string>(app, "--transmission", "synth.transmission", "rayleigh | exponential");
}

void write_or_print(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") std::cout << content;
  else mc::write_if_changed(path, content);
}

mc::Dataset load(const std::string& edges, const std::string& cascades) {
  if (edges.empty() || cascades.empty()) throw mc::ConfigError("--edges and --cascades are required");
  return mc::read_dataset(edges, cascades);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motif-pruned exposure cascade model: training, parent inference and experiments"};
  app.require_subcommand(1);
  std::string config_path, edges, cascades, out;

  // synth
  Overrides synth_o;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic historical graph and cascades");
  synth->add_option("--config", config_path, "Experiment config (JSON)");
  synth->add_option("--out", out, "Output directory")->required();
  synth_o.add<std::uint64_t>(synth, "--seed", "seed", "Global seed");
  add_synth_flags(synth, synth_o);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate edge and cascade files and write them normalized");
  ingest->add_option("--edges", edges, "Edge records TSV")->required();
  ingest->add_option("--cascades", cascades, "Cascade TSV")->required();
  ingest->add_option("--out", out, "Output directory")->required();

  // partition
  Overrides part_o;
  auto* part = app.add_subcommand("partition", "Split cascades into subsequences of W activations");
  part->add_option("--config", config_path, "Experiment config (JSON)");
  part->add_option("--edges", edges, "Edge records TSV")->required();
  part->add_option("--cascades", cascades, "Cascade TSV")->required();
  part->add_option("--out", out, "Subsequence TSV (default stdout)");
  part_o.add<std::size_t>(part, "--window-size", "partition.window_size", "Subsequence length W");

  // motifs
  Overrides motif_o;
  std::string patterns_path;
  auto* motifs = app.add_subcommand("motifs", "Enumerate size-3 motifs and extract exposure sets");
  motifs->add_option("--config", config_path, "Experiment config (JSON)");
  motifs->add_option("--edges", edges, "Edge records TSV")->required();
  motifs->add_option("--cascades", cascades, "Cascade TSV")->required();
  motifs->add_option("--patterns", patterns_path, "Pattern set JSON");
  motifs->add_option("--out", out, "Exposure TSV (default stdout)");
  motif_o.add<std::size_t>(motifs, "--window-size", "partition.window_size", "Subsequence length W");
  motif_o.add<double>(motifs, "--threshold-th", "motifs.threshold", "AND-gate threshold");

  // train
  Overrides train_o;
  std::string trace_path;
  bool timing = false;
  auto* train = app.add_subcommand("train", "Fit lambda, beta, A and Z on a cascade corpus");
  train->add_option("--config", config_path, "Experiment config (JSON)");
  train->add_option("--edges", edges, "Edge records TSV")->required();
  train->add_option("--cascades", cascades, "Training cascade TSV")->required();
  train->add_option("--out", out, "Checkpoint JSON")->required();
  train->add_option("--trace", trace_path, "Trace CSV");
  train->add_flag("--timing", timing, "Record wall-clock seconds in the trace");
  add_model_flags(train, train_o);

  // infer
  std::string checkpoint_path, method_name = "infercut";
  std::vector<std::size_t> intervals{2, 3, 4, 5};
  std::optional<double> t_thresh;
  std::uint64_t infer_seed = 1;
  std::string convention = "model";
  auto* infer = app.add_subcommand("infer", "Predict parents of each interval's nodes");
  infer->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON")->required();
  infer->add_option("--edges", edges, "Edge records TSV")->required();
  infer->add_option("--cascades", cascades, "Cascade TSV")->required();
  infer->add_option("--intervals", intervals, "Intervals to predict")->check(CLI::Range(1, 5));
  infer->add_option("--method", method_name, "infercut | infercut-ne | bernoulli | cc | random | all");
  infer->add_option("--t-thresh", t_thresh, "Temporal cutoff (default: from the checkpoint)");
  infer->add_option("--convention", convention, "model | literal");
  infer->add_option("--seed", infer_seed, "Seed of the random baseline");
  infer->add_option("--out", out, "Predictions TSV (default stdout)");

  // eval
  std::string predictions_path;
  std::size_t eval_window = 0;
  auto* eval = app.add_subcommand("eval", "Score predictions against the true parents");
  eval->add_option("--predictions", predictions_path, "Predictions TSV")->required();
  eval->add_option("--edges", edges, "Edge records TSV")->required();
  eval->add_option("--cascades", cascades, "Cascade TSV with true parents")->required();
  eval->add_option("--checkpoint", checkpoint_path, "Checkpoint JSON (supplies W)");
  eval->add_option("--window-size", eval_window, "Subsequence length W");
  eval->add_option("--out", out, "Metrics JSON (default stdout)");

  // report
  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild the figure tables from raw_records.tsv");
  report->add_option("--dir", report_dir, "Experiment output directory")->required();

  // all
  Overrides all_o;
  auto* all = app.add_subcommand("all", "Run the full experiment");
  all->add_option("--config", config_path, "Experiment config (JSON)");
  all_o.add<std::string>(all, "--out-dir", "out_dir", "Output directory");
  all_o.add<std::size_t>(all, "--workers", "workers", "Worker threads");
  add_model_flags(all, all_o);
  add_synth_flags(all, all_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(mc::ErrorKind::config);
  }

  try {
    if (*synth) {
      const auto cfg = mc::parse_experiment_config(synth_o.resolve(config_path));
      const auto data = mc::synthetic_dataset(cfg.synth);
      mc::write_if_changed(fs::path(out) / "edges.tsv", mc::edges_text(data));
      mc::write_if_changed(fs::path(out) / "cascades.tsv", mc::cascades_text(data.cascades, data.dict));
      std::cerr << "synth: " << data.graph.node_count() << " nodes, " << data.graph.edge_count() << " edges, "
                << data.cascades.size() << " cascades\n";
    } else if (*ingest) {
      const auto data = load(edges, cascades);
      mc::write_if_changed(fs::path(out) / "edges.tsv", mc::edges_text(data));
      mc::write_if_changed(fs::path(out) / "cascades.tsv", mc::cascades_text(data.cascades, data.dict));
      nlohmann::ordered_json summary;
      summary["nodes"] = data.graph.node_count();
      summary["edges"] = data.graph.edge_count();
      summary["records"] = data.ingest.records;
      summary["self_loops_dropped"] = data.ingest.skipped_self_loops;
      summary["cascades"] = data.cascades.size();
      summary["content_hash"] = mc::hex64(data.graph.content_hash());
      mc::write_if_changed(fs::path(out) / "summary.json", summary.dump(1) + "\n");
    } else if (*part) {
      const auto cfg = mc::parse_experiment_config(part_o.resolve(config_path));
      const auto data = load(edges, cascades);
      std::ostringstream s;
      s << "cascade_id\tindex\tfirst_position\tnodes\n";
      for (const auto& c : data.cascades) {
        for (const auto& sub : mc::partition_cascade(c, cfg.window_size)) {
          s << c.id() << '\t' << sub.index << '\t' << sub.first_position << '\t';
          for (std::size_t i = 0; i < sub.nodes.size(); ++i) s << (i ? "," : "") << data.dict.label(sub.nodes[i]);
          s << '\n';
        }
      }
      write_or_print(out, s.str());
    } else if (*motifs) {
      auto doc = motif_o.resolve(config_path);
      if (!patterns_path.empty()) doc["motifs"]["patterns"] = mc::load_json_file(patterns_path);
      const auto cfg = mc::parse_experiment_config(doc);
      const auto data = load(edges, cascades);
      std::ostringstream s;
      s << "cascade_id\ttarget\tmember\tdelta\n";
      mc::ExposureStats stats;
      for (const auto& c : data.cascades)
        mc::write_exposure_dump(s, c,
                                mc::compute_cascade_exposures(c, data.graph, cfg.window_size, cfg.patterns,
                                                              cfg.threshold, &stats),
                                data.dict);
      write_or_print(out, s.str());
      std::cerr << "motifs: " << stats.targets << " targets, " << stats.nonempty << " non-empty exposure sets, "
                << stats.parent_outside_window << " with the parent outside the window\n";
    } else if (*train) {
      const auto cfg = mc::parse_experiment_config(train_o.resolve(config_path));
      const auto data = load(edges, cascades);
      const auto workers = mc::resolve_workers(cfg.workers);
      std::vector<mc::ExposureMap> exposures(data.cascades.size());
      mc::parallel_for(data.cascades.size(), workers, [&](std::size_t i) {
        exposures[i] = mc::compute_cascade_exposures(data.cascades[i], data.graph, cfg.window_size, cfg.patterns,
                                                     cfg.threshold);
      });
      const auto x = mc::normalize_centrality(mc::compute_centrality(data.graph, cfg.centrality));
      auto tc = cfg.train;
      tc.seed = cfg.seed;
      mc::Trainer trainer(mc::compile_statistics(data.cascades, exposures, x), tc);
      const auto trace = trainer.fit();
      auto cp = mc::make_checkpoint(trainer, trace, tc);
      cp.centrality = cfg.centrality;
      cp.corpus_hash = mc::corpus_hash(data.cascades, data.graph);
      cp.window_size = cfg.window_size;
      cp.threshold = cfg.threshold;
      cp.t_thresh = cfg.t_thresh ? *cfg.t_thresh : mc::parent_gap_percentile(data.cascades, cfg.t_thresh_percentile);
      mc::write_if_changed(out, mc::checkpoint_text(cp, data.dict));
      if (!trace_path.empty()) {
        std::ostringstream s;
        mc::write_trace_csv(s, trace, timing);
        mc::write_if_changed(trace_path, s.str());
      }
      std::cerr << "train: lambda " << cp.lambda << ", beta " << cp.beta << ", " << cp.iterations
                << " iterations" << (cp.converged ? "" : " (not converged)") << "\n";
    } else if (*infer) {
      const auto data = load(edges, cascades);
      const auto cp = mc::read_checkpoint(checkpoint_path, data.dict);
      if (convention != "model" && convention != "literal") throw mc::ConfigError("--convention must be model or literal");
      std::vector<mc::Method> methods;
      if (method_name == "all") methods.assign(mc::kAllMethods.begin(), mc::kAllMethods.end());
      else methods.push_back(mc::parse_method(method_name));
      const auto x = mc::normalize_centrality(mc::compute_centrality(data.graph, cp.centrality));
      const mc::InferenceModel model{cp.lambda, cp.beta, &x,
                                     convention == "literal" ? mc::AlphaConvention::literal : mc::AlphaConvention::model};
      const mc::MethodContext ctx{&model, &data.graph, {}, infer_seed};
      const double tt = t_thresh ? *t_thresh : cp.t_thresh;
      std::ostringstream s;
      s << "cascade_id\tinterval\tchild\tpredicted_parent\tscore\tmethod\n";
      std::size_t skipped = 0;
      for (const auto& c : data.cascades) {
        const auto aug = mc::augment_cascade(c, data.graph);
        const auto subs = mc::partition_cascade(c, cp.window_size);
        for (auto interval : intervals) {
          if (interval >= subs.size()) {
            ++skipped;
            continue;
          }
          const auto task = mc::make_inference_task(c, aug, subs, interval, tt);
          for (auto m : methods)
            for (const auto& e : mc::run_method(m, task, ctx).edges)
              s << c.id() << '\t' << interval << '\t' << data.dict.label(e.child) << '\t'
                << data.dict.label(e.parent) << '\t' << mc::format_double(e.score) << '\t' << mc::to_string(m)
                << '\n';
        }
      }
      write_or_print(out, s.str());
      if (skipped) std::cerr << "infer: " << skipped << " (cascade, interval) pairs beyond the last subsequence\n";
    } else if (*eval) {
      auto data = load(edges, cascades);
      std::size_t window = eval_window;
      if (window == 0 && !checkpoint_path.empty()) window = mc::read_checkpoint(checkpoint_path, data.dict).window_size;
      if (window == 0) throw mc::ConfigError("eval needs --window-size or --checkpoint");
      // (method, interval) -> cascade -> predicted edges
      std::map<std::pair<std::string, std::size_t>, std::map<std::string, mc::CutEdgeSet>> grouped;
      std::ifstream in(predictions_path);
      if (!in) throw mc::DataError("cannot open " + predictions_path);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        const auto f = mc::split_tabs(line);
        if (f.size() != 6) throw mc::IngestionError(lineno, "expected 6 columns");
        const auto interval = mc::parse_double(f[1]);
        const auto score = mc::parse_double(f[4]);
        auto child = data.dict.find(f[2]);
        auto parent = data.dict.find(f[3]);
        if (!interval || !score || !child || !parent) throw mc::IngestionError(lineno, "unparseable prediction");
        mc::parse_method(f[5]);
        grouped[{f[5], static_cast<std::size_t>(*interval)}][f[0]].edges.push_back({*parent, *child, *score});
      }
      nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
      for (const auto& [key, by_cascade] : grouped) {
        mc::MetricCell cell;
        for (const auto& c : data.cascades) {
          const auto subs = mc::partition_cascade(c, window);
          if (key.second >= subs.size()) {
            ++cell.skipped;
            continue;
          }
          const auto task = mc::make_inference_task(c, mc::augment_cascade(c, data.graph), subs, key.second, 1.0);
          auto it = by_cascade.find(c.id());
          cell.add(mc::evaluate(it == by_cascade.end() ? mc::CutEdgeSet{} : it->second, c, task));
        }
        metrics[key.first][std::to_string(key.second)] = {{"recall", cell.recall()},
                                                          {"precision", cell.precision()},
                                                          {"n_cascades", cell.cascades},
                                                          {"n_edges", cell.edges}};
      }
      write_or_print(out, metrics.dump(1) + "\n");
    } else if (*report) {
      const fs::path dir(report_dir);
      std::ifstream in(dir / "raw_records.tsv");
      if (!in) throw mc::DataError("no raw_records.tsv in " + dir.string());
      const auto tables = mc::build_tables(mc::read_raw_records(in));
      mc::write_if_changed(dir / "fig6a.csv", tables.fig6a);
      mc::write_if_changed(dir / "fig6b.csv", tables.fig6b);
      mc::write_if_changed(dir / "fig7a.csv", tables.fig7a);
      mc::write_if_changed(dir / "fig7b.csv", tables.fig7b);
      std::cout << tables.fig6a;
    } else if (*all) {
      const auto cfg = mc::parse_experiment_config(all_o.resolve(config_path));
      const auto result = mc::run_experiment(cfg);
      std::cout << result.tables.fig6a;
      std::cerr << "all: " << result.written.size() << " files written to " << cfg.out_dir << "\n";
    }
  } catch (const mc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(mc::ErrorKind::numerical);
  }
  return 0;
}
