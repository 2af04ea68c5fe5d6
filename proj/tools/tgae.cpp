// tgae: command-line front end for perturbation, training, alignment and
// the evaluation protocols.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tgae/checkpoint.hpp"
#include "tgae/config.hpp"
#include "tgae/report.hpp"
#include "tgae/tgae.hpp"

namespace fs = std::filesystem;
using namespace tgae;

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot open '" + p.string() + "' for writing");
  return os;
}

void write_text(const fs::path& p, const std::string& s) {
  auto os = open_out(p);
  os << s;
}

void write_resolved(const fs::path& dir, const RunConfig& cfg) {
  write_text(dir / "resolved_config.json", to_json(cfg).dump(2) + "\n");
}

void write_ids(const fs::path& p, const LoadedGraph& g) {
  auto os = open_out(p);
  write_id_map(os, g.original_ids);
}

RunConfig load_config(const std::string& path) {
  RunConfig c = path.empty() ? RunConfig{} : read_run_config(path);
  return c;
}

std::vector<Graph> load_family(const RunConfig& cfg) {
  std::vector<Graph> family;
  for (const auto& p : cfg.data.family) family.push_back(read_edge_list(p).graph);
  if (family.empty() && !cfg.data.graph.empty()) family.push_back(read_edge_list(cfg.data.graph).graph);
  if (family.empty()) throw InvalidArgument("config names no training graphs (data.family or data.graph)");
  return family;
}

std::optional<EncoderParams> load_checkpoint_for(const std::string& path, EncoderConfig& enc) {
  if (path.empty()) return std::nullopt;
  Checkpoint ck = load_checkpoint_file(path);
  enc = ck.config;
  return std::move(ck.params);
}

std::string dataset_label(const RunConfig& cfg) {
  if (!cfg.data.name.empty()) return cfg.data.name;
  return fs::path(cfg.data.graph).stem().string();
}

void emit_report(const fs::path& dir, const ExperimentReport& rep) {
  write_text(dir / "report.json", to_json(rep).dump(2) + "\n");
  {
    auto os = open_out(dir / "report.csv");
    write_report_csv(os, rep);
  }
  std::ostringstream table;
  write_report_table(table, rep);
  write_text(dir / "report.txt", table.str());
  std::cout << table.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"T-GAE graph alignment toolkit"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: TGAE_THREADS or all cores)");

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "write a perturbed copy of a graph and its edit log");
  std::string p_graph, p_out, p_log, p_model = "uniform";
  double p_level = 0.0;
  std::uint64_t p_seed = 0;
  bool p_recompute = false;
  perturb_cmd->add_option("--graph", p_graph, "input edge list")->required();
  perturb_cmd->add_option("--out", p_out, "output edge list")->required();
  perturb_cmd->add_option("--log", p_log, "edit log (default: <out>.edits)");
  perturb_cmd->add_option("--model", p_model, "uniform|degree");
  perturb_cmd->add_option("--level", p_level, "perturbation level p");
  perturb_cmd->add_option("--seed", p_seed, "random seed");
  perturb_cmd->add_flag("--recompute-weights", p_recompute, "degree model: refresh d_i d_j after each removal");

  // train
  auto* train_cmd = app.add_subcommand("train", "train an encoder over a family of graphs");
  std::string t_config, t_out;
  std::optional<std::size_t> t_epochs;
  train_cmd->add_option("--config", t_config, "run config (JSON)")->required();
  train_cmd->add_option("--out-dir", t_out, "override output_dir");
  train_cmd->add_option("--epochs", t_epochs, "override train.epochs");

  // align
  auto* align_cmd = app.add_subcommand("align", "match the nodes of two graphs");
  std::string a_src, a_tgt, a_source = "spectral", a_matcher = "greedy", a_ckpt, a_out, a_truth,
                         a_projection = "pca";
  std::size_t a_m = 4;
  align_cmd->add_option("--src", a_src, "source edge list")->required();
  align_cmd->add_option("--tgt", a_tgt, "target edge list")->required();
  align_cmd->add_option("--source", a_source, "netsimile|spectral|tgae|tgae_untrained");
  align_cmd->add_option("--matcher", a_matcher, "greedy|exact|approx_nn");
  align_cmd->add_option("--projection", a_projection, "approx_nn projection: pca|norm");
  align_cmd->add_option("--spectral-m", a_m, "spectral embedding width");
  align_cmd->add_option("--checkpoint", a_ckpt, "encoder checkpoint for source tgae");
  align_cmd->add_option("--truth", a_truth, "ground-truth alignment, prints accuracy");
  align_cmd->add_option("--out", a_out, "mapping file")->required();

  // evaluate / benchmark
  auto* eval_cmd = app.add_subcommand("evaluate", "run the experiment described by a config");
  std::string e_config, e_out;
  eval_cmd->add_option("--config", e_config, "run config (JSON)")->required();
  eval_cmd->add_option("--out-dir", e_out, "override output_dir");
  auto* bench_cmd = app.add_subcommand("benchmark", "matcher x level grid on an untrained encoder");
  std::string b_config, b_out;
  bench_cmd->add_option("--config", b_config, "run config (JSON)")->required();
  bench_cmd->add_option("--out-dir", b_out, "override output_dir");

  // features
  auto* feat_cmd = app.add_subcommand("features", "dump NetSimile or spectral node features");
  std::string f_graph, f_kind = "netsimile", f_out, f_format = "csv";
  std::size_t f_m = 4;
  bool f_standardize = false;
  feat_cmd->add_option("--graph", f_graph, "edge list")->required();
  feat_cmd->add_option("--kind", f_kind, "netsimile|spectral");
  feat_cmd->add_option("--spectral-m", f_m, "spectral embedding width");
  feat_cmd->add_flag("--standardize", f_standardize, "z-score NetSimile columns");
  feat_cmd->add_option("--format", f_format, "csv|bin");
  feat_cmd->add_option("--out", f_out, "output file")->required();

  // verify-filter
  auto* vf_cmd = app.add_subcommand("verify-filter", "Monte-Carlo check of band-pass filter recovery");
  std::string v_graph;
  FilterRecoveryConfig v_cfg;
  v_cfg.seed = 0;
  vf_cmd->add_option("--graph", v_graph, "edge list")->required();
  vf_cmd->add_option("--eig-index", v_cfg.eig_index, "0 = largest eigenvalue");
  vf_cmd->add_option("--samples", v_cfg.num_samples, "Monte-Carlo sample count T");
  vf_cmd->add_option("--seed", v_cfg.seed, "random seed");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(threads);

  try {
    if (perturb_cmd->parsed()) {
      const LoadedGraph g = read_edge_list(p_graph);
      PerturbationSpec spec;
      spec.model = perturbation_model_from_string(p_model);
      spec.level = p_level;
      spec.seed = p_seed;
      spec.recompute_degree_weights = p_recompute;
      const PerturbationResult r = perturb(g.graph, spec);
      {
        auto os = open_out(p_out);
        write_edge_list(os, r.graph, g.original_ids);
      }
      {
        auto os = open_out(p_log.empty() ? p_out + ".edits" : p_log);
        for (const auto& e : r.log)
          os << (e.op == EditRecord::Op::Add ? '+' : '-') << ' ' << g.original_ids[e.u] << ' '
             << g.original_ids[e.v] << '\n';
      }
      write_ids(p_out + ".ids", g);
      std::cerr << "perturb: " << r.log.size() << " edits, " << r.graph.num_edges() << " edges\n";
      return 0;
    }

    if (train_cmd->parsed()) {
      RunConfig cfg = load_config(t_config);
      if (!t_out.empty()) cfg.output_dir = t_out;
      if (t_epochs) cfg.train.epochs = *t_epochs;
      if (cfg.threads > 0 && threads == 0) set_thread_count(cfg.threads);
      const std::vector<Graph> family = load_family(cfg);
      const fs::path dir = cfg.output_dir;
      write_resolved(dir, cfg);
      const TrainResult r = train(family, cfg.encoder, cfg.train, [](std::size_t e, double loss) {
        std::cerr << "epoch " << e << "  loss " << std::setprecision(6) << loss << '\n';
      });
      save_checkpoint_file((dir / "checkpoint.bin").string(), cfg.encoder, r.params);
      auto os = open_out(dir / "loss.csv");
      write_loss_trace(os, r.epoch_loss);
      return 0;
    }

    if (align_cmd->parsed()) {
      const LoadedGraph src = read_edge_list(a_src);
      const LoadedGraph tgt = read_edge_list(a_tgt);
      ExperimentConfig ec;
      ec.source = embedding_source_from_string(a_source);
      ec.spectral.m = a_m;
      std::optional<EncoderParams> params = load_checkpoint_for(a_ckpt, ec.encoder);
      if (ec.source == EmbeddingSource::TGAEUntrained) params = EncoderParams::init(ec.encoder);
      if (ec.source == EmbeddingSource::TGAE && !params)
        throw InvalidArgument("source tgae needs --checkpoint");
      if (!uses_encoder(ec.source) && params)
        throw InvalidArgument(std::string("--checkpoint given but source '") + a_source +
                              "' does not use the encoder");
      const Embedder embed = ec.embedder(std::move(params));
      FeatureMatrix e = embed(src.graph), e_hat = embed(tgt.graph);
      detail::align_widths(e, e_hat);
      const NodeMapping m = match_embeddings(matcher_from_string(a_matcher), e, e_hat, projection_from_string(a_projection));
      {
        auto os = open_out(a_out);
        write_mapping(os, m, src.original_ids, tgt.original_ids);
      }
      std::cerr << "align: " << m.size() << " pairs\n";
      if (!a_truth.empty()) {
        const NodeMapping truth = parse_alignment(detail::read_file(a_truth), src, tgt);
        std::cout << "accuracy " << std::setprecision(6) << matching_accuracy(m, truth) << '\n';
      }
      return 0;
    }

    if (eval_cmd->parsed() || bench_cmd->parsed()) {
      const bool bench = bench_cmd->parsed();
      RunConfig cfg = load_config(bench ? b_config : e_config);
      const std::string& out = bench ? b_out : e_out;
      if (!out.empty()) cfg.output_dir = out;
      if (cfg.threads > 0 && threads == 0) set_thread_count(cfg.threads);
      if (cfg.data.graph.empty()) throw InvalidArgument("config is missing data.graph");
      const fs::path dir = cfg.output_dir;
      write_resolved(dir, cfg);
      const LoadedGraph g = read_edge_list(cfg.data.graph);
      const std::string name = dataset_label(cfg);
      ExperimentConfig& ec = cfg.experiment;
      std::optional<EncoderParams> params = load_checkpoint_for(cfg.data.checkpoint, ec.encoder);

      ExperimentReport rep;
      if (bench) {
        rep = run_benchmark(ec, g.graph, name);
      } else {
        switch (ec.task) {
          case Task::GraphMatching: rep = run_graph_matching(ec, g.graph, name, params); break;
          case Task::Benchmark: rep = run_benchmark(ec, g.graph, name); break;
          case Task::Ablation: {
            std::vector<Graph> family;
            for (const auto& p : cfg.data.family) family.push_back(read_edge_list(p).graph);
            rep = run_ablation(ec, g.graph, name, family, params);
            break;
          }
          case Task::SubgraphMatching: {
            if (cfg.data.target.empty() || cfg.data.anchors.empty())
              throw InvalidArgument("subgraph_matching needs data.target and data.anchors");
            const LoadedGraph t = read_edge_list(cfg.data.target);
            const NodeMapping anchors = parse_alignment(detail::read_file(cfg.data.anchors), g, t);
            rep = run_subgraph_matching(ec, g.graph, t.graph, anchors, name, params);
            break;
          }
        }
      }
      emit_report(dir, rep);
      return 0;
    }

    if (feat_cmd->parsed()) {
      const LoadedGraph g = read_edge_list(f_graph);
      FeatureMatrix x;
      if (f_kind == "netsimile") {
        x = netsimile_features(g.graph);
        if (f_standardize) x = standardize(x);
      } else if (f_kind == "spectral") {
        SpectralConfig sc;
        sc.m = f_m;
        x = spectral_embedding(g.graph, sc).features;
      } else {
        throw InvalidArgument("unknown feature kind '" + f_kind + "' (expected netsimile|spectral)");
      }
      auto os = open_out(f_out);
      if (f_format == "csv")
        write_features_csv(os, x);
      else if (f_format == "bin")
        write_features(os, x);
      else
        throw InvalidArgument("unknown format '" + f_format + "' (expected csv|bin)");
      write_ids(f_out + ".ids", g);
      return 0;
    }

    if (vf_cmd->parsed()) {
      const LoadedGraph g = read_edge_list(v_graph);
      const FilterRecoveryReport r = verify_band_filter_recovery(g.graph, v_cfg);
      std::cout << std::setprecision(6) << "eigenvalue " << r.eigenvalue << "  taps " << r.taps.size()
                << "  condition " << r.condition_number << '\n';
      std::cout << "node  estimate  truth  std_error\n";
      for (std::size_t i = 0; i < r.truth.size(); ++i)
        std::cout << g.original_ids[i] << "  " << r.estimate[i] << "  " << r.truth[i] << "  " << r.std_error[i]
                  << '\n';
      const bool ok = r.max_z <= 3.0;
      std::cout << (ok ? "PASS" : "FAIL") << "  max |estimate - truth| / std_error = " << r.max_z << '\n';
      return ok ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "tgae: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tgae: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
