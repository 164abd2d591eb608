// Copyright 2026 the nolgat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nolgat/errors.hpp"
#include "nolgat/experiment.hpp"
#include "nolgat/featurize.hpp"
#include "nolgat/synth.hpp"
#include "nolgat/train.hpp"

namespace {

using nolgat::DataError;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct BuildGraphArgs {
  std::string data;
  std::string featurizer = "precomputed";
  std::string labels;
  std::size_t dim = 500;
  std::size_t k = 6;
  int cap = 8;
  std::string out = "edges.tsv";
};

int cmd_build_graph(const BuildGraphArgs& args) {
  nolgat::ExperimentConfig cfg;
  cfg.featurizer = args.featurizer;
  cfg.data = args.data;
  cfg.labels = args.labels;
  cfg.feature_dim = args.dim;
  const nolgat::Dataset ds = nolgat::load_dataset(cfg);
  const nolgat::SparseGraph g = nolgat::build_knn_graph(ds.features, args.k);
  const nolgat::HopIndex idx = nolgat::build_hop_index(g, args.cap);
  nolgat::write_edge_list(g, args.out);

  std::printf("nodes                %zu\n", g.n);
  std::printf("undirected edges     %zu\n", g.edge_count());
  std::printf("effective diameter   %d\n", idx.effective_diameter);
  std::printf("indexed orders       1..%d (cap %d)\n", idx.max_order, args.cap);
  for (int r = 1; r <= idx.max_order; ++r) {
    std::size_t pairs = idx.lists[static_cast<std::size_t>(r) - 1].nodes.size();
    std::printf("order %-2d pairs       %zu\n", r, pairs);
  }
  std::printf("edge list written to %s\n", args.out.c_str());
  return 0;
}

struct SynthArgs {
  std::size_t nodes = 2000;
  int distance = 3;
  std::uint64_t seed = 1;
  std::size_t dim = 8;
  std::size_t corpus = 0;  // > 0: emit a synthetic corpus instead
  std::string out = "synth";
};

int cmd_synth(const SynthArgs& args) {
  if (args.corpus > 0) {
    const nolgat::Corpus corpus = nolgat::synthetic_corpus(args.corpus, args.seed);
    nolgat::write_corpus(corpus, args.out + "_corpus.txt",
                         args.out + "_labels.txt");
    std::printf("wrote %s_corpus.txt and %s_labels.txt (%zu documents)\n",
                args.out.c_str(), args.out.c_str(), args.corpus);
    return 0;
  }
  const nolgat::SynthTask task =
      nolgat::synth_longrange(args.nodes, args.distance, args.seed, args.dim);
  nolgat::write_dataset_csv(task.dataset, args.out + "_data.csv");
  nolgat::write_edge_list(task.graph, args.out + "_edges.tsv");
  std::printf("wrote %s_data.csv and %s_edges.tsv (%zu nodes, D=%d)\n",
              args.out.c_str(), args.out.c_str(), task.dataset.features.n,
              args.distance);
  return 0;
}

int cmd_train(const std::string& config_path) {
  const nolgat::ExperimentConfig cfg = nolgat::parse_config_file(config_path);
  const nolgat::ExperimentResults results = nolgat::run_experiment(cfg);
  nolgat::write_results_json(results, cfg.out_json);
  nolgat::write_results_csv(results, cfg.out_csv);

  std::map<std::string, std::vector<double>> acc, f1;
  for (const auto& r : results.runs) {
    acc[r.model].push_back(r.metrics.accuracy);
    f1[r.model].push_back(r.metrics.macro_f1);
  }
  for (const auto& [model, values] : acc) {
    const nolgat::Aggregate a = nolgat::aggregate(values);
    const nolgat::Aggregate m = nolgat::aggregate(f1[model]);
    std::printf("%-8s accuracy %.4f +- %.4f   macro-F1 %.4f +- %.4f  (%zu runs)\n",
                model.c_str(), a.mean, a.stddev, m.mean, m.stddev,
                values.size());
  }
  std::printf("results written to %s and %s\n", cfg.out_json.c_str(),
              cfg.out_csv.c_str());
  return 0;
}

std::pair<std::vector<std::string>, std::vector<std::int8_t>> read_label_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,label", 0) != 0) {
    throw DataError("'" + path + "': expected a CSV with header id,label");
  }
  std::vector<std::string> ids;
  std::vector<std::int8_t> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) {
      throw DataError("'" + path + "' line " + std::to_string(line_no) +
                      ": expected id,label");
    }
    auto c2 = line.find(',', c1 + 1);
    if (c2 == std::string::npos) c2 = line.size();
    const std::string lab = line.substr(c1 + 1, c2 - c1 - 1);
    if (lab != "0" && lab != "1") {
      throw DataError("'" + path + "' line " + std::to_string(line_no) +
                      ": label must be 0 or 1, got '" + lab + "'");
    }
    ids.push_back(line.substr(0, c1));
    labels.push_back(lab == "1" ? 1 : 0);
  }
  return {ids, labels};
}

int cmd_metrics(const std::string& pred_path, const std::string& truth_path,
                const std::string& json_out) {
  const auto [pred_ids, pred] = read_label_csv(pred_path);
  const auto [truth_ids, truth] = read_label_csv(truth_path);
  if (pred_ids != truth_ids) {
    throw DataError("prediction and truth files disagree on ids or order");
  }
  const std::vector<char> mask(pred.size(), 1);
  const nolgat::RunMetrics m = nolgat::compute_metrics(pred, truth, mask);
  nlohmann::ordered_json j;
  j["accuracy"] = m.accuracy;
  j["macro_f1"] = m.macro_f1;
  j["interest_f1"] = m.interest_f1;
  j["confusion"] = {{"tp", m.confusion.tp},
                    {"tn", m.confusion.tn},
                    {"fp", m.confusion.fp},
                    {"fn", m.confusion.fn}};
  const std::string text = j.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (!json_out.empty()) {
    std::ofstream out(json_out);
    if (!out) throw DataError("cannot open '" + json_out + "' for writing");
    out << text;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gradcheck: central-difference validation of the tensor ops, one attention
// layer, and the full 2-layer model in the dense-relaxed smooth mode.

nolgat::Value op_loss(nolgat::OpKind kind, nolgat::ParamStore& ps) {
  using namespace nolgat;
  const Value& a = ps.at("a");
  switch (kind) {
    case OpKind::kMatmul: return sum_all(matmul(a, ps.at("b")));
    case OpKind::kAdd: return sum_all(add(a, ps.at("row")));
    case OpKind::kMul: return sum_all(mul(a, ps.at("col")));
    case OpKind::kConcatCols: {
      const Value xs[2] = {a, ps.at("b2")};
      return sum_all(mul(concat_cols(xs), concat_cols(xs)));
    }
    case OpKind::kLeakyRelu: return sum_all(leaky_relu(ps.at("kinked"), 0.2));
    case OpKind::kElu: return sum_all(elu(a));
    case OpKind::kExp: return sum_all(exp_(a));
    case OpKind::kLog: return sum_all(log_(ps.at("pos")));
    case OpKind::kSigmoid: return sum_all(mul(sigmoid(a), sigmoid(a)));
    case OpKind::kRowSoftmax: return sum_all(mul(row_softmax(a), ps.at("w")));
    case OpKind::kRowLogSoftmax:
      return sum_all(mul(row_log_softmax(a), ps.at("w")));
    case OpKind::kSegmentSoftmax: {
      const std::int32_t seg[] = {0, 0, 1, 1, 1, 2};
      return sum_all(mul(segment_softmax(ps.at("v6"), seg), ps.at("v6w")));
    }
    case OpKind::kSegmentSum: {
      const std::int32_t seg[] = {0, 0, 1, 1, 1, 2};
      Value s = segment_sum(ps.at("v6"), seg);
      return sum_all(mul(s, s));
    }
    case OpKind::kGatherRows: {
      const std::int32_t idx[] = {2, 0, 2, 1};
      Value gathered = gather_rows(a, idx);
      return sum_all(mul(gathered, gathered));
    }
    case OpKind::kScalarMul: return sum_all(scalar_mul(mul(a, a), -1.7));
    case OpKind::kClamp: return sum_all(clamp(ps.at("inner"), -1.0, 1.0));
    case OpKind::kMean: return mean_all(mul(a, a));
    case OpKind::kSum: return sum_all(mul(a, a));
    default: return sum_all(a);
  }
}

double run_op_suite(double eps) {
  using namespace nolgat;
  const OpKind kinds[] = {
      OpKind::kMatmul,        OpKind::kAdd,
      OpKind::kMul,           OpKind::kConcatCols,
      OpKind::kLeakyRelu,     OpKind::kElu,
      OpKind::kExp,           OpKind::kLog,
      OpKind::kSigmoid,       OpKind::kRowSoftmax,
      OpKind::kRowLogSoftmax, OpKind::kSegmentSoftmax,
      OpKind::kSegmentSum,    OpKind::kGatherRows,
      OpKind::kScalarMul,     OpKind::kClamp,
      OpKind::kMean,          OpKind::kSum,
  };
  double worst = 0.0;
  for (OpKind kind : kinds) {
    for (std::uint64_t seed : {101ULL, 202ULL}) {
      ParamStore ps(seed);
      auto fill = [&](const std::string& name, Shape shape, double lo,
                      double hi, std::uint64_t salt) {
        std::size_t count = 1;
        for (auto d : shape) count *= d;
        RngStream rng = RngStream::keyed({seed, salt});
        std::vector<double> vals(count);
        for (double& v : vals) v = rng.next_uniform(lo, hi);
        Value p = ps.create(name, shape, Init::kZeros);
        p->data = std::move(vals);
      };
      fill("a", {3, 4}, -2.0, 2.0, 1);
      fill("b", {4, 2}, -2.0, 2.0, 2);
      fill("b2", {3, 2}, -2.0, 2.0, 3);
      fill("row", {4}, -2.0, 2.0, 4);
      fill("col", {3, 1}, -2.0, 2.0, 5);
      fill("w", {3, 4}, -2.0, 2.0, 6);
      fill("pos", {3, 4}, 0.5, 2.5, 7);
      fill("v6", {6, 2}, -2.0, 2.0, 8);
      fill("v6w", {6, 2}, -2.0, 2.0, 9);
      fill("inner", {3, 4}, -0.9, 0.9, 10);
      // Keep kinked inputs away from the breakpoint.
      {
        RngStream rng = RngStream::keyed({seed, 11ULL});
        std::vector<double> vals(12);
        for (double& v : vals) {
          v = rng.next_uniform(0.1, 2.0);
          if (rng.next_open01() < 0.5) v = -v;
        }
        Value p = ps.create("kinked", {3, 4}, Init::kZeros);
        p->data = std::move(vals);
      }
      worst = std::max(
          worst, grad_check([kind](ParamStore& s) { return op_loss(kind, s); },
                            ps, eps));
    }
  }
  return worst;
}

int cmd_gradcheck(double eps) {
  using namespace nolgat;
  const double op_err = run_op_suite(eps);
  std::printf("tensor ops        max relative error %.3e\n", op_err);

  // One attention layer against a quadratic target.
  ParamStore lps(8);
  GatV2Layer layer(lps, "gat", {2, 3, 3, true});
  RngStream rng = RngStream::keyed({8, 0xFEED});
  std::vector<double> hv(18), tv(36);
  for (double& v : hv) v = rng.next_uniform(-2.0, 2.0);
  for (double& v : tv) v = rng.next_uniform(-2.0, 2.0);
  Value h = make_constant({6, 3}, hv);
  Value target = make_constant({6, 6}, tv);
  Neighborhoods nb;
  nb.offsets = {0, 2, 3, 5, 6, 8, 10};
  nb.sources = {1, 2, 0, 1, 3, 2, 0, 5, 3, 4};
  const double layer_err = grad_check(
      [&](ParamStore&) {
        Value out = layer.forward(h, nb);
        Value diff = add(out, scalar_mul(target, -1.0));
        return mean_all(mul(diff, diff));
      },
      lps, eps);
  std::printf("attention layer   max relative error %.3e\n", layer_err);

  // Full 2-layer model, dense-relaxed smooth surrogate, frozen noise.
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  RngStream grng = RngStream::keyed({64, 0xE});
  for (std::int32_t u = 0; u < 20; ++u) {
    for (std::int32_t v = u + 1; v < 20; ++v) {
      if (grng.next_open01() < 0.25) edges.emplace_back(u, v);
    }
  }
  SparseGraph g = graph_from_edges(20, edges);
  HopIndex hops = build_hop_index(g, 8);
  RngStream frng = RngStream::keyed({64, 0xF});
  std::vector<double> fv(20 * 8);
  for (double& v : fv) v = frng.next_uniform(-2.0, 2.0);
  Value x = make_constant({20, 8}, fv);
  NolGatConfig cfg;
  cfg.layers = 2;
  cfg.hidden = {8, 4};
  cfg.heads = {2, 2};
  cfg.mlp_hidden = {6};
  cfg.relaxation = RelaxationMode::kDenseRelaxed;
  ParamStore mps(193);
  NolGatModel model(mps, cfg, 8, hops.max_order + 1);
  std::vector<std::int8_t> labels(20);
  std::vector<char> mask(20, 1);
  for (int i = 0; i < 20; ++i) labels[i] = i % 2;
  const double model_err = grad_check(
      [&](ParamStore&) {
        ForwardOptions opts;
        opts.hard_forward = false;
        ModelForward mf = model.forward(x, hops, 5, opts);
        return masked_bce_loss(mf.probabilities, labels, mask);
      },
      mps, eps);
  std::printf("full model        max relative error %.3e\n", model_err);

  const bool ok = op_err < 1e-6 && layer_err < 1e-6 && model_err < 1e-5;
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  if (!ok) throw NumericError("gradcheck: tolerances exceeded");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NOL-GAT: neighborhood-order learning graph attention network"};
  app.require_subcommand(1);

  BuildGraphArgs bg;
  auto* build_graph = app.add_subcommand(
      "build-graph", "Build the KNN similarity graph and hop-index stats");
  build_graph->add_option("--data", bg.data, "dataset file")->required();
  build_graph->add_option("--featurizer", bg.featurizer,
                          "precomputed or hashed-tf");
  build_graph->add_option("--labels", bg.labels, "label file (hashed-tf)");
  build_graph->add_option("--dim", bg.dim, "hashed-tf bucket count");
  build_graph->add_option("--k", bg.k, "nearest neighbors per node");
  build_graph->add_option("--cap", bg.cap, "max hop order to index");
  build_graph->add_option("--out", bg.out, "edge list output path");

  std::string config_path;
  auto* train_cmd =
      app.add_subcommand("train", "Run the experiment described by a config");
  train_cmd->add_option("--config", config_path, "key = value config file")
      ->required();

  SynthArgs sy;
  auto* synth = app.add_subcommand(
      "synth", "Generate the long-range benchmark (or a synthetic corpus)");
  synth->add_option("--nodes", sy.nodes, "total node count");
  synth->add_option("--distance", sy.distance, "planted signal distance D");
  synth->add_option("--seed", sy.seed, "generator seed");
  synth->add_option("--dim", sy.dim, "feature width");
  synth->add_option("--corpus", sy.corpus,
                    "emit a synthetic text corpus of this many documents");
  synth->add_option("--out", sy.out, "output path prefix");

  double eps = 1e-6;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient suites");
  gradcheck->add_option("--eps", eps, "central-difference step");

  std::string pred_path, truth_path, metrics_json;
  auto* metrics =
      app.add_subcommand("metrics", "Score a prediction file against truth");
  metrics->add_option("--pred", pred_path, "CSV with header id,label")
      ->required();
  metrics->add_option("--truth", truth_path, "CSV with header id,label")
      ->required();
  metrics->add_option("--json", metrics_json, "also write the report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build_graph->parsed()) return cmd_build_graph(bg);
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (synth->parsed()) return cmd_synth(sy);
    if (gradcheck->parsed()) return cmd_gradcheck(eps);
    if (metrics->parsed()) return cmd_metrics(pred_path, truth_path, metrics_json);
  } catch (const nolgat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nolgat::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nolgat::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
