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

#include "nolgat/experiment.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "nolgat/errors.hpp"
#include "nolgat/featurize.hpp"
#include "nolgat/rng.hpp"

namespace nolgat {

namespace {

using ordered_json = nlohmann::ordered_json;

struct RunSpec {
  std::size_t k_index;
  std::size_t frac_index;
  std::size_t repetition;
  bool baseline;
};

constexpr std::uint64_t kRunSeedTag = 0x72756eULL;

std::uint64_t run_seed(const ExperimentConfig& config, std::size_t k_index,
                       std::size_t frac_index, std::size_t repetition) {
  // Baseline co-runs reuse this seed so splits and initialization pair up.
  return derive_key({kRunSeedTag, config.seed, k_index, frac_index,
                     repetition});
}

void write_chosen_orders_csv(const std::string& path,
                             const std::vector<ChosenOrderRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw DataError(detail::str("cannot open '", path, "' for writing"));
  }
  out << "epoch,layer,node_id,chosen_order\n";
  for (const ChosenOrderRow& r : rows) {
    out << r.epoch << ',' << r.layer << ',' << r.node << ',' << r.order << '\n';
  }
}

}  // namespace

ExperimentResults run_experiment_on(const ExperimentConfig& config,
                                    const Dataset& dataset,
                                    const SparseGraph* graph) {
  ExperimentResults results;
  results.config = config;

  const std::vector<std::size_t> ks =
      graph ? std::vector<std::size_t>{0} : config.knn_k;

  // Graphs and hop indexes per k, built up front and shared read-only.
  std::vector<SparseGraph> graphs;
  std::vector<HopIndex> hop_indexes;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    SparseGraph g = graph ? *graph
                          : build_knn_graph(dataset.features, ks[ki]);
    hop_indexes.push_back(build_hop_index(g, config.max_order_cap));
    graphs.push_back(std::move(g));
  }

  std::vector<RunSpec> specs;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    for (std::size_t fi = 0; fi < config.label_fraction.size(); ++fi) {
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        specs.push_back({ki, fi, rep, false});
        if (config.run_baseline) specs.push_back({ki, fi, rep, true});
      }
    }
  }

  std::vector<RunRecord> records(specs.size());
  std::vector<std::vector<ChosenOrderRow>> order_logs(specs.size());
  const bool want_orders = !config.chosen_orders_csv.empty();

  auto execute = [&](std::size_t i) {
    const RunSpec& spec = specs[i];
    const std::uint64_t seed =
        run_seed(config, spec.k_index, spec.frac_index, spec.repetition);
    const SplitSpec split = make_split(
        dataset.labels, config.label_fraction[spec.frac_index], seed);

    NolGatConfig mc = config.model;
    mc.baseline_mode = spec.baseline;
    TrainSettings st;
    st.epochs = config.epochs;
    st.adam = config.adam;
    st.eval_argmax = config.eval_argmax;
    st.order_log = want_orders && !spec.baseline ? &order_logs[i] : nullptr;

    TrainResult tr = train(mc, st, dataset, split,
                           hop_indexes[spec.k_index], seed);
    RunRecord& rec = records[i];
    rec.model = spec.baseline ? "baseline" : "nolgat";
    rec.seed = seed;
    rec.knn_k = graph ? 0 : ks[spec.k_index];
    rec.label_fraction = config.label_fraction[spec.frac_index];
    rec.repetition = spec.repetition;
    rec.metrics = tr.metrics;
    rec.loss_curve = std::move(tr.loss_curve);
  };

  unsigned workers = config.parallel_runs
                         ? config.parallel_runs
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(specs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < specs.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= specs.size()) return;
          try {
            execute(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mu);
            if (!error) error = std::current_exception();
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  results.runs = std::move(records);
  if (want_orders) {
    // Single-run configs only (enforced at parse time), so one log exists.
    write_chosen_orders_csv(config.chosen_orders_csv, order_logs[0]);
  }
  return results;
}

ExperimentResults run_experiment(const ExperimentConfig& config) {
  const Dataset dataset = load_dataset(config);
  return run_experiment_on(config, dataset, nullptr);
}

namespace {

ordered_json metric_aggregate(const std::vector<const RunRecord*>& runs) {
  auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const RunRecord* r : runs) v.push_back(field(*r));
    return aggregate(v);
  };
  const Aggregate acc =
      collect([](const RunRecord& r) { return r.metrics.accuracy; });
  const Aggregate mf1 =
      collect([](const RunRecord& r) { return r.metrics.macro_f1; });
  const Aggregate if1 =
      collect([](const RunRecord& r) { return r.metrics.interest_f1; });
  return ordered_json{
      {"accuracy", {{"mean", acc.mean}, {"std", acc.stddev}}},
      {"macro_f1", {{"mean", mf1.mean}, {"std", mf1.stddev}}},
      {"interest_f1", {{"mean", if1.mean}, {"std", if1.stddev}}},
  };
}

}  // namespace

std::string results_to_json(const ExperimentResults& results,
                            const std::string& timestamp) {
  ordered_json root;
  ordered_json echo;
  for (const auto& [k, v] : config_echo(results.config)) echo[k] = v;
  root["config_echo"] = std::move(echo);

  ordered_json runs = ordered_json::array();
  for (const RunRecord& r : results.runs) {
    ordered_json jr;
    jr["seed"] = r.seed;
    jr["model"] = r.model;
    jr["knn_k"] = r.knn_k;
    jr["label_fraction"] = r.label_fraction;
    jr["repetition"] = r.repetition;
    jr["accuracy"] = r.metrics.accuracy;
    jr["macro_f1"] = r.metrics.macro_f1;
    jr["interest_f1"] = r.metrics.interest_f1;
    jr["confusion"] = ordered_json{{"tp", r.metrics.confusion.tp},
                                   {"tn", r.metrics.confusion.tn},
                                   {"fp", r.metrics.confusion.fp},
                                   {"fn", r.metrics.confusion.fn}};
    jr["loss_curve"] = r.loss_curve;
    runs.push_back(std::move(jr));
  }
  root["runs"] = std::move(runs);

  ordered_json agg;
  for (const char* model : {"nolgat", "baseline"}) {
    std::vector<const RunRecord*> of_model;
    for (const RunRecord& r : results.runs) {
      if (r.model == model) of_model.push_back(&r);
    }
    if (!of_model.empty()) agg[model] = metric_aggregate(of_model);
  }
  // Per (model, k, fraction) breakdown, one row per swept setting.
  std::set<std::tuple<std::string, std::size_t, double>> keys;
  for (const RunRecord& r : results.runs) {
    keys.insert({r.model, r.knn_k, r.label_fraction});
  }
  ordered_json groups = ordered_json::array();
  for (const auto& [model, k, f] : keys) {
    std::vector<const RunRecord*> group;
    for (const RunRecord& r : results.runs) {
      if (r.model == model && r.knn_k == k && r.label_fraction == f) {
        group.push_back(&r);
      }
    }
    ordered_json jg;
    jg["model"] = model;
    jg["knn_k"] = k;
    jg["label_fraction"] = f;
    jg["metrics"] = metric_aggregate(group);
    groups.push_back(std::move(jg));
  }
  agg["groups"] = std::move(groups);
  root["aggregate"] = std::move(agg);
  root["timestamp"] = timestamp;
  return root.dump(2) + "\n";
}

void write_results_json(const ExperimentResults& results,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError(detail::str("cannot open '", path, "' for writing"));
  }
  out << results_to_json(results, iso8601_utc_now());
}

void write_results_csv(const ExperimentResults& results,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw DataError(detail::str("cannot open '", path, "' for writing"));
  }
  out.precision(17);
  out << "model,knn_k,label_fraction,repetition,seed,accuracy,macro_f1,"
         "interest_f1,tp,tn,fp,fn,final_loss\n";
  for (const RunRecord& r : results.runs) {
    out << r.model << ',' << r.knn_k << ',' << r.label_fraction << ','
        << r.repetition << ',' << r.seed << ',' << r.metrics.accuracy << ','
        << r.metrics.macro_f1 << ',' << r.metrics.interest_f1 << ','
        << r.metrics.confusion.tp << ',' << r.metrics.confusion.tn << ','
        << r.metrics.confusion.fp << ',' << r.metrics.confusion.fn << ','
        << (r.loss_curve.empty() ? 0.0 : r.loss_curve.back()) << '\n';
  }
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace nolgat
