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

#include "nolgat/train.hpp"

#include <cmath>

#include "nolgat/errors.hpp"
#include "nolgat/rng.hpp"

namespace nolgat {

SplitSpec make_split(std::span<const std::int8_t> labels, double fraction,
                     std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument(
        detail::str("make_split: fraction must lie in (0,1), got ", fraction));
  }
  std::vector<std::int32_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i] ? 1 : 0].push_back(static_cast<std::int32_t>(i));
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DataError("make_split: both classes must be present");
  }
  SplitSpec split;
  split.seed = seed;
  split.fraction = fraction;
  split.labeled_mask.assign(labels.size(), 0);
  for (int c = 0; c < 2; ++c) {
    const std::size_t n_c = by_class[c].size();
    const std::size_t take = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n_c)));
    if (take == 0) {
      throw DataError(detail::str("make_split: fraction ", fraction,
                                  " labels zero items of class ", c));
    }
    RngStream rng = RngStream::keyed({seed, 0x73706c6974ULL,
                                      static_cast<std::uint64_t>(c)});
    deterministic_shuffle(by_class[c], rng);
    for (std::size_t i = 0; i < take; ++i) {
      split.labeled_mask[static_cast<std::size_t>(by_class[c][i])] = 1;
    }
  }
  return split;
}

Value masked_bce_loss(const Value& probabilities,
                      std::span<const std::int8_t> labels,
                      std::span<const char> labeled_mask) {
  const std::size_t n = probabilities->rows();
  if (probabilities->cols() != 1 || labels.size() != n ||
      labeled_mask.size() != n) {
    throw std::invalid_argument("masked_bce_loss: size mismatch");
  }
  std::vector<std::int32_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (labeled_mask[i]) idx.push_back(static_cast<std::int32_t>(i));
  }
  if (idx.empty()) {
    throw std::invalid_argument("masked_bce_loss: empty labeled set");
  }
  const std::size_t m = idx.size();
  std::vector<double> y(m), y_inv(m);
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = labels[static_cast<std::size_t>(idx[i])] ? 1.0 : 0.0;
    y_inv[i] = 1.0 - y[i];
  }
  Value p = clamp(gather_rows(probabilities, idx), 1e-12, 1.0 - 1e-12);
  Value one_minus_p =
      add(scalar_mul(p, -1.0), make_constant(p->shape, std::vector<double>(m, 1.0)));
  Value pos = mul(log_(p), make_constant(p->shape, std::move(y)));
  Value neg = mul(log_(one_minus_p), make_constant(p->shape, std::move(y_inv)));
  return scalar_mul(sum_all(add(pos, neg)), -1.0 / static_cast<double>(m));
}

TrainResult train(const NolGatConfig& model_config, const TrainSettings& st,
                  const Dataset& dataset, const SplitSpec& split,
                  const HopIndex& hops, std::uint64_t seed) {
  const std::size_t n = dataset.features.n;
  if (split.labeled_mask.size() != n || dataset.labels.size() != n) {
    throw DataError("train: dataset and split sizes disagree");
  }
  TrainResult result{ParamStore(seed), {}, {}, {}, {}};
  NolGatModel model(result.params, model_config,
                    static_cast<int>(dataset.features.dim),
                    hops.max_order + 1);
  AdamState adam(st.adam);
  Value x = make_constant({n, dataset.features.dim},
                          dataset.features.rows);

  for (std::uint64_t epoch = 0; epoch < st.epochs; ++epoch) {
    ForwardOptions opts;
    opts.epoch = epoch;
    opts.training = true;
    opts.temperature =
        NolGatModel::annealed_temperature(model_config, epoch, st.epochs);
    ModelForward mf = model.forward(x, hops, seed, opts);
    Value loss =
        masked_bce_loss(mf.probabilities, dataset.labels, split.labeled_mask);
    if (!std::isfinite(loss->data[0])) {
      throw NumericError(
          detail::str("train: non-finite loss at epoch ", epoch));
    }
    result.loss_curve.push_back(loss->data[0]);
    if (st.order_log) {
      for (std::size_t l = 0; l < mf.chosen_orders.size(); ++l) {
        for (std::size_t v = 0; v < mf.chosen_orders[l].size(); ++v) {
          st.order_log->push_back({epoch, static_cast<int>(l),
                                   static_cast<std::int32_t>(v),
                                   mf.chosen_orders[l][v]});
        }
      }
    }
    backward(loss);
    adam.step(result.params);
  }

  // Evaluate on the unlabeled nodes with a fresh sampling epoch (the model
  // samples at evaluation time exactly as it does in training unless the
  // deterministic argmax mode is requested).
  ForwardOptions eval_opts;
  eval_opts.epoch = st.epochs;
  eval_opts.argmax_selection = st.eval_argmax;
  eval_opts.temperature = NolGatModel::annealed_temperature(
      model_config, st.epochs == 0 ? 0 : st.epochs - 1, st.epochs);
  ModelForward mf = model.forward(x, hops, seed, eval_opts);
  result.eval_chosen = mf.chosen_orders;
  result.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    result.predictions[i] = hard_label(mf.probabilities->data[i]);
  }
  std::vector<char> eval_mask(n);
  for (std::size_t i = 0; i < n; ++i) eval_mask[i] = !split.labeled_mask[i];
  result.metrics =
      compute_metrics(result.predictions, dataset.labels, eval_mask);
  return result;
}

}  // namespace nolgat
