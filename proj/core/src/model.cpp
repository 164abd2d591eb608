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

#include "nolgat/model.hpp"

#include <algorithm>
#include <cmath>

#include "nolgat/errors.hpp"

namespace nolgat {

namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;    // sampler noise streams
constexpr std::uint64_t kDropoutTag = 0x64726f70ULL;    // dropout mask streams

Value ones_column(std::size_t rows) {
  return make_constant({rows, 1}, std::vector<double>(rows, 1.0));
}

// relaxed - detach(relaxed) is exactly zero in every entry, so adding the
// hard one-hot yields a tensor whose forward value is exactly the one-hot
// while gradients still flow through the relaxed scores.
Value straight_through(const Value& relaxed, const Value& hard_const) {
  Value zero = add(relaxed, scalar_mul(detach(relaxed), -1.0));
  return add(zero, hard_const);
}

}  // namespace

NolGatModel::NolGatModel(ParamStore& params, NolGatConfig config, int in_dim,
                         int gamma_size)
    : config_(std::move(config)), in_dim_(in_dim), gamma_size_(gamma_size) {
  const int L = config_.layers;
  if (L < 1) throw ConfigError("model: layers must be >= 1");
  if (static_cast<int>(config_.hidden.size()) != L ||
      static_cast<int>(config_.heads.size()) != L) {
    throw ConfigError(detail::str("model: hidden/heads must list ", L,
                                  " entries (one per layer)"));
  }
  if (gamma_size_ < 1) throw ConfigError("model: gamma_size must be >= 1");
  if (config_.phi_hop < 0 || config_.phi_hop >= gamma_size_) {
    throw ConfigError(detail::str("model: phi_hop ", config_.phi_hop,
                                  " outside the order set [0, ",
                                  gamma_size_ - 1, "]"));
  }
  int prev = in_dim_;
  for (int l = 0; l < L; ++l) {
    const int heads = config_.heads[static_cast<std::size_t>(l)];
    const int width = config_.hidden[static_cast<std::size_t>(l)];
    const bool last = l == L - 1;
    if (heads < 1 || width < 1) {
      throw ConfigError("model: heads and hidden widths must be positive");
    }
    if (!last && width % heads != 0) {
      throw ConfigError(detail::str("model: hidden width ", width,
                                    " not divisible by ", heads,
                                    " heads at layer ", l + 1));
    }
    if (!config_.baseline_mode) {
      // Hop network: output width is exactly |Gamma|, heads averaged.
      phi_.emplace_back(params, detail::str("phi", l),
                        GatV2Config{heads, prev, gamma_size_, false});
    }
    // Embedding network: concatenated heads in hidden layers, averaged in the
    // final layer.
    const int head_dim = last ? width : width / heads;
    psi_.emplace_back(params, detail::str("psi", l),
                      GatV2Config{heads, prev, head_dim, !last});
    prev = width;
  }
  head_.emplace(params, "mlp", prev, config_.mlp_hidden);
}

double NolGatModel::annealed_temperature(const NolGatConfig& config,
                                         std::uint64_t epoch,
                                         std::uint64_t total_epochs) {
  if (!config.anneal_temperature || total_epochs <= 1) {
    return config.temperature;
  }
  const double t = static_cast<double>(epoch) /
                   static_cast<double>(total_epochs - 1);
  return config.temperature + (0.1 - config.temperature) * std::min(1.0, t);
}

Neighborhoods NolGatModel::order_neighborhoods(const HopIndex& hops,
                                               int order) const {
  const std::size_t n = hops.n;
  Neighborhoods nb;
  nb.offsets.assign(n + 1, 0);
  if (order == 0) return nb;
  for (std::size_t v = 0; v < n; ++v) {
    nb.offsets[v + 1] =
        nb.offsets[v] +
        static_cast<std::int64_t>(hops.khop_neighbors(v, order).size());
  }
  nb.sources.reserve(static_cast<std::size_t>(nb.offsets[n]));
  for (std::size_t v = 0; v < n; ++v) {
    const auto span = hops.khop_neighbors(v, order);
    nb.sources.insert(nb.sources.end(), span.begin(), span.end());
  }
  return nb;
}

SupportMask NolGatModel::support_mask(const HopIndex& hops,
                                      std::size_t v) const {
  SupportMask mask;
  mask.supported.assign(static_cast<std::size_t>(gamma_size_), 0);
  mask.supported[0] = 1;
  for (int r = 1; r < gamma_size_; ++r) {
    mask.supported[static_cast<std::size_t>(r)] =
        hops.khop_neighbors(v, r).empty() ? 0 : 1;
  }
  return mask;
}

Value NolGatModel::hop_logits(int layer, const Value& h_prev,
                              const HopIndex& hops) const {
  if (config_.baseline_mode) {
    throw std::logic_error("hop_logits: bypassed in baseline mode");
  }
  return phi_[static_cast<std::size_t>(layer)].forward(
      h_prev, order_neighborhoods(hops, config_.phi_hop));
}

LayerForward NolGatModel::layer_forward(int layer, const Value& h_prev,
                                        const HopIndex& hops,
                                        std::uint64_t sample_seed,
                                        const ForwardOptions& opts) const {
  const std::size_t n = hops.n;
  if (hops.max_order + 1 != gamma_size_) {
    throw ConfigError(detail::str("model built for |Gamma|=", gamma_size_,
                                  " but hop index has max_order=",
                                  hops.max_order));
  }
  LayerForward out;

  if (config_.baseline_mode) {
    const int r = std::min(1, hops.max_order);
    out.h = psi_[static_cast<std::size_t>(layer)].forward(
        h_prev, order_neighborhoods(hops, r));
    out.chosen.assign(n, 1);
    return out;
  }

  const std::size_t gamma = static_cast<std::size_t>(gamma_size_);
  const double temperature =
      opts.temperature > 0.0 ? opts.temperature : config_.temperature;

  // Hop-network logits and their masked log-softmax (Gumbel-Softmax wants
  // log-probabilities; the GATv2 output is unnormalized).
  Value logits;
  if (opts.forced_order) {
    if (*opts.forced_order < 0 || *opts.forced_order >= gamma_size_) {
      throw std::invalid_argument(detail::str(
          "layer_forward: forced order ", *opts.forced_order,
          " outside [0, ", gamma_size_ - 1, "]"));
    }
    std::vector<double> pinned(n * gamma, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      pinned[v * gamma + static_cast<std::size_t>(*opts.forced_order)] = 1e6;
    }
    logits = make_constant({n, gamma}, std::move(pinned));
  } else {
    logits = hop_logits(layer, h_prev, hops);
  }
  std::vector<double> mask_data(n * gamma, 0.0);
  std::vector<SupportMask> masks(n);
  for (std::size_t v = 0; v < n; ++v) {
    masks[v] = support_mask(hops, v);
    for (std::size_t r = 0; r < gamma; ++r) {
      if (!masks[v][r]) mask_data[v * gamma + r] = kMaskedLogit;
    }
  }
  Value log_probs = row_log_softmax(
      add(logits, make_constant({n, gamma}, std::move(mask_data))));

  // One Gumbel draw per (seed, epoch, layer, node, order). Deterministic and
  // independent across nodes; zero under the argmax evaluation mode.
  std::vector<double> noise(n * gamma, 0.0);
  if (!opts.argmax_selection) {
    for (std::size_t v = 0; v < n; ++v) {
      RngStream rng = RngStream::keyed({kNoiseTag, sample_seed, opts.epoch,
                                        static_cast<std::uint64_t>(layer), v});
      for (std::size_t r = 0; r < gamma; ++r) {
        noise[v * gamma + r] = gumbel_noise(rng.next_open01());
      }
    }
  }

  // Hard selections, per node, from the same perturbed logits the relaxation
  // uses.
  std::vector<double> hard_data(n * gamma, 0.0);
  out.chosen.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const STSample s = st_sample_with_noise(
        std::span<const double>(log_probs->data.data() + v * gamma, gamma),
        std::span<const double>(noise.data() + v * gamma, gamma), temperature,
        masks[v]);
    out.chosen[v] = s.chosen;
    hard_data[v * gamma + static_cast<std::size_t>(s.chosen)] = 1.0;
  }
  Value hard = make_constant({n, gamma}, std::move(hard_data));
  Value relaxed = row_softmax(scalar_mul(
      add(log_probs, make_constant({n, gamma}, std::move(noise))),
      1.0 / temperature));

  const GatV2Layer& psi = psi_[static_cast<std::size_t>(layer)];
  if (config_.relaxation == RelaxationMode::kStraightThrough) {
    // Single aggregation over each node's chosen order. The scalar multiplier
    // is exactly 1 forward; backward it is the relaxed score of the chosen
    // order, which carries the gradient into phi.
    Neighborhoods nb;
    nb.offsets.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
      nb.offsets[v + 1] =
          nb.offsets[v] +
          static_cast<std::int64_t>(hops.khop_neighbors(v, out.chosen[v]).size());
    }
    nb.sources.reserve(static_cast<std::size_t>(nb.offsets[n]));
    for (std::size_t v = 0; v < n; ++v) {
      const auto span = hops.khop_neighbors(v, out.chosen[v]);
      nb.sources.insert(nb.sources.end(), span.begin(), span.end());
    }
    Value selected = matmul(mul(relaxed, hard), ones_column(gamma));
    Value st_scale =
        add(add(selected, scalar_mul(detach(selected), -1.0)), ones_column(n));
    out.h = mul(psi.forward(h_prev, nb), st_scale);
  } else {
    // Dense-relaxed: aggregate every populated order and mix with the ST
    // weights (hard one-hot forward unless the smooth surrogate is asked for).
    Value weights =
        opts.hard_forward ? straight_through(relaxed, hard) : relaxed;
    Value acc;
    for (int r = 0; r < gamma_size_; ++r) {
      if (r > 0 &&
          hops.lists[static_cast<std::size_t>(r) - 1].nodes.empty()) {
        continue;  // no node supports this order; weight column is exactly 0
      }
      std::vector<double> basis(gamma, 0.0);
      basis[static_cast<std::size_t>(r)] = 1.0;
      Value w_r = matmul(weights, make_constant({gamma, 1}, std::move(basis)));
      Value psi_r = psi.forward(h_prev, order_neighborhoods(hops, r));
      Value term = mul(psi_r, w_r);
      acc = acc ? add(acc, term) : term;
    }
    out.h = acc;
  }
  return out;
}

ModelForward NolGatModel::forward(const Value& x, const HopIndex& hops,
                                  std::uint64_t sample_seed,
                                  const ForwardOptions& opts) const {
  if (x->cols() != static_cast<std::size_t>(in_dim_)) {
    throw DataError(detail::str("model: feature width ", x->cols(),
                                ", model expects ", in_dim_));
  }
  ModelForward mf;
  Value h = x;
  for (int l = 0; l < config_.layers; ++l) {
    LayerForward lf = layer_forward(l, h, hops, sample_seed, opts);
    h = lf.h;
    if (opts.training && config_.dropout > 0.0 &&
        l + 1 < config_.layers) {
      const double keep = 1.0 - config_.dropout;
      std::vector<double> mask(h->numel());
      RngStream rng = RngStream::keyed({kDropoutTag, sample_seed, opts.epoch,
                                        static_cast<std::uint64_t>(l)});
      for (double& m : mask) {
        m = rng.next_open01() < keep ? 1.0 / keep : 0.0;
      }
      h = mul(h, make_constant(h->shape, std::move(mask)));
    }
    mf.chosen_orders.push_back(std::move(lf.chosen));
  }
  mf.probabilities = head_->forward(h);
  return mf;
}

}  // namespace nolgat
