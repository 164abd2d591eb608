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

#include "nolgat/optim.hpp"

#include <cmath>

#include "nolgat/errors.hpp"
#include "nolgat/rng.hpp"

namespace nolgat {

Value ParamStore::create(const std::string& name, Shape shape, Init init) {
  if (params_.count(name)) {
    throw std::invalid_argument(
        detail::str("ParamStore: duplicate parameter '", name, "'"));
  }
  std::size_t size = 1;
  for (std::size_t d : shape) size *= d;
  std::vector<double> data(size, 0.0);
  if (init == Init::kGlorotUniform) {
    const double fan_in = static_cast<double>(shape[0]);
    const double fan_out =
        shape.size() > 1 ? static_cast<double>(shape[1]) : 1.0;
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    RngStream rng = RngStream::keyed({seed_, fnv1a64(name)});
    for (double& v : data) v = rng.next_uniform(-a, a);
  }
  Value p = make_leaf(std::move(shape), std::move(data), true);
  params_.emplace(name, p);
  return p;
}

const Value& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) {
    throw std::invalid_argument(
        detail::str("ParamStore: unknown parameter '", name, "'"));
  }
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, p] : params_) {
    std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }
}

void AdamState::step(ParamStore& params) {
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (auto& [name, p] : params) {
    for (double g : p->grad) {
      if (!std::isfinite(g)) {
        throw NumericError(
            detail::str("adam_step: non-finite gradient in '", name, "'"));
      }
    }
    Moments& mo = moments_[name];
    if (mo.m1.empty()) {
      mo.m1.assign(p->numel(), 0.0);
      mo.m2.assign(p->numel(), 0.0);
    }
    for (std::size_t i = 0; i < p->numel(); ++i) {
      const double g = p->grad[i];
      // Decoupled decay first, then the bias-corrected Adam delta.
      p->data[i] -= config_.learning_rate * config_.weight_decay * p->data[i];
      mo.m1[i] = config_.beta1 * mo.m1[i] + (1.0 - config_.beta1) * g;
      mo.m2[i] = config_.beta2 * mo.m2[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = mo.m1[i] / bc1;
      const double v_hat = mo.m2[i] / bc2;
      p->data[i] -=
          config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    std::fill(p->grad.begin(), p->grad.end(), 0.0);
  }
}

double grad_check(const std::function<Value(ParamStore&)>& loss_fn,
                  ParamStore& params, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("grad_check: eps must be positive");
  }
  params.zero_grads();
  Value loss = loss_fn(params);
  if (loss->numel() != 1) {
    throw std::invalid_argument("grad_check: loss must be scalar");
  }
  if (!std::isfinite(loss->data[0])) {
    throw NumericError("grad_check: non-finite loss at the base point");
  }
  backward(loss);

  std::map<std::string, std::vector<double>> analytic;
  for (const auto& [name, p] : params) analytic[name] = p->grad;

  double max_rel = 0.0;
  for (const auto& [name, p] : params) {
    for (std::size_t i = 0; i < p->numel(); ++i) {
      const double saved = p->data[i];
      p->data[i] = saved + eps;
      const double f_plus = loss_fn(params)->data[0];
      p->data[i] = saved - eps;
      const double f_minus = loss_fn(params)->data[0];
      p->data[i] = saved;
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        throw NumericError(detail::str(
            "grad_check: non-finite loss perturbing '", name, "' entry ", i));
      }
      const double fd = (f_plus - f_minus) / (2.0 * eps);
      const double a = analytic[name][i];
      const double rel =
          std::abs(a - fd) / std::max(1e-8, std::abs(a) + std::abs(fd));
      max_rel = std::max(max_rel, rel);
    }
  }
  params.zero_grads();
  return max_rel;
}

}  // namespace nolgat
