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

#include "nolgat/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nolgat/errors.hpp"

namespace nolgat {

namespace {

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.empty()) parts.push_back("");
  return parts;
}

template <typename T>
T parse_num(const std::string& key, const std::string& v);

template <>
double parse_num<double>(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(detail::str("config: '", key, "': not a number: '", v, "'"));
  }
}

template <>
std::int64_t parse_num<std::int64_t>(const std::string& key,
                                     const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(
        detail::str("config: '", key, "': not an integer: '", v, "'"));
  }
  return out;
}

template <>
std::uint64_t parse_num<std::uint64_t>(const std::string& key,
                                       const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(detail::str("config: '", key,
                                  "': not a nonnegative integer: '", v, "'"));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(
      detail::str("config: '", key, "': expected true or false, got '", v, "'"));
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& key, const std::string& v, Fn fn) {
  std::vector<T> out;
  for (const std::string& item : split_list(v)) out.push_back(fn(key, item));
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.featurizer != "precomputed" && c.featurizer != "hashed-tf") {
    throw ConfigError(detail::str(
        "config: featurizer must be precomputed or hashed-tf, got '",
        c.featurizer, "'"));
  }
  if (c.knn_k.empty()) throw ConfigError("config: knn_k list is empty");
  for (std::size_t k : c.knn_k) {
    if (k < 1) throw ConfigError("config: knn_k entries must be >= 1");
  }
  if (c.label_fraction.empty()) {
    throw ConfigError("config: label_fraction list is empty");
  }
  for (double f : c.label_fraction) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError(detail::str(
          "config: label_fraction must lie in (0,1), got ", f));
    }
  }
  if (c.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  if (c.max_order_cap < 1) {
    throw ConfigError("config: max_order_cap must be >= 1");
  }
  if (c.model.layers < 1) throw ConfigError("config: layers must be >= 1");
  if (static_cast<int>(c.model.hidden.size()) != c.model.layers ||
      static_cast<int>(c.model.heads.size()) != c.model.layers) {
    throw ConfigError(
        "config: hidden and heads must list one entry per layer");
  }
  if (!(c.model.temperature > 0.0)) {
    throw ConfigError("config: temperature must be positive");
  }
  if (c.model.dropout < 0.0 || c.model.dropout >= 1.0) {
    throw ConfigError("config: dropout must lie in [0,1)");
  }
  if (c.model.phi_hop < 0) throw ConfigError("config: phi_hop must be >= 0");
  if (!c.chosen_orders_csv.empty() &&
      (c.repetitions != 1 || c.knn_k.size() != 1 ||
       c.label_fraction.size() != 1 || c.run_baseline)) {
    throw ConfigError(
        "config: chosen_orders_csv requires a single-run configuration "
        "(one k, one fraction, repetitions = 1, no baseline co-run)");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& context) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(detail::str("config ", context, ":", line_no,
                                    ": expected key = value, got '", s, "'"));
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));

    auto as_int = [&](auto& dst) {
      const std::int64_t v64 = parse_num<std::int64_t>(key, val);
      if (v64 < 0) {
        throw ConfigError(
            detail::str("config: '", key, "' must be nonnegative, got ", v64));
      }
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v64);
    };
    if (key == "featurizer") c.featurizer = val;
    else if (key == "data") c.data = val;
    else if (key == "labels") c.labels = val;
    else if (key == "feature_dim") as_int(c.feature_dim);
    else if (key == "knn_k") {
      c.knn_k = parse_list<std::size_t>(key, val, [](auto& k, auto& v) {
        return static_cast<std::size_t>(parse_num<std::uint64_t>(k, v));
      });
    } else if (key == "max_order_cap") as_int(c.max_order_cap);
    else if (key == "label_fraction") {
      c.label_fraction = parse_list<double>(key, val, parse_num<double>);
    } else if (key == "epochs") c.epochs = parse_num<std::uint64_t>(key, val);
    else if (key == "repetitions") as_int(c.repetitions);
    else if (key == "seed") c.seed = parse_num<std::uint64_t>(key, val);
    else if (key == "run_baseline") c.run_baseline = parse_bool(key, val);
    else if (key == "layers") as_int(c.model.layers);
    else if (key == "hidden") {
      c.model.hidden = parse_list<int>(key, val, [](auto& k, auto& v) {
        return static_cast<int>(parse_num<std::int64_t>(k, v));
      });
    } else if (key == "heads") {
      c.model.heads = parse_list<int>(key, val, [](auto& k, auto& v) {
        return static_cast<int>(parse_num<std::int64_t>(k, v));
      });
    } else if (key == "mlp_hidden") {
      c.model.mlp_hidden = parse_list<int>(key, val, [](auto& k, auto& v) {
        return static_cast<int>(parse_num<std::int64_t>(k, v));
      });
    } else if (key == "phi_hop") as_int(c.model.phi_hop);
    else if (key == "temperature") {
      c.model.temperature = parse_num<double>(key, val);
    } else if (key == "anneal_temperature") {
      c.model.anneal_temperature = parse_bool(key, val);
    } else if (key == "relaxation") {
      if (val == "straight-through") {
        c.model.relaxation = RelaxationMode::kStraightThrough;
      } else if (val == "dense-relaxed") {
        c.model.relaxation = RelaxationMode::kDenseRelaxed;
      } else {
        throw ConfigError(detail::str(
            "config: relaxation must be straight-through or dense-relaxed, "
            "got '", val, "'"));
      }
    } else if (key == "eval_argmax") c.eval_argmax = parse_bool(key, val);
    else if (key == "dropout") c.model.dropout = parse_num<double>(key, val);
    else if (key == "learning_rate") {
      c.adam.learning_rate = parse_num<double>(key, val);
    } else if (key == "beta1") c.adam.beta1 = parse_num<double>(key, val);
    else if (key == "beta2") c.adam.beta2 = parse_num<double>(key, val);
    else if (key == "epsilon") c.adam.epsilon = parse_num<double>(key, val);
    else if (key == "weight_decay") {
      c.adam.weight_decay = parse_num<double>(key, val);
    } else if (key == "out_json") c.out_json = val;
    else if (key == "out_csv") c.out_csv = val;
    else if (key == "chosen_orders_csv") c.chosen_orders_csv = val;
    else if (key == "parallel_runs") as_int(c.parallel_runs);
    else {
      throw ConfigError(detail::str("config ", context, ":", line_no,
                                    ": unknown key '", key, "'"));
    }
  }
  validate(c);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(detail::str("cannot open config file '", path, "'"));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T, typename Fn>
std::string join_list(const std::vector<T>& v, Fn fn) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fn(v[i]);
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_echo(
    const ExperimentConfig& c) {
  auto num = [](auto v) { return std::to_string(v); };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("featurizer", c.featurizer);
  kv.emplace_back("data", c.data);
  kv.emplace_back("labels", c.labels);
  kv.emplace_back("feature_dim", num(c.feature_dim));
  kv.emplace_back("knn_k", join_list(c.knn_k, num));
  kv.emplace_back("max_order_cap", num(c.max_order_cap));
  kv.emplace_back("label_fraction", join_list(c.label_fraction, fmt_double));
  kv.emplace_back("epochs", num(c.epochs));
  kv.emplace_back("repetitions", num(c.repetitions));
  kv.emplace_back("seed", num(c.seed));
  kv.emplace_back("run_baseline", c.run_baseline ? "true" : "false");
  kv.emplace_back("layers", num(c.model.layers));
  kv.emplace_back("hidden", join_list(c.model.hidden, num));
  kv.emplace_back("heads", join_list(c.model.heads, num));
  kv.emplace_back("mlp_hidden", join_list(c.model.mlp_hidden, num));
  kv.emplace_back("phi_hop", num(c.model.phi_hop));
  kv.emplace_back("temperature", fmt_double(c.model.temperature));
  kv.emplace_back("anneal_temperature",
                  c.model.anneal_temperature ? "true" : "false");
  kv.emplace_back("relaxation",
                  c.model.relaxation == RelaxationMode::kStraightThrough
                      ? "straight-through"
                      : "dense-relaxed");
  kv.emplace_back("eval_argmax", c.eval_argmax ? "true" : "false");
  kv.emplace_back("dropout", fmt_double(c.model.dropout));
  kv.emplace_back("learning_rate", fmt_double(c.adam.learning_rate));
  kv.emplace_back("beta1", fmt_double(c.adam.beta1));
  kv.emplace_back("beta2", fmt_double(c.adam.beta2));
  kv.emplace_back("epsilon", fmt_double(c.adam.epsilon));
  kv.emplace_back("weight_decay", fmt_double(c.adam.weight_decay));
  kv.emplace_back("out_json", c.out_json);
  kv.emplace_back("out_csv", c.out_csv);
  kv.emplace_back("chosen_orders_csv", c.chosen_orders_csv);
  kv.emplace_back("parallel_runs", num(c.parallel_runs));
  return kv;
}

}  // namespace nolgat
