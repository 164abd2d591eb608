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

#include "nolgat/featurize.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nolgat/errors.hpp"
#include "nolgat/rng.hpp"

namespace nolgat {

std::vector<double> hashed_tf_row(std::string_view text, std::size_t dim,
                                  const std::string& doc_id) {
  std::vector<double> row(dim, 0.0);
  std::string token;
  bool any = false;
  auto flush = [&] {
    if (token.empty()) return;
    row[fnv1a64(token) % dim] += 1.0;
    token.clear();
    any = true;
  };
  for (char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      token.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  if (!any) {
    throw DataError(detail::str("featurize: document '", doc_id,
                                "' has no tokens"));
  }
  double norm = 0.0;
  for (double v : row) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : row) v /= norm;
  return row;
}

FeatureMatrix hashed_tf(const std::vector<std::string>& docs,
                        std::size_t dim) {
  FeatureMatrix fm;
  fm.n = docs.size();
  fm.dim = dim;
  fm.rows.reserve(fm.n * dim);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::vector<double> row =
        hashed_tf_row(docs[i], dim, std::to_string(i));
    fm.rows.insert(fm.rows.end(), row.begin(), row.end());
  }
  return fm;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::int8_t parse_label(const std::string& v, const std::string& where) {
  if (v == "0") return 0;
  if (v == "1") return 1;
  throw DataError(detail::str("label must be 0 or 1 at ", where, ", got '", v,
                              "'"));
}

}  // namespace

Dataset load_precomputed_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(detail::str("cannot open dataset '", path, "'"));
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(detail::str("dataset '", path, "' is empty"));
  }
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    throw DataError(detail::str(
        "dataset '", path, "': header must start with id,label,f0,..."));
  }
  const std::size_t dim = header.size() - 2;

  Dataset ds;
  ds.features.dim = dim;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    const std::string where = detail::str(path, ":", line_no);
    if (f.size() != header.size()) {
      throw DataError(detail::str("row '", f.empty() ? "" : f[0], "' at ",
                                  where, " has ", f.size() - 2,
                                  " features, expected ", dim));
    }
    ds.ids.push_back(f[0]);
    ds.labels.push_back(parse_label(f[1], where));
    for (std::size_t j = 2; j < f.size(); ++j) {
      try {
        std::size_t pos = 0;
        const double v = std::stod(f[j], &pos);
        if (pos != f[j].size()) throw std::invalid_argument(f[j]);
        ds.features.rows.push_back(v);
      } catch (const std::exception&) {
        throw DataError(detail::str("bad feature value '", f[j], "' at ",
                                    where));
      }
    }
  }
  ds.features.n = ds.ids.size();
  if (ds.features.n == 0) {
    throw DataError(detail::str("dataset '", path, "' has no rows"));
  }
  ds.labeled_mask.assign(ds.features.n, 1);
  return ds;
}

Dataset load_text_corpus(const std::string& docs_path,
                         const std::string& labels_path, std::size_t dim) {
  std::ifstream docs_in(docs_path);
  if (!docs_in) {
    throw DataError(detail::str("cannot open corpus '", docs_path, "'"));
  }
  std::ifstream labels_in(labels_path);
  if (!labels_in) {
    throw DataError(detail::str("cannot open label file '", labels_path, "'"));
  }
  std::vector<std::string> docs;
  std::vector<std::int8_t> labels;
  std::string line;
  while (std::getline(docs_in, line)) docs.push_back(line);
  std::size_t line_no = 0;
  while (std::getline(labels_in, line)) {
    ++line_no;
    if (line.empty()) continue;
    labels.push_back(
        parse_label(line, detail::str(labels_path, ":", line_no)));
  }
  if (docs.size() != labels.size()) {
    throw DataError(detail::str("corpus has ", docs.size(), " documents but ",
                                labels.size(), " labels"));
  }
  return dataset_from_corpus(docs, labels, dim);
}

Dataset dataset_from_corpus(const std::vector<std::string>& docs,
                            const std::vector<std::int8_t>& labels,
                            std::size_t dim) {
  Dataset ds;
  ds.features = hashed_tf(docs, dim);
  ds.labels = labels;
  ds.labeled_mask.assign(docs.size(), 1);
  ds.ids.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ds.ids.push_back(std::to_string(i));
  }
  return ds;
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.data.empty()) {
    throw ConfigError("config: data path is required");
  }
  if (config.featurizer == "precomputed") {
    return load_precomputed_csv(config.data);
  }
  if (config.labels.empty()) {
    throw ConfigError("config: hashed-tf featurizer needs a labels file");
  }
  return load_text_corpus(config.data, config.labels, config.feature_dim);
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(detail::str("cannot open '", path, "' for writing"));
  out << "id,label";
  for (std::size_t j = 0; j < ds.features.dim; ++j) out << ",f" << j;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < ds.features.n; ++i) {
    out << ds.ids[i] << ',' << static_cast<int>(ds.labels[i]);
    for (double v : ds.features.row(i)) out << ',' << v;
    out << '\n';
  }
}

}  // namespace nolgat
