/*
 * Copyright 2026 The XAL Workbench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "xal/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "xal/errors.h"

namespace xal {
namespace {

std::vector<std::string> Tokens(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseNumber(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Label tokens in the UCI test file carry a trailing period.
std::string_view StripLabelPeriod(std::string_view s) {
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return s;
}

std::string FormatNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::uint64_t Fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

DatasetDecl DatasetDecl::AdultIncomeAllFeatures() {
  DatasetDecl decl;
  decl.columns = {
      {"age", ColumnRole::kNumeric, {}},
      {"workclass", ColumnRole::kCategorical,
       Tokens({"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
               "Local-gov", "State-gov", "Without-pay", "Never-worked"})},
      {"fnlwgt", ColumnRole::kNumeric, {}},
      {"education", ColumnRole::kCategorical,
       Tokens({"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
               "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
               "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"})},
      {"education-num", ColumnRole::kNumeric, {}},
      {"marital-status", ColumnRole::kCategorical,
       Tokens({"Married-civ-spouse", "Divorced", "Never-married", "Separated",
               "Widowed", "Married-spouse-absent", "Married-AF-spouse"})},
      {"occupation", ColumnRole::kCategorical,
       Tokens({"Tech-support", "Craft-repair", "Other-service", "Sales",
               "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
               "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
               "Transport-moving", "Priv-house-serv", "Protective-serv",
               "Armed-Forces"})},
      {"relationship", ColumnRole::kCategorical,
       Tokens({"Wife", "Own-child", "Husband", "Not-in-family",
               "Other-relative", "Unmarried"})},
      {"race", ColumnRole::kCategorical,
       Tokens({"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
               "Black"})},
      {"sex", ColumnRole::kCategorical, Tokens({"Female", "Male"})},
      {"capital-gain", ColumnRole::kNumeric, {}},
      {"capital-loss", ColumnRole::kNumeric, {}},
      {"hours-per-week", ColumnRole::kNumeric, {}},
      {"native-country", ColumnRole::kCategorical,
       Tokens({"United-States", "Cambodia", "England", "Puerto-Rico", "Canada",
               "Germany", "Outlying-US(Guam-USVI-etc)", "India", "Japan",
               "Greece", "South", "China", "Cuba", "Iran", "Honduras",
               "Philippines", "Italy", "Poland", "Jamaica", "Vietnam",
               "Mexico", "Portugal", "Ireland", "France",
               "Dominican-Republic", "Laos", "Ecuador", "Taiwan", "Haiti",
               "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland",
               "Thailand", "Yugoslavia", "El-Salvador", "Trinadad&Tobago",
               "Peru", "Hong", "Holand-Netherlands"})},
      {"income", ColumnRole::kLabel, {}},
  };
  return decl;
}

DatasetDecl DatasetDecl::AdultIncome() {
  // Excludes fnlwgt, education-num, capital-gain and capital-loss.
  static const std::vector<std::string> kFeatures = {
      "age",          "workclass", "education", "marital-status",
      "occupation",   "relationship", "race",   "sex",
      "hours-per-week", "native-country"};
  return AdultIncomeAllFeatures().WithFeatures(kFeatures);
}

DatasetDecl DatasetDecl::WithFeatures(
    std::span<const std::string> names) const {
  const DatasetDecl all = AdultIncomeAllFeatures();
  DatasetDecl out = *this;
  for (const auto& name : names) {
    const bool known = std::any_of(
        out.columns.begin(), out.columns.end(), [&](const ColumnDecl& c) {
          return c.name == name && c.role != ColumnRole::kLabel;
        });
    if (!known) throw InvalidArgument("unknown feature column '" + name + "'");
  }
  for (auto& column : out.columns) {
    if (column.role == ColumnRole::kLabel) continue;
    const bool wanted =
        std::find(names.begin(), names.end(), column.name) != names.end();
    if (!wanted) {
      column.role = ColumnRole::kIgnored;
      continue;
    }
    if (column.role == ColumnRole::kIgnored) {
      // Restore the natural kind when re-enabling a column that the current
      // declaration ignores.
      const auto it = std::find_if(
          all.columns.begin(), all.columns.end(),
          [&](const ColumnDecl& c) { return c.name == column.name; });
      column.role = it != all.columns.end() && it->role != ColumnRole::kIgnored
                        ? it->role
                        : ColumnRole::kNumeric;
      if (it != all.columns.end()) column.allowed_tokens = it->allowed_tokens;
    }
  }
  return out;
}

std::vector<std::string> DatasetDecl::FeatureNames() const {
  std::vector<std::string> names;
  for (const auto& c : columns) {
    if (c.role == ColumnRole::kNumeric || c.role == ColumnRole::kCategorical) {
      names.push_back(c.name);
    }
  }
  return names;
}

LoadedData LoadDataset(const std::string& path, const DatasetDecl& decl) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  return LoadDataset(in, decl);
}

LoadedData LoadDataset(std::istream& in, const DatasetDecl& decl) {
  const std::size_t ncols = decl.columns.size();
  std::size_t label_col = ncols;
  LoadedData data;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    const auto& col = decl.columns[c];
    switch (col.role) {
      case ColumnRole::kLabel:
        if (label_col != ncols) throw InvalidArgument("multiple label columns");
        label_col = c;
        break;
      case ColumnRole::kNumeric:
        feature_cols.push_back(c);
        data.attributes.push_back({col.name, FeatureKind::kNumeric});
        break;
      case ColumnRole::kCategorical:
        feature_cols.push_back(c);
        data.attributes.push_back({col.name, FeatureKind::kCategorical});
        break;
      case ColumnRole::kIgnored:
        break;
    }
  }
  if (label_col == ncols) throw InvalidArgument("no label column declared");

  // file position -> declared column; identity unless a header reorders.
  std::vector<std::size_t> position(ncols);
  std::iota(position.begin(), position.end(), 0);
  bool header_pending = decl.has_header;

  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '|') continue;
    const auto fields = SplitFields(trimmed);

    if (header_pending) {
      header_pending = false;
      if (fields.size() != ncols) {
        throw DataError("header has " + std::to_string(fields.size()) +
                            " columns, declaration has " +
                            std::to_string(ncols),
                        line_no);
      }
      std::vector<bool> seen(ncols, false);
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const auto it = std::find_if(
            decl.columns.begin(), decl.columns.end(),
            [&](const ColumnDecl& c) { return c.name == fields[f]; });
        if (it == decl.columns.end()) {
          throw DataError("unknown column '" + std::string(fields[f]) + "'",
                          line_no);
        }
        const auto c = static_cast<std::size_t>(it - decl.columns.begin());
        if (seen[c]) {
          throw DataError("duplicate column '" + it->name + "'", line_no);
        }
        seen[c] = true;
        position[c] = f;
      }
      continue;
    }

    ++data.report.lines_read;
    if (fields.size() != ncols) {
      throw DataError("expected " + std::to_string(ncols) + " fields, got " +
                          std::to_string(fields.size()),
                      line_no);
    }

    const std::string_view label_token =
        StripLabelPeriod(fields[position[label_col]]);
    int label;
    if (label_token == decl.positive_label) {
      label = 1;
    } else if (label_token == decl.negative_label) {
      label = 0;
    } else {
      ++data.report.rejected_label;
      continue;
    }

    RawRecord record;
    record.label = label;
    record.values.reserve(feature_cols.size());
    bool missing = false;
    bool rejected = false;
    for (std::size_t c : feature_cols) {
      const auto& col = decl.columns[c];
      const std::string_view token = fields[position[c]];
      if (token.empty() || token == decl.missing_token) {
        missing = true;
        record.values.emplace_back(std::monostate{});
        continue;
      }
      if (col.role == ColumnRole::kNumeric) {
        const auto v = ParseNumber(token);
        if (!v) {
          throw DataError("column '" + col.name + "': '" + std::string(token) +
                              "' is not a number",
                          line_no);
        }
        record.values.emplace_back(*v);
        continue;
      }
      if (!col.allowed_tokens.empty() &&
          std::find(col.allowed_tokens.begin(), col.allowed_tokens.end(),
                    token) == col.allowed_tokens.end()) {
        if (decl.token_policy == TokenPolicy::kStrict) {
          throw DataError("column '" + col.name + "': unknown token '" +
                              std::string(token) + "'",
                          line_no);
        }
        rejected = true;
      }
      record.values.emplace_back(std::string(token));
    }
    if (rejected) {
      ++data.report.rejected_token;
      continue;
    }
    if (missing) {
      ++data.report.dropped_missing;
      continue;
    }
    record.id = static_cast<std::int64_t>(data.records.size());
    data.records.push_back(std::move(record));
  }
  if (header_pending) throw DataError("dataset has no header line");
  data.report.accepted = static_cast<std::int64_t>(data.records.size());
  return data;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features)
    : features_(std::move(features)) {
  std::size_t offset = 0;
  for (auto& f : features_) {
    if (f.kind == FeatureKind::kNumeric) {
      f.width = 1;
      if (!(f.scale > 0.0) || !std::isfinite(f.mean)) {
        throw InvalidArgument("feature '" + f.name + "': invalid scale");
      }
      for (std::size_t i = 1; i < f.quantile_edges.size(); ++i) {
        if (!(f.quantile_edges[i - 1] < f.quantile_edges[i])) {
          throw InvalidArgument("feature '" + f.name +
                                "': quantile edges not strictly increasing");
        }
      }
    } else {
      f.width = f.categories.size();
      std::vector<std::string> sorted = f.categories;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("feature '" + f.name + "': duplicate category");
      }
    }
    f.offset = offset;
    offset += f.width;
  }
  dimension_ = offset;
}

std::optional<std::size_t> FeatureSchema::FindFeature(
    std::string_view name) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::FindCategory(
    std::size_t feature, std::string_view token) const {
  const auto& cats = features_.at(feature).categories;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    if (cats[i] == token) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::BinOf(std::size_t feature, double raw) const {
  const auto& edges = features_.at(feature).quantile_edges;
  return static_cast<std::size_t>(
      std::lower_bound(edges.begin(), edges.end(), raw) - edges.begin());
}

std::size_t FeatureSchema::BinCount(std::size_t feature) const {
  return features_.at(feature).quantile_edges.size() + 1;
}

std::string FeatureSchema::BinLabel(std::size_t feature,
                                    std::size_t bin) const {
  const auto& edges = features_.at(feature).quantile_edges;
  if (edges.empty()) return "(-inf, inf)";
  const std::string lo = bin == 0 ? "-inf" : FormatNumber(edges[bin - 1]);
  if (bin >= edges.size()) return "(" + lo + ", inf)";
  return "(" + lo + ", " + FormatNumber(edges[bin]) + "]";
}

std::string FeatureSchema::DisplayValue(std::size_t feature,
                                        const Eigen::VectorXd& x) const {
  const auto& f = features_.at(feature);
  if (f.kind == FeatureKind::kNumeric) {
    return FormatNumber(f.mean + x[static_cast<Eigen::Index>(f.offset)] * f.scale);
  }
  for (std::size_t k = 0; k < f.width; ++k) {
    if (x[static_cast<Eigen::Index>(f.offset + k)] != 0.0) return f.categories[k];
  }
  return "?";
}

std::uint64_t FeatureSchema::Fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  char buf[64];
  for (const auto& f : features_) {
    h = Fnv1a(h, f.name);
    h = Fnv1a(h, f.kind == FeatureKind::kNumeric ? "|n|" : "|c|");
    for (const auto& c : f.categories) {
      h = Fnv1a(h, c);
      h = Fnv1a(h, "\x1f");
    }
    std::snprintf(buf, sizeof(buf), "%a|%a|", f.mean, f.scale);
    h = Fnv1a(h, buf);
    for (double e : f.quantile_edges) {
      std::snprintf(buf, sizeof(buf), "%a,", e);
      h = Fnv1a(h, buf);
    }
    h = Fnv1a(h, "\x1e");
  }
  return h;
}

FeatureSchema FitSchema(const LoadedData& data, int quantile_count) {
  if (data.records.empty()) throw InvalidArgument("FitSchema: no records");
  if (quantile_count < 1) throw InvalidArgument("quantile_count must be >= 1");
  std::vector<FeatureSpec> specs;
  std::vector<std::string> warnings;
  const double n = static_cast<double>(data.records.size());
  for (std::size_t a = 0; a < data.attributes.size(); ++a) {
    FeatureSpec spec;
    spec.name = data.attributes[a].name;
    spec.kind = data.attributes[a].kind;
    if (spec.kind == FeatureKind::kCategorical) {
      std::unordered_map<std::string, bool> seen;
      for (const auto& r : data.records) {
        const auto* token = std::get_if<std::string>(&r.values[a]);
        if (token == nullptr) {
          throw InvalidArgument("feature '" + spec.name +
                                "': non-categorical value");
        }
        if (seen.emplace(*token, true).second) spec.categories.push_back(*token);
      }
    } else {
      std::vector<double> values;
      values.reserve(data.records.size());
      for (const auto& r : data.records) {
        const auto* v = std::get_if<double>(&r.values[a]);
        if (v == nullptr) {
          throw InvalidArgument("feature '" + spec.name + "': non-numeric value");
        }
        values.push_back(*v);
      }
      double sum = 0.0;
      for (double v : values) sum += v;
      spec.mean = sum / n;
      double ss = 0.0;
      for (double v : values) ss += (v - spec.mean) * (v - spec.mean);
      spec.scale = std::sqrt(ss / n);
      if (!(spec.scale > 0.0)) {
        spec.scale = 1.0;
        warnings.push_back("feature '" + spec.name +
                           "' has zero variance; scale clamped to 1");
      }
      std::sort(values.begin(), values.end());
      for (int k = 1; k < quantile_count; ++k) {
        // Linear interpolation between closest ranks.
        const double pos = (values.size() - 1) * static_cast<double>(k) /
                           quantile_count;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        const double edge = values[lo] + (pos - lo) * (values[hi] - values[lo]);
        if (spec.quantile_edges.empty() || edge > spec.quantile_edges.back()) {
          spec.quantile_edges.push_back(edge);
        }
      }
    }
    specs.push_back(std::move(spec));
  }
  FeatureSchema schema(std::move(specs));
  for (auto& w : warnings) schema.AddWarning(std::move(w));
  return schema;
}

EncodedInstance Encode(const RawRecord& record, const FeatureSchema& schema) {
  if (record.values.size() != schema.feature_count()) {
    throw InvalidArgument("record does not conform to schema");
  }
  EncodedInstance out;
  out.id = record.id;
  out.y = record.label;
  out.x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(schema.dimension()));
  for (std::size_t i = 0; i < schema.feature_count(); ++i) {
    const auto& f = schema.feature(i);
    const auto offset = static_cast<Eigen::Index>(f.offset);
    if (f.kind == FeatureKind::kNumeric) {
      const auto* v = std::get_if<double>(&record.values[i]);
      if (v == nullptr) {
        throw DataError("feature '" + f.name + "': expected a number", record.id);
      }
      out.x[offset] = (*v - f.mean) / f.scale;
    } else {
      const auto* token = std::get_if<std::string>(&record.values[i]);
      if (token == nullptr) {
        throw DataError("feature '" + f.name + "': expected a category",
                        record.id);
      }
      const auto k = schema.FindCategory(i, *token);
      if (!k) {
        throw DataError("feature '" + f.name + "': category '" + *token +
                        "' unseen at fit time");
      }
      out.x[offset + static_cast<Eigen::Index>(*k)] = 1.0;
    }
  }
  return out;
}

std::vector<EncodedInstance> EncodeAll(const LoadedData& data,
                                       const FeatureSchema& schema) {
  std::vector<EncodedInstance> out;
  out.reserve(data.records.size());
  for (const auto& r : data.records) out.push_back(Encode(r, schema));
  return out;
}

DatasetSplit Split(std::span<const EncodedInstance> instances,
                   double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(instances.size())));

  DatasetSplit split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  std::vector<std::size_t> test_idx(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> pool_idx(order.begin() + n_test, order.end());
  auto by_id = [&](std::size_t a, std::size_t b) {
    return instances[a].id < instances[b].id;
  };
  std::sort(test_idx.begin(), test_idx.end(), by_id);
  std::sort(pool_idx.begin(), pool_idx.end(), by_id);
  for (auto i : test_idx) split.test.push_back(instances[i]);
  for (auto i : pool_idx) split.pool.push_back(instances[i]);
  return split;
}

ChanceTable ChanceStatistics(const LoadedData& data,
                             const FeatureSchema& schema) {
  if (data.attributes.size() != schema.feature_count()) {
    throw InvalidArgument("schema does not match data attributes");
  }
  ChanceTable table;
  for (std::size_t i = 0; i < schema.feature_count(); ++i) {
    const auto& f = schema.feature(i);
    const std::size_t buckets = f.kind == FeatureKind::kCategorical
                                    ? f.categories.size()
                                    : schema.BinCount(i);
    std::vector<std::int64_t> support(buckets, 0), positives(buckets, 0);
    for (const auto& r : data.records) {
      std::size_t b;
      if (f.kind == FeatureKind::kCategorical) {
        const auto k = schema.FindCategory(i, std::get<std::string>(r.values[i]));
        if (!k) {
          throw DataError("feature '" + f.name + "': category unseen at fit time",
                          r.id);
        }
        b = *k;
      } else {
        b = schema.BinOf(i, std::get<double>(r.values[i]));
      }
      ++support[b];
      positives[b] += r.label;
    }
    for (std::size_t b = 0; b < buckets; ++b) {
      ChanceEntry e;
      e.feature = f.name;
      e.value = f.kind == FeatureKind::kCategorical ? f.categories[b]
                                                     : schema.BinLabel(i, b);
      e.support = support[b];
      e.positives = positives[b];
      if (support[b] > 0) {
        e.chance = static_cast<double>(positives[b]) /
                   static_cast<double>(support[b]);
      }
      table.entries.push_back(std::move(e));
    }
  }
  return table;
}

void WriteChanceTableCsv(const ChanceTable& table, std::ostream& out) {
  out << "feature,value_or_bin,chance,support\n";
  for (const auto& e : table.entries) {
    std::string value = e.value;
    if (value.find(',') != std::string::npos) value = "\"" + value + "\"";
    out << e.feature << ',' << value << ',';
    if (e.chance) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", *e.chance);
      out << buf;
    }
    out << ',' << e.support << '\n';
  }
}

}  // namespace xal
