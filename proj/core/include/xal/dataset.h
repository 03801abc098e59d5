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

#ifndef XAL_DATASET_H_
#define XAL_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace xal {

enum class FeatureKind { kNumeric, kCategorical };

enum class ColumnRole { kNumeric, kCategorical, kLabel, kIgnored };

// Declaration of one column of the input file, in file order.
struct ColumnDecl {
  std::string name;
  ColumnRole role = ColumnRole::kIgnored;
  // Admissible tokens of a categorical column. Empty means "any token".
  std::vector<std::string> allowed_tokens;
};

// What to do with a categorical token outside `allowed_tokens`.
enum class TokenPolicy {
  kStrict,  // Fail the load with a row-level DataError.
  kReject,  // Drop the row and count it.
};

struct DatasetDecl {
  std::vector<ColumnDecl> columns;
  std::string positive_label = ">50K";
  std::string negative_label = "<=50K";
  std::string missing_token = "?";
  bool has_header = false;
  TokenPolicy token_policy = TokenPolicy::kStrict;

  // UCI Adult column layout with the default teaching feature set.
  static DatasetDecl AdultIncome();
  // All fourteen UCI Adult attributes marked as features.
  static DatasetDecl AdultIncomeAllFeatures();

  // Copy in which exactly the named non-label columns are features. Throws
  // InvalidArgument on an unknown name.
  DatasetDecl WithFeatures(std::span<const std::string> names) const;

  std::vector<std::string> FeatureNames() const;
};

// A value parsed from the file. std::monostate marks a missing value.
using AttributeValue = std::variant<std::monostate, double, std::string>;

struct AttributeDecl {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
};

// One parsed data row. `values` is aligned with LoadedData::attributes.
struct RawRecord {
  std::int64_t id = 0;
  std::vector<AttributeValue> values;
  int label = 0;  // 1 = above the income threshold.
};

struct LoadReport {
  std::int64_t lines_read = 0;       // Data lines, excluding header/comments.
  std::int64_t accepted = 0;
  std::int64_t rejected_label = 0;   // Label token neither positive nor negative.
  std::int64_t dropped_missing = 0;  // At least one missing feature value.
  std::int64_t rejected_token = 0;   // Unknown token under TokenPolicy::kReject.
};

struct LoadedData {
  std::vector<AttributeDecl> attributes;
  std::vector<RawRecord> records;
  LoadReport report;
};

// Parses a comma-separated file. Ids are 0-based indices of the accepted
// data lines. Throws DataError on a missing file, an unknown header column, a
// row with the wrong field count, or an unparseable numeric field.
LoadedData LoadDataset(const std::string& path, const DatasetDecl& decl);
LoadedData LoadDataset(std::istream& in, const DatasetDecl& decl);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::vector<std::string> categories;  // First-seen order.
  double mean = 0.0;
  double scale = 1.0;
  std::vector<double> quantile_edges;   // Strictly increasing inner edges.
  std::size_t offset = 0;               // First encoded dimension.
  std::size_t width = 0;                // Number of encoded dimensions.
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Assigns contiguous offsets in feature order and validates invariants.
  explicit FeatureSchema(std::vector<FeatureSpec> features);

  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
  std::size_t feature_count() const { return features_.size(); }
  std::size_t dimension() const { return dimension_; }

  std::optional<std::size_t> FindFeature(std::string_view name) const;
  std::optional<std::size_t> FindCategory(std::size_t feature,
                                          std::string_view token) const;

  // Quantile bin of a raw numeric value; bins are (-inf,e0], (e0,e1], ...,
  // (e_last, inf).
  std::size_t BinOf(std::size_t feature, double raw) const;
  std::size_t BinCount(std::size_t feature) const;
  std::string BinLabel(std::size_t feature, std::size_t bin) const;

  // Human-readable value of `feature` recovered from an encoded vector.
  std::string DisplayValue(std::size_t feature, const Eigen::VectorXd& x) const;

  // Stable 64-bit content hash; models record it to bind to a schema.
  std::uint64_t Fingerprint() const;

  const std::vector<std::string>& warnings() const { return warnings_; }
  void AddWarning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  std::vector<FeatureSpec> features_;
  std::size_t dimension_ = 0;
  std::vector<std::string> warnings_;
};

inline constexpr int kDefaultQuantileCount = 4;

// Categories in first-seen order; numerics standardized by mean and
// population standard deviation (zero variance clamps the scale to 1 with a
// warning). Throws InvalidArgument on an empty record set.
FeatureSchema FitSchema(const LoadedData& data,
                        int quantile_count = kDefaultQuantileCount);

struct EncodedInstance {
  std::int64_t id = 0;
  Eigen::VectorXd x;
  int y = 0;
};

// Standardized numerics followed by one-hot categoricals, in schema order.
// Throws DataError naming the feature and token for an unseen category.
EncodedInstance Encode(const RawRecord& record, const FeatureSchema& schema);
std::vector<EncodedInstance> EncodeAll(const LoadedData& data,
                                       const FeatureSchema& schema);

struct DatasetSplit {
  std::vector<EncodedInstance> pool;  // Sorted by id.
  std::vector<EncodedInstance> test;  // Sorted by id.
  std::uint64_t seed = 0;
  double test_fraction = 0.25;
};

inline constexpr double kDefaultTestFraction = 0.25;

// Seeded shuffle; the first round(n * test_fraction) instances form the test
// set. Throws InvalidArgument unless 0 < test_fraction < 1.
DatasetSplit Split(std::span<const EncodedInstance> instances,
                   double test_fraction, std::uint64_t seed);

struct ChanceEntry {
  std::string feature;
  std::string value;           // Category token or quantile bin label.
  std::optional<double> chance;  // Unset when support is 0.
  std::int64_t support = 0;
  std::int64_t positives = 0;
};

struct ChanceTable {
  std::vector<ChanceEntry> entries;
};

ChanceTable ChanceStatistics(const LoadedData& data,
                             const FeatureSchema& schema);

// feature,value_or_bin,chance,support
void WriteChanceTableCsv(const ChanceTable& table, std::ostream& out);

}  // namespace xal

#endif  // XAL_DATASET_H_
