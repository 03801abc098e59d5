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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.h"
#include "xal/dataset.h"
#include "xal/errors.h"

namespace xal {
namespace {

DatasetDecl TinyDecl() {
  DatasetDecl d;
  d.columns = {{"age", ColumnRole::kNumeric, {}},
               {"job", ColumnRole::kCategorical, {"exec", "clerk", "sales"}},
               {"income", ColumnRole::kLabel, {}}};
  return d;
}

LoadedData LoadText(const std::string& text, const DatasetDecl& decl) {
  std::istringstream in(text);
  return LoadDataset(in, decl);
}

TEST(LoadDataset, ParsesWellFormedRows) {
  const auto data = LoadText("30, exec, >50K\n40, clerk, <=50K\n50, sales, <=50K.\n", TinyDecl());
  ASSERT_EQ(data.records.size(), 3u);
  EXPECT_EQ(data.records[0].label, 1);
  EXPECT_EQ(data.records[2].label, 0);
  EXPECT_EQ(std::get<double>(data.records[1].values[0]), 40.0);
  EXPECT_EQ(std::get<std::string>(data.records[1].values[1]), "clerk");
  EXPECT_EQ(data.records[2].id, 2);
  EXPECT_EQ(data.report.accepted, 3);
}

TEST(LoadDataset, StrictPolicyRejectsUnknownTokenWithRow) {
  try {
    LoadText("30, exec, >50K\n40, pilot, <=50K\n", TinyDecl());
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 2);
    EXPECT_NE(std::string(e.what()).find("pilot"), std::string::npos);
  }
}

TEST(LoadDataset, RejectPolicyDropsAndCounts) {
  DatasetDecl d = TinyDecl();
  d.token_policy = TokenPolicy::kReject;
  const auto data = LoadText("30, exec, >50K\n40, pilot, <=50K\n", d);
  EXPECT_EQ(data.records.size(), 1u);
  EXPECT_EQ(data.report.rejected_token, 1);
}

TEST(LoadDataset, DropsMissingSkipsCommentsAndBlankLines) {
  const auto data = LoadText("|1x3 Cross validator\n\n30, ?, >50K\n41, sales, <=50K\n", TinyDecl());
  EXPECT_EQ(data.records.size(), 1u);
  EXPECT_EQ(data.report.dropped_missing, 1);
  EXPECT_EQ(data.report.lines_read, 2);
  EXPECT_EQ(data.records[0].id, 0);
}

TEST(LoadDataset, RowLevelErrors) {
  EXPECT_THROW(LoadText("30, exec\n", TinyDecl()), DataError);
  EXPECT_THROW(LoadText("thirty, exec, >50K\n", TinyDecl()), DataError);
  const auto data = LoadText("30, exec, maybe\n", TinyDecl());
  EXPECT_EQ(data.report.rejected_label, 1);
  EXPECT_THROW(LoadDataset("/nonexistent/adult.data", TinyDecl()), DataError);
}

TEST(LoadDataset, HeaderReordersColumns) {
  DatasetDecl d = TinyDecl();
  d.has_header = true;
  const auto data = LoadText("income,job,age\n>50K,sales,33\n", d);
  ASSERT_EQ(data.records.size(), 1u);
  EXPECT_EQ(std::get<double>(data.records[0].values[0]), 33.0);
  EXPECT_EQ(std::get<std::string>(data.records[0].values[1]), "sales");
  EXPECT_THROW(LoadText("income,role,age\n", d), DataError);
}

TEST(LoadDataset, AdultSnippet) {
  const auto data = LoadText(testing::AdultSnippet(), DatasetDecl::AdultIncome());
  EXPECT_EQ(data.report.lines_read, 6);
  EXPECT_EQ(data.records.size(), 5u);
  EXPECT_EQ(data.report.dropped_missing, 1);
  EXPECT_EQ(data.attributes.size(), 10u);
}

TEST(LoadDataset, FullAdultMatchesLineCountOracle) {
  std::ifstream in(testing::AdultDataPath());
  ASSERT_TRUE(in) << testing::AdultDataPath();
  std::int64_t lines = 0, with_missing = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++lines;
    if (line.find('?') != std::string::npos) ++with_missing;
  }
  const auto data = LoadDataset(testing::AdultDataPath(), DatasetDecl::AdultIncomeAllFeatures());
  EXPECT_EQ(data.report.lines_read, lines);
  EXPECT_EQ(static_cast<std::int64_t>(data.records.size()), lines - with_missing);
  EXPECT_EQ(lines, 32561);
}

TEST(DatasetDecl, WithFeaturesRejectsUnknown) {
  const std::vector<std::string> bad = {"age", "shoe-size"};
  EXPECT_THROW(DatasetDecl::AdultIncome().WithFeatures(bad), InvalidArgument);
  const std::vector<std::string> two = {"sex", "age"};
  const auto names = DatasetDecl::AdultIncomeAllFeatures().WithFeatures(two).FeatureNames();
  EXPECT_EQ(names.size(), 2u);
}

LoadedData NumericData(std::vector<double> values) {
  LoadedData d;
  d.attributes = {{"v", FeatureKind::kNumeric}};
  for (std::size_t i = 0; i < values.size(); ++i) {
    d.records.push_back({static_cast<std::int64_t>(i), {values[i]}, static_cast<int>(i % 2)});
  }
  return d;
}

TEST(FitSchema, StandardizesWithPopulationStd) {
  const FeatureSchema s = FitSchema(NumericData({1, 2, 3}));
  EXPECT_DOUBLE_EQ(s.feature(0).mean, 2.0);
  EXPECT_NEAR(s.feature(0).scale, std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(FitSchema, ConstantFeatureClampsScale) {
  const LoadedData d = NumericData({5, 5, 5});
  const FeatureSchema s = FitSchema(d);
  EXPECT_EQ(s.feature(0).scale, 1.0);
  EXPECT_FALSE(s.warnings().empty());
  for (const auto& r : d.records) EXPECT_EQ(Encode(r, s).x[0], 0.0);
}

TEST(FitSchema, CategoriesInFirstSeenOrder) {
  LoadedData d;
  d.attributes = {{"c", FeatureKind::kCategorical}};
  for (const char* t : {"a", "b", "a"}) {
    d.records.push_back({static_cast<std::int64_t>(d.records.size()), {std::string(t)}, 0});
  }
  const FeatureSchema s = FitSchema(d);
  EXPECT_EQ(s.feature(0).categories, (std::vector<std::string>{"a", "b"}));
  EXPECT_THROW(FitSchema(LoadedData{d.attributes, {}, {}}), InvalidArgument);
}

TEST(Encode, MatchesHandEncoding) {
  LoadedData d;
  d.attributes = {{"age", FeatureKind::kNumeric}, {"job", FeatureKind::kCategorical}};
  d.records = {{0, {10.0, std::string("x")}, 0},
               {1, {20.0, std::string("y")}, 1},
               {2, {30.0, std::string("z")}, 1}};
  const FeatureSchema s = FitSchema(d);
  ASSERT_EQ(s.dimension(), 4u);
  const double scale = std::sqrt(200.0 / 3.0);
  const Eigen::VectorXd x = Encode(d.records[2], s).x;
  EXPECT_NEAR(x[0], 10.0 / scale, 1e-15);
  EXPECT_EQ(x[1], 0.0);
  EXPECT_EQ(x[2], 0.0);
  EXPECT_EQ(x[3], 1.0);
  const Eigen::VectorXd mid = Encode(d.records[1], s).x;
  EXPECT_EQ(mid[0], 0.0);
  EXPECT_EQ(mid.segment(1, 3), Eigen::Vector3d(0, 1, 0));

  RawRecord unseen{7, {15.0, std::string("w")}, 0};
  EXPECT_THROW(Encode(unseen, s), DataError);
}

TEST(Encode, OneHotBlocksSumToOneOnAdult) {
  const auto data = LoadText(testing::AdultSnippet(), DatasetDecl::AdultIncome());
  const FeatureSchema s = FitSchema(data);
  for (const auto& inst : EncodeAll(data, s)) {
    ASSERT_EQ(static_cast<std::size_t>(inst.x.size()), s.dimension());
    for (const auto& f : s.features()) {
      if (f.kind != FeatureKind::kCategorical) continue;
      EXPECT_EQ(inst.x.segment(static_cast<Eigen::Index>(f.offset),
                               static_cast<Eigen::Index>(f.width)).sum(), 1.0);
    }
  }
}

TEST(FeatureSchema, DisplayValueAndFingerprint) {
  const auto data = LoadText(testing::AdultSnippet(), DatasetDecl::AdultIncome());
  const FeatureSchema s = FitSchema(data);
  const auto inst = Encode(data.records[0], s);
  EXPECT_EQ(s.DisplayValue(*s.FindFeature("age"), inst.x), "39");
  EXPECT_EQ(s.DisplayValue(*s.FindFeature("workclass"), inst.x), "State-gov");
  EXPECT_EQ(s.Fingerprint(), FitSchema(data).Fingerprint());
  EXPECT_NE(s.Fingerprint(), FitSchema(data, 2).Fingerprint());
}

TEST(FeatureSchema, QuantileBins) {
  const FeatureSchema s = FitSchema(NumericData({1, 2, 3, 4, 5}));
  const auto& edges = s.feature(0).quantile_edges;
  EXPECT_EQ(edges, (std::vector<double>{2.0, 3.0, 4.0}));
  EXPECT_EQ(s.BinCount(0), 4u);
  EXPECT_EQ(s.BinOf(0, 2.0), 0u);
  EXPECT_EQ(s.BinOf(0, 2.5), 1u);
  EXPECT_EQ(s.BinOf(0, 9.0), 3u);
}

std::vector<EncodedInstance> Instances(int n) {
  std::vector<EncodedInstance> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)].id = i;
    v[static_cast<std::size_t>(i)].x = Eigen::VectorXd::Constant(1, i);
  }
  return v;
}

std::set<std::int64_t> TestIds(const DatasetSplit& s) {
  std::set<std::int64_t> ids;
  for (const auto& t : s.test) ids.insert(t.id);
  return ids;
}

TEST(Split, SizesDeterminismAndDisjointness) {
  const auto inst = Instances(100);
  const DatasetSplit a = Split(inst, 0.25, 7);
  EXPECT_EQ(a.test.size(), 25u);
  EXPECT_EQ(a.pool.size(), 75u);
  EXPECT_EQ(TestIds(a), TestIds(Split(inst, 0.25, 7)));
  std::set<std::int64_t> all = TestIds(a);
  for (const auto& p : a.pool) EXPECT_TRUE(all.insert(p.id).second);
  EXPECT_EQ(all.size(), 100u);
  EXPECT_TRUE(std::is_sorted(a.pool.begin(), a.pool.end(),
                             [](const auto& x, const auto& y) { return x.id < y.id; }));
  EXPECT_THROW(Split(inst, 0.0, 1), InvalidArgument);
  EXPECT_THROW(Split(inst, 1.0, 1), InvalidArgument);
}

TEST(Split, DifferentSeedsDiffer) {
  const auto inst = Instances(1000);
  EXPECT_NE(TestIds(Split(inst, 0.25, 1)), TestIds(Split(inst, 0.25, 2)));
}

TEST(ChanceStatistics, HandCounts) {
  LoadedData d;
  d.attributes = {{"job", FeatureKind::kCategorical}};
  d.records = {{0, {std::string("exec")}, 1},
               {1, {std::string("exec")}, 0},
               {2, {std::string("clerk")}, 0},
               {3, {std::string("clerk")}, 0}};
  const FeatureSchema s = FitSchema(d);
  const ChanceTable t = ChanceStatistics(d, s);
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[0].value, "exec");
  EXPECT_EQ(*t.entries[0].chance, 0.5);
  EXPECT_EQ(t.entries[0].support, 2);
  EXPECT_EQ(*t.entries[1].chance, 0.0);

  std::ostringstream csv;
  WriteChanceTableCsv(t, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "feature,value_or_bin,chance,support");
}

TEST(ChanceStatistics, NumericBinsCoverEverySupport) {
  const auto data = LoadText(testing::AdultSnippet(), DatasetDecl::AdultIncome());
  const FeatureSchema s = FitSchema(data);
  const ChanceTable t = ChanceStatistics(data, s);
  std::int64_t age_support = 0;
  for (const auto& e : t.entries) {
    if (e.feature == "age") age_support += e.support;
    if (e.support == 0) EXPECT_FALSE(e.chance.has_value());
  }
  EXPECT_EQ(age_support, static_cast<std::int64_t>(data.records.size()));
}

}  // namespace
}  // namespace xal
