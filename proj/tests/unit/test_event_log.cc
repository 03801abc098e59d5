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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "xal/digest.h"
#include "xal/errors.h"
#include "xal/event_log.h"

namespace xal {
namespace {

namespace fs = std::filesystem;

class EventLogTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("xal_event_log_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(EventLogTest, AppendThenRead) {
  {
    EventLogWriter w(Path("a.jsonl"));
    w.Append({{"type", "created"}, {"n", 1}});
    w.Append({{"type", "query_issued"}, {"x", 0.1}});
  }
  EventLogWriter again(Path("a.jsonl"));
  again.Append({{"type", "retrained"}});
  const auto events = ReadEventLog(Path("a.jsonl"));
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[1]["x"].get<double>(), 0.1);
  EXPECT_EQ(events[2]["type"], "retrained");
}

TEST_F(EventLogTest, TornTailIsIgnoredAndTruncated) {
  {
    std::ofstream out(Path("t.jsonl"));
    out << "{\"type\":\"created\"}\n{\"type\":\"query_iss";
  }
  EXPECT_EQ(ReadEventLog(Path("t.jsonl")).size(), 1u);
  EXPECT_EQ(TruncateTornTail(Path("t.jsonl")), 18u);
  EXPECT_EQ(TruncateTornTail(Path("t.jsonl")), 0u);
  EventLogWriter(Path("t.jsonl")).Append({{"type", "query_issued"}});
  const auto events = ReadEventLog(Path("t.jsonl"));
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1]["type"], "query_issued");
}

TEST_F(EventLogTest, MalformedInteriorLineIsAnError) {
  {
    std::ofstream out(Path("m.jsonl"));
    out << "{\"type\":\"created\"}\nnot json\n{\"type\":\"retrained\"}\n";
  }
  try {
    ReadEventLog(Path("m.jsonl"));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.row(), 2);
  }
  EXPECT_THROW(ReadEventLog(Path("missing.jsonl")), DataError);
  EXPECT_THROW(EventLogWriter((dir_ / "no" / "such" / "dir.jsonl").string()), Error);
}

TEST(GitBlobHash, KnownValues) {
  EXPECT_EQ(GitBlobHash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(GitBlobHash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

}  // namespace
}  // namespace xal
