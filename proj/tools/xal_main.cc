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

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "xal/dataset.h"
#include "xal/errors.h"
#include "xal/harness.h"
#include "xal/service.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw xal::InvalidArgument("empty seed range '" + item + "'");
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw xal::InvalidArgument("bad seed list entry '" + item + "'");
    }
  }
  if (seeds.empty()) throw xal::InvalidArgument("empty seed list");
  return seeds;
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> ParseDoubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : SplitCommas(text)) {
    try {
      out.push_back(std::stod(s));
    } catch (const std::logic_error&) {
      throw xal::InvalidArgument("bad number '" + s + "'");
    }
  }
  return out;
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw xal::InvalidArgument("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw xal::InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) throw xal::Error("cannot write '" + path.string() + "'");
}

// Flags shared by the experiment subcommands. Explicit flags override the
// values read from --config.
struct CommonFlags {
  std::string config_path;
  std::string data;
  std::string features;
  std::string seeds;
  std::string out;
  std::uint64_t split_seed = 0;
  double lambda = 1.0;
  int threads = 0;
  CLI::Option* split_seed_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void Attach(CLI::App* app) {
    app->add_option("--config", config_path, "Experiment configuration (JSON)");
    app->add_option("--data", data, "Adult income data file");
    app->add_option("--features", features, "Comma-separated feature columns");
    app->add_option("--seeds", seeds, "Seeds, e.g. 1-10 or 1,4,7");
    app->add_option("--out", out, "Output directory");
    split_seed_opt = app->add_option("--split-seed", split_seed, "Seed of the pool/test split");
    lambda_opt = app->add_option("--lambda", lambda, "L2 regularization strength");
    threads_opt = app->add_option("--threads", threads, "Worker threads (0: all cores)");
  }

  xal::ExperimentConfig Resolve() const {
    xal::ExperimentConfig c;
    if (!config_path.empty()) c = xal::ExperimentConfig::FromJson(ReadJsonFile(config_path));
    if (!data.empty()) c.dataset_path = data;
    if (c.dataset_path.empty()) c.dataset_path = XAL_DEFAULT_DATASET;
    if (!features.empty()) c.features = SplitCommas(features);
    if (!seeds.empty()) c.seeds = ParseSeedList(seeds);
    if (!out.empty()) c.output_dir = out;
    if (*split_seed_opt) c.split_seed = split_seed;
    if (*lambda_opt) c.lambda = lambda;
    if (*threads_opt) c.threads = threads;
    return c;
  }
};

xal::Corpus LoadCorpus(const xal::ExperimentConfig& c) {
  return xal::Corpus::Load(c.dataset_path, c.Decl(), c.split_seed, c.test_fraction);
}

fs::path OutputDir(const xal::ExperimentConfig& c, const std::string& fallback) {
  fs::path dir = c.output_dir.empty() ? fs::path(fallback) : fs::path(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

void WriteManifest(const fs::path& dir, const std::string& command,
                   const xal::ExperimentConfig& c, const xal::Corpus& corpus) {
  WriteFile(dir / "manifest.json", xal::Manifest(command, c, corpus).dump(2) + "\n");
}

int RunCurve(const CommonFlags& flags, int queries, CLI::Option* queries_opt) {
  xal::ExperimentConfig c = flags.Resolve();
  if (*queries_opt) c.curve_queries = queries;
  const xal::Corpus corpus = LoadCorpus(c);
  const xal::LearningCurveResult r = xal::RunLearningCurve(corpus, c);
  const fs::path dir = OutputDir(c, "out/curve");
  std::ostringstream per_seed, mean;
  xal::WriteCurveCsv(r, per_seed, mean);
  WriteFile(dir / "curve_per_seed.csv", per_seed.str());
  WriteFile(dir / "curve_mean.csv", mean.str());
  WriteManifest(dir, "curve", c, corpus);

  std::printf("seeds: %zu  pool: %zu  test: %zu\n", r.seeds.size(),
              corpus.split->pool.size(), corpus.split->test.size());
  std::printf("mean accuracy at 0 queries: %.4f\n", r.mean.front().accuracy);
  std::printf("mean accuracy at %d queries: %.4f (se %.4f)\n",
              r.mean.back().queries_answered, r.mean.back().accuracy,
              r.accuracy_stderr.back());
  if (r.stopping_query) {
    std::printf("stopping check first fires at query %d\n", *r.stopping_query);
  } else {
    std::printf("stopping check never fires\n");
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

void ApplySnapshotFlags(xal::ExperimentConfig& c, const std::string& conditions,
                        const std::string& stages, const std::string& profiles,
                        int queries, CLI::Option* queries_opt) {
  if (!conditions.empty()) {
    c.conditions.clear();
    for (const auto& s : SplitCommas(conditions)) c.conditions.push_back(xal::ParseCondition(s));
  }
  if (!stages.empty()) {
    c.stages.clear();
    for (const auto& s : SplitCommas(stages)) c.stages.push_back(xal::ParseStage(s));
  }
  if (!profiles.empty()) {
    json j = ReadJsonFile(profiles);
    if (!j.is_array()) throw xal::InvalidArgument("profiles file must hold a JSON array");
    c.profiles.clear();
    for (const auto& p : j) c.profiles.push_back(xal::ProfileFromJson(p));
  }
  if (*queries_opt) c.queries = queries;
}

int RunSnapshot(xal::ExperimentConfig c) {
  const xal::Corpus corpus = LoadCorpus(c);
  const xal::ExperimentReport r = xal::RunSnapshotExperiment(corpus, c);
  const fs::path dir = OutputDir(c, "out/snapshot");
  std::ostringstream rows, aggregates, feedback;
  xal::WriteReportCsv(r, rows, aggregates);
  xal::WriteFeedbackSummaryCsv(r, feedback);
  WriteFile(dir / "sessions.csv", rows.str());
  WriteFile(dir / "aggregates.csv", aggregates.str());
  WriteFile(dir / "feedback_summary.csv", feedback.str());
  WriteManifest(dir, "snapshot", c, corpus);

  std::printf("%-6s %-4s %-16s %5s %14s %14s %14s %10s\n", "stage", "cond", "profile",
              "runs", "final_acc", "acc_gain", "f1_gain", "agree");
  for (const auto& a : r.aggregates) {
    std::printf("%-6s %-4s %-16s %5d %7.4f±%.4f %7.4f±%.4f %7.4f±%.4f %10.4f\n",
                std::string(xal::ToString(a.stage)).c_str(),
                std::string(xal::ToString(a.condition)).c_str(), a.profile.c_str(), a.runs,
                a.final_accuracy.mean, a.final_accuracy.se, a.accuracy_improvement.mean,
                a.accuracy_improvement.se, a.f1_improvement.mean, a.f1_improvement.se,
                a.agreement_rate.mean);
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return 0;
}

int RunCompare(xal::ExperimentConfig c) {
  const xal::Corpus corpus = LoadCorpus(c);
  const auto rows = xal::CompareConditions(corpus, c);
  const fs::path dir = OutputDir(c, "out/compare");
  std::ostringstream out;
  xal::WriteComparisonCsv(rows, out);
  WriteFile(dir / "comparison.csv", out.str());
  WriteManifest(dir, "compare", c, corpus);
  std::printf("%zu sessions; wrote %s\n", rows.size(), dir.string().c_str());
  return 0;
}

int RunChanceTable(const std::string& data, const std::string& features,
                   const std::string& out) {
  xal::ExperimentConfig c;
  c.dataset_path = data.empty() ? XAL_DEFAULT_DATASET : data;
  if (!features.empty()) c.features = SplitCommas(features);
  const xal::LoadedData loaded = xal::LoadDataset(c.dataset_path, c.Decl());
  const xal::FeatureSchema schema = xal::FitSchema(loaded);
  const xal::ChanceTable table = xal::ChanceStatistics(loaded, schema);
  if (out.empty() || out == "-") {
    xal::WriteChanceTableCsv(table, std::cout);
  } else {
    std::ofstream f(out);
    xal::WriteChanceTableCsv(table, f);
    if (!f) throw xal::Error("cannot write '" + out + "'");
  }
  return 0;
}

struct ServeFlags {
  std::string data;
  std::string features;
  std::uint64_t split_seed = 0;
  xal::ServiceConfig service;
};

int RunServe(const ServeFlags& flags) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  xal::ExperimentConfig c;
  c.dataset_path = flags.data.empty() ? XAL_DEFAULT_DATASET : flags.data;
  if (!flags.features.empty()) c.features = SplitCommas(flags.features);
  c.split_seed = flags.split_seed;
  auto corpus = std::make_shared<const xal::Corpus>(LoadCorpus(c));
  xal::SessionService service(corpus, flags.service);
  xal::HttpServer server(service);
  const int port = server.Bind(flags.service.host, flags.service.port);
  if (port < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", flags.service.host.c_str(),
                 flags.service.port);
    return 1;
  }
  std::printf("listening on %s:%d (%zu sessions restored)\n", flags.service.host.c_str(),
              port, service.session_count());
  std::fflush(stdout);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  const bool ok = server.Serve();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable active learning workbench"};
  app.require_subcommand(1);

  CommonFlags curve_flags;
  int curve_queries = 0;
  auto* curve = app.add_subcommand("curve", "Oracle learning curves over seeds");
  curve_flags.Attach(curve);
  auto* curve_queries_opt =
      curve->add_option("--queries", curve_queries, "Queries per seed (default 200)");

  CommonFlags snap_flags;
  std::string conditions, stages, profiles;
  int snap_queries = 0;
  auto* snapshot = app.add_subcommand("snapshot", "Early/late-stage snapshot sessions");
  snap_flags.Attach(snapshot);
  snapshot->add_option("--conditions", conditions, "Comma-separated AL,CL,XAL");
  snapshot->add_option("--stages", stages, "Comma-separated early,late");
  snapshot->add_option("--profiles", profiles, "Annotator profiles (JSON array file)");
  auto* snap_queries_opt =
      snapshot->add_option("--queries", snap_queries, "Queries per session (default 20)");

  CommonFlags cmp_flags;
  std::string cmp_conditions, cmp_stages, knowledge, anchor;
  int cmp_queries = 0;
  auto* compare = app.add_subcommand("compare", "Conditions over an anchored-annotator grid");
  cmp_flags.Attach(compare);
  compare->add_option("--conditions", cmp_conditions, "Comma-separated AL,CL,XAL");
  compare->add_option("--stages", cmp_stages, "Comma-separated early,late");
  compare->add_option("--knowledge", knowledge, "Comma-separated knowledge levels q");
  compare->add_option("--anchor", anchor, "Comma-separated anchoring levels alpha");
  auto* cmp_queries_opt =
      compare->add_option("--queries", cmp_queries, "Queries per session (default 20)");

  std::string chance_data, chance_features, chance_out;
  auto* chance = app.add_subcommand("chance-table", "Per-value positive-class rates");
  chance->add_option("--data", chance_data, "Adult income data file");
  chance->add_option("--features", chance_features, "Comma-separated feature columns");
  chance->add_option("--out", chance_out, "Output CSV (default stdout)");

  ServeFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "HTTP annotation service");
  serve->add_option("--port", serve_flags.service.port, "Listen port (0: any)")
      ->envname("XAL_PORT");
  serve->add_option("--host", serve_flags.service.host, "Listen address")
      ->envname("XAL_HOST");
  serve->add_option("--storage", serve_flags.service.storage_root, "Event log directory")
      ->envname("XAL_STORAGE");
  serve->add_option("--min-seconds", serve_flags.service.min_seconds,
                    "Minimum seconds per query")
      ->envname("XAL_MIN_SECONDS");
  serve->add_option("--data", serve_flags.data, "Adult income data file")
      ->envname("XAL_DATASET");
  serve->add_option("--lambda", serve_flags.service.lambda, "L2 regularization strength")
      ->envname("XAL_LAMBDA");
  serve->add_option("--features", serve_flags.features, "Comma-separated feature columns");
  serve->add_option("--split-seed", serve_flags.split_seed, "Seed of the pool/test split")
      ->envname("XAL_SPLIT_SEED");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*curve) return RunCurve(curve_flags, curve_queries, curve_queries_opt);
    if (*snapshot) {
      xal::ExperimentConfig c = snap_flags.Resolve();
      ApplySnapshotFlags(c, conditions, stages, profiles, snap_queries, snap_queries_opt);
      return RunSnapshot(c);
    }
    if (*compare) {
      xal::ExperimentConfig c = cmp_flags.Resolve();
      ApplySnapshotFlags(c, cmp_conditions, cmp_stages, "", cmp_queries, cmp_queries_opt);
      if (!knowledge.empty()) c.compare_knowledge = ParseDoubles(knowledge);
      if (!anchor.empty()) c.compare_anchor = ParseDoubles(anchor);
      return RunCompare(c);
    }
    if (*chance) return RunChanceTable(chance_data, chance_features, chance_out);
    if (*serve) return RunServe(serve_flags);
  } catch (const xal::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const xal::InvalidArgument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
