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

#include "xal/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "xal/digest.h"
#include "xal/errors.h"
#include "xal/feedback.h"
#include "xal/linear_model.h"

namespace xal {
namespace {

using nlohmann::json;

std::uint64_t Mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Fmt(const std::optional<double>& v) { return v ? Fmt(*v) : ""; }

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<InitialPair> PairsForSeeds(const Corpus& corpus,
                                       const ExperimentConfig& config) {
  std::vector<InitialPair> pairs(config.seeds.size());
  const TrainConfig train = config.Train();
  ParallelFor(pairs.size(), config.threads, [&](std::size_t i) {
    pairs[i] = GenerateInitialPairs(*corpus.split, 1, config.window,
                                    config.seeds[i], train)[0];
  });
  return pairs;
}

std::vector<LateStageSnapshot> SnapshotsForSeeds(
    const Corpus& corpus, const ExperimentConfig& config,
    const std::vector<InitialPair>& pairs) {
  std::vector<LateStageSnapshot> snaps(pairs.size());
  const TrainConfig train = config.Train();
  ParallelFor(pairs.size(), config.threads, [&](std::size_t i) {
    snaps[i] = SimulateToLateStage(corpus.split, corpus.schema, pairs[i],
                                   config.late_stage_queries, train);
  });
  return snaps;
}

bool Needs(const ExperimentConfig& config, Stage s) {
  return std::find(config.stages.begin(), config.stages.end(), s) !=
         config.stages.end();
}

}  // namespace

Corpus Corpus::Load(const std::string& path, const DatasetDecl& decl,
                    std::uint64_t split_seed, double test_fraction) {
  Corpus c;
  c.path = path;
  c.decl = decl;
  c.data = LoadDataset(path, decl);
  c.content_hash = GitBlobHashOfFile(path);
  c.schema = std::make_shared<const FeatureSchema>(FitSchema(c.data));
  const auto instances = EncodeAll(c.data, *c.schema);
  c.split = std::make_shared<const DatasetSplit>(
      Split(instances, test_fraction, split_seed));
  return c;
}

void ExperimentConfig::Validate() const {
  if (seeds.empty()) throw InvalidArgument("at least one seed is required");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InvalidArgument("duplicate seeds");
  }
  if (conditions.empty()) throw InvalidArgument("at least one condition is required");
  if (std::set<Condition>(conditions.begin(), conditions.end()).size() !=
      conditions.size()) {
    throw InvalidArgument("duplicate conditions");
  }
  if (stages.empty()) throw InvalidArgument("at least one stage is required");
  if (profiles.empty()) throw InvalidArgument("at least one annotator profile is required");
  std::set<std::string> names;
  for (const auto& p : profiles) {
    p.Validate();
    if (!names.insert(p.name).second) {
      throw InvalidArgument("duplicate profile name '" + p.name + "'");
    }
  }
  if (queries < 1) throw InvalidArgument("queries must be >= 1");
  if (late_stage_queries < 1) throw InvalidArgument("late_stage_queries must be >= 1");
  if (curve_queries < 1) throw InvalidArgument("curve_queries must be >= 1");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test_fraction must lie in (0, 1)");
  }
  if (stopping_window < 2) throw InvalidArgument("stopping_window must be >= 2");
  if (threads < 0) throw InvalidArgument("threads must be >= 0");
  for (double q : compare_knowledge) {
    if (!(q >= 0.5 && q <= 1.0)) throw InvalidArgument("compare_knowledge outside [0.5, 1]");
  }
  for (double a : compare_anchor) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("compare_anchor outside [0, 1]");
  }
}

DatasetDecl ExperimentConfig::Decl() const {
  if (features.empty()) return DatasetDecl::AdultIncome();
  return DatasetDecl::AdultIncomeAllFeatures().WithFeatures(features);
}

TrainConfig ExperimentConfig::Train() const {
  TrainConfig t;
  t.lambda = lambda;
  return t;
}

json ExperimentConfig::ToJson() const {
  json conds = json::array(), stgs = json::array(), profs = json::array();
  for (auto c : conditions) conds.push_back(std::string(ToString(c)));
  for (auto s : stages) stgs.push_back(std::string(ToString(s)));
  for (const auto& p : profiles) profs.push_back(ProfileToJson(p));
  return {{"dataset", dataset_path},
          {"features", features},
          {"split_seed", split_seed},
          {"test_fraction", test_fraction},
          {"seeds", seeds},
          {"conditions", conds},
          {"profiles", profs},
          {"stages", stgs},
          {"queries", queries},
          {"late_stage_queries", late_stage_queries},
          {"curve_queries", curve_queries},
          {"lambda", lambda},
          {"window", {window.lo, window.hi}},
          {"stopping_window", stopping_window},
          {"stopping_epsilon", stopping_epsilon},
          {"feedback_mode", std::string(ToString(feedback_mode))},
          {"compare_knowledge", compare_knowledge},
          {"compare_anchor", compare_anchor},
          {"compare_rating_gap", compare_rating_gap},
          {"output_dir", output_dir},
          {"threads", threads}};
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "dataset", "features", "split_seed", "test_fraction", "seeds",
      "conditions", "profiles", "stages", "queries", "late_stage_queries",
      "curve_queries", "lambda", "window", "stopping_window",
      "stopping_epsilon", "feedback_mode", "compare_knowledge",
      "compare_anchor", "compare_rating_gap", "output_dir", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("dataset")) c.dataset_path = j.at("dataset").get<std::string>();
    if (j.contains("features")) c.features = j.at("features").get<std::vector<std::string>>();
    if (j.contains("split_seed")) c.split_seed = j.at("split_seed").get<std::uint64_t>();
    if (j.contains("test_fraction")) c.test_fraction = j.at("test_fraction").get<double>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("conditions")) {
      c.conditions.clear();
      for (const auto& s : j.at("conditions")) c.conditions.push_back(ParseCondition(s.get<std::string>()));
    }
    if (j.contains("stages")) {
      c.stages.clear();
      for (const auto& s : j.at("stages")) c.stages.push_back(ParseStage(s.get<std::string>()));
    }
    if (j.contains("profiles")) {
      c.profiles.clear();
      for (const auto& p : j.at("profiles")) c.profiles.push_back(ProfileFromJson(p));
    }
    if (j.contains("queries")) c.queries = j.at("queries").get<int>();
    if (j.contains("late_stage_queries")) c.late_stage_queries = j.at("late_stage_queries").get<int>();
    if (j.contains("curve_queries")) c.curve_queries = j.at("curve_queries").get<int>();
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("window")) {
      const auto w = j.at("window").get<std::vector<double>>();
      if (w.size() != 2) throw InvalidArgument("window must be [lo, hi]");
      c.window = {w[0], w[1]};
    }
    if (j.contains("stopping_window")) c.stopping_window = j.at("stopping_window").get<int>();
    if (j.contains("stopping_epsilon")) c.stopping_epsilon = j.at("stopping_epsilon").get<double>();
    if (j.contains("feedback_mode")) c.feedback_mode = ParseFeedbackMode(j.at("feedback_mode").get<std::string>());
    if (j.contains("compare_knowledge")) c.compare_knowledge = j.at("compare_knowledge").get<std::vector<double>>();
    if (j.contains("compare_anchor")) c.compare_anchor = j.at("compare_anchor").get<std::vector<double>>();
    if (j.contains("compare_rating_gap")) c.compare_rating_gap = j.at("compare_rating_gap").get<double>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

MeanSe Summarize(const std::vector<double>& values) {
  MeanSe r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  for (double v : values) r.mean += v;
  r.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return r;
}

LearningCurveResult RunLearningCurve(const Corpus& corpus,
                                     const ExperimentConfig& config) {
  config.Validate();
  if (config.seeds.size() < 10) {
    throw InvalidArgument("a learning curve needs at least 10 seeds");
  }
  LearningCurveResult r;
  r.seeds = config.seeds;
  r.pairs = PairsForSeeds(corpus, config);
  r.per_seed.resize(r.seeds.size());
  const TrainConfig train = config.Train();
  ParallelFor(r.seeds.size(), config.threads, [&](std::size_t i) {
    r.per_seed[i] = SimulateOracleRun(corpus.split, corpus.schema, r.pairs[i],
                                      config.curve_queries, train)
                        .curve();
  });

  const std::size_t len = r.per_seed.front().size();
  for (const auto& c : r.per_seed) {
    if (c.size() != len) throw StateError("learning curves differ in length");
  }
  for (std::size_t k = 0; k < len; ++k) {
    std::vector<double> acc, f1;
    for (const auto& c : r.per_seed) {
      acc.push_back(c[k].accuracy);
      f1.push_back(c[k].f1);
    }
    const MeanSe a = Summarize(acc);
    r.mean.push_back({r.per_seed.front()[k].queries_answered, a.mean, Summarize(f1).mean});
    r.accuracy_stderr.push_back(a.se);
  }
  r.stopping_query =
      FirstStoppingPoint(r.mean, config.stopping_window, config.stopping_epsilon);
  return r;
}

SessionResult RunSimulatedSession(const Corpus& corpus,
                                  const ExperimentConfig& config,
                                  Condition condition, Stage stage,
                                  const AnnotatorProfile& profile,
                                  std::uint64_t seed, const InitialPair& pair,
                                  const LateStageSnapshot* late) {
  if (stage == Stage::kLate && late == nullptr) {
    throw InvalidArgument("late-stage session requires a snapshot");
  }
  SessionConfig sc;
  sc.condition = condition;
  sc.stage = stage;
  sc.train = config.Train();
  sc.queries = config.queries;
  sc.feedback_mode = config.feedback_mode;
  sc.seed = seed;
  std::vector<LabeledEntry> initial =
      stage == Stage::kLate ? late->labeled
                            : std::vector<LabeledEntry>{pair.first, pair.second};
  ALSession session(corpus.split, corpus.schema, std::move(initial), sc);

  AnnotatorProfile annotator_profile = profile;
  annotator_profile.seed = Mix(profile.seed, seed);
  SimulatedAnnotator annotator(annotator_profile);

  SessionResult r;
  r.condition = condition;
  r.stage = stage;
  r.profile = profile.name;
  r.seed = seed;
  int correct = 0, agreed = 0, agreed_wrong = 0;
  double t = 0.0;
  while (!session.complete()) {
    const QueryRecord& q = session.IssueQuery(t);
    const std::int64_t id = q.instance_id;
    const int truth = PoolGroundTruth(*corpus.split, id);
    const int predicted = PredictLabel(session.model(), session.Features(id));
    QueryContext ctx;
    ctx.ground_truth = truth;
    ctx.condition = condition;
    if (ShowsPrediction(condition)) ctx.shown_prediction = predicted;

    AnnotatorResponse response;
    response.label = annotator.Answer(ctx);
    if (ShowsPrediction(condition)) response.agreement = response.label == predicted;
    if (ShowsExplanation(condition)) {
      response.rating = annotator.RateExplanation(predicted == truth);
    }
    r.labels.push_back(response.label);
    correct += response.label == truth;
    if (response.label == predicted) {
      ++agreed;
      agreed_wrong += response.label != truth;
    }
    t += 1.0;
    session.SubmitResponse(response, {}, t);
  }

  const auto& curve = session.curve();
  r.curve = curve;
  r.initial_accuracy = curve.front().accuracy;
  r.initial_f1 = curve.front().f1;
  r.final_accuracy = curve.back().accuracy;
  r.final_f1 = curve.back().f1;
  r.accuracy_improvement = r.final_accuracy - r.initial_accuracy;
  r.f1_improvement = r.final_f1 - r.initial_f1;
  const double n = static_cast<double>(r.labels.size());
  if (n > 0) {
    r.label_accuracy = correct / n;
    r.agreement_rate = agreed / n;
  }
  if (agreed > 0) r.wrong_agreement_rate = static_cast<double>(agreed_wrong) / agreed;
  r.feedback_counts = SummarizeFeedback(session.AllFeedback());
  return r;
}

ExperimentReport RunSnapshotExperiment(const Corpus& corpus,
                                       const ExperimentConfig& config) {
  config.Validate();
  const auto pairs = PairsForSeeds(corpus, config);
  std::vector<LateStageSnapshot> snaps;
  if (Needs(config, Stage::kLate)) snaps = SnapshotsForSeeds(corpus, config, pairs);

  struct Job {
    Stage stage;
    Condition condition;
    std::size_t profile;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (Stage s : config.stages)
    for (Condition c : config.conditions)
      for (std::size_t p = 0; p < config.profiles.size(); ++p)
        for (std::size_t k = 0; k < config.seeds.size(); ++k) jobs.push_back({s, c, p, k});

  ExperimentReport report;
  report.rows.resize(jobs.size());
  ParallelFor(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    report.rows[i] = RunSimulatedSession(
        corpus, config, j.condition, j.stage, config.profiles[j.profile],
        config.seeds[j.seed], pairs[j.seed],
        j.stage == Stage::kLate ? &snaps[j.seed] : nullptr);
  });

  const std::size_t group = config.seeds.size();
  for (std::size_t start = 0; start < report.rows.size(); start += group) {
    AggregateRow agg;
    const SessionResult& head = report.rows[start];
    agg.condition = head.condition;
    agg.stage = head.stage;
    agg.profile = head.profile;
    agg.runs = static_cast<int>(group);
    std::vector<double> fa, ff, ai, fi, la, ar, wr;
    for (std::size_t i = start; i < start + group; ++i) {
      const SessionResult& r = report.rows[i];
      fa.push_back(r.final_accuracy);
      ff.push_back(r.final_f1);
      ai.push_back(r.accuracy_improvement);
      fi.push_back(r.f1_improvement);
      la.push_back(r.label_accuracy);
      ar.push_back(r.agreement_rate);
      if (r.wrong_agreement_rate) wr.push_back(*r.wrong_agreement_rate);
    }
    agg.final_accuracy = Summarize(fa);
    agg.final_f1 = Summarize(ff);
    agg.accuracy_improvement = Summarize(ai);
    agg.f1_improvement = Summarize(fi);
    agg.label_accuracy = Summarize(la);
    agg.agreement_rate = Summarize(ar);
    agg.wrong_agreement_rate = Summarize(wr);
    report.aggregates.push_back(agg);
  }
  return report;
}

std::vector<ComparisonRow> CompareConditions(const Corpus& corpus,
                                             const ExperimentConfig& config) {
  config.Validate();
  if (config.conditions.size() < 2) {
    throw InvalidArgument("comparison needs at least two conditions");
  }
  std::vector<AnnotatorProfile> grid;
  for (double q : config.compare_knowledge) {
    for (double a : config.compare_anchor) {
      AnnotatorProfile p = AnnotatorProfile::Anchored(q, a);
      p.rating_gap = config.compare_rating_gap;
      p.name = "q=" + Fmt(q) + ";alpha=" + Fmt(a);
      p.Validate();
      grid.push_back(p);
    }
  }
  if (grid.empty()) throw InvalidArgument("empty comparison grid");

  const auto pairs = PairsForSeeds(corpus, config);
  std::vector<LateStageSnapshot> snaps;
  if (Needs(config, Stage::kLate)) snaps = SnapshotsForSeeds(corpus, config, pairs);

  struct Job {
    Stage stage;
    Condition condition;
    std::size_t profile;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (Stage s : config.stages)
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (Condition c : config.conditions)
        for (std::size_t k = 0; k < config.seeds.size(); ++k) jobs.push_back({s, c, p, k});

  std::vector<ComparisonRow> rows(jobs.size());
  ParallelFor(jobs.size(), config.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    const AnnotatorProfile& p = grid[j.profile];
    const SessionResult r = RunSimulatedSession(
        corpus, config, j.condition, j.stage, p, config.seeds[j.seed],
        pairs[j.seed], j.stage == Stage::kLate ? &snaps[j.seed] : nullptr);
    ComparisonRow& row = rows[i];
    row.condition = j.condition;
    row.stage = j.stage;
    row.profile = p.name;
    row.knowledge = p.knowledge;
    row.anchor = p.anchor;
    row.seed = r.seed;
    row.agreement_rate = r.agreement_rate;
    row.wrong_agreement_rate = r.wrong_agreement_rate;
    row.label_accuracy = r.label_accuracy;
    row.final_accuracy = r.final_accuracy;
    row.labels = r.labels;
  });
  return rows;
}

void WriteCurveCsv(const LearningCurveResult& r, std::ostream& per_seed,
                   std::ostream& mean) {
  per_seed << "seed,queries_answered,accuracy,f1\n";
  for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
    for (const auto& p : r.per_seed[i]) {
      per_seed << r.seeds[i] << ',' << p.queries_answered << ',' << Fmt(p.accuracy)
               << ',' << Fmt(p.f1) << '\n';
    }
  }
  mean << "queries_answered,mean_accuracy,se_accuracy,mean_f1\n";
  for (std::size_t k = 0; k < r.mean.size(); ++k) {
    mean << r.mean[k].queries_answered << ',' << Fmt(r.mean[k].accuracy) << ','
         << Fmt(r.accuracy_stderr[k]) << ',' << Fmt(r.mean[k].f1) << '\n';
  }
}

void WriteReportCsv(const ExperimentReport& r, std::ostream& rows,
                    std::ostream& aggregates) {
  rows << "stage,condition,profile,seed,initial_accuracy,initial_f1,"
          "final_accuracy,final_f1,accuracy_improvement,f1_improvement,"
          "label_accuracy,agreement_rate,wrong_agreement_rate\n";
  for (const auto& s : r.rows) {
    rows << ToString(s.stage) << ',' << ToString(s.condition) << ',' << CsvField(s.profile)
         << ',' << s.seed << ',' << Fmt(s.initial_accuracy) << ',' << Fmt(s.initial_f1)
         << ',' << Fmt(s.final_accuracy) << ',' << Fmt(s.final_f1) << ','
         << Fmt(s.accuracy_improvement) << ',' << Fmt(s.f1_improvement) << ','
         << Fmt(s.label_accuracy) << ',' << Fmt(s.agreement_rate) << ','
         << Fmt(s.wrong_agreement_rate) << '\n';
  }
  aggregates << "stage,condition,profile,runs";
  for (const char* m : {"final_accuracy", "final_f1", "accuracy_improvement",
                        "f1_improvement", "label_accuracy", "agreement_rate",
                        "wrong_agreement_rate"}) {
    aggregates << ',' << m << "_mean," << m << "_se";
  }
  aggregates << '\n';
  for (const auto& a : r.aggregates) {
    aggregates << ToString(a.stage) << ',' << ToString(a.condition) << ','
               << CsvField(a.profile) << ',' << a.runs;
    for (const MeanSe* m : {&a.final_accuracy, &a.final_f1, &a.accuracy_improvement,
                            &a.f1_improvement, &a.label_accuracy, &a.agreement_rate,
                            &a.wrong_agreement_rate}) {
      aggregates << ',' << Fmt(m->mean) << ',' << Fmt(m->se);
    }
    aggregates << '\n';
  }
}

void WriteFeedbackSummaryCsv(const ExperimentReport& r, std::ostream& out) {
  out << "stage,condition,profile,kind,count\n";
  std::map<std::tuple<Stage, Condition, std::string, std::string>, std::int64_t> totals;
  for (const auto& s : r.rows) {
    for (const auto& [kind, n] : s.feedback_counts) {
      totals[{s.stage, s.condition, s.profile, kind}] += n;
    }
  }
  for (const auto& [key, n] : totals) {
    out << ToString(std::get<0>(key)) << ',' << ToString(std::get<1>(key)) << ','
        << CsvField(std::get<2>(key)) << ',' << std::get<3>(key) << ',' << n << '\n';
  }
}

void WriteComparisonCsv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
  out << "stage,condition,knowledge,anchor,seed,agreement_rate,"
         "wrong_agreement_rate,label_accuracy,final_accuracy\n";
  for (const auto& r : rows) {
    out << ToString(r.stage) << ',' << ToString(r.condition) << ','
        << Fmt(r.knowledge) << ',' << Fmt(r.anchor) << ',' << r.seed << ','
        << Fmt(r.agreement_rate) << ',' << Fmt(r.wrong_agreement_rate) << ','
        << Fmt(r.label_accuracy) << ',' << Fmt(r.final_accuracy) << '\n';
  }
}

json Manifest(const std::string& command, const ExperimentConfig& config,
              const Corpus& corpus) {
  const LoadReport& lr = corpus.data.report;
  char fp[17];
  std::snprintf(fp, sizeof(fp), "%016llx",
                static_cast<unsigned long long>(corpus.schema->Fingerprint()));
  return {{"command", command},
          {"config", config.ToJson()},
          {"dataset",
           {{"path", corpus.path},
            {"git_blob", corpus.content_hash},
            {"lines_read", lr.lines_read},
            {"accepted", lr.accepted},
            {"dropped_missing", lr.dropped_missing},
            {"rejected_label", lr.rejected_label},
            {"rejected_token", lr.rejected_token},
            {"features", corpus.decl.FeatureNames()}}},
          {"schema", {{"fingerprint", fp},
                      {"dimension", corpus.schema->dimension()},
                      {"warnings", corpus.schema->warnings()}}},
          {"split",
           {{"seed", corpus.split->seed},
            {"test_fraction", corpus.split->test_fraction},
            {"pool", corpus.split->pool.size()},
            {"test", corpus.split->test.size()}}}};
}

}  // namespace xal
