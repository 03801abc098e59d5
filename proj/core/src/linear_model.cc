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

#include "xal/linear_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>

#include "xal/errors.h"

namespace xal {
namespace {

double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void CheckExamples(std::span<const TrainingExample> examples) {
  if (examples.empty()) throw InvalidArgument("Train: no labeled examples");
  const auto d = examples.front().x.size();
  for (const auto& e : examples) {
    if (e.x.size() != d) throw InvalidArgument("Train: dimension mismatch");
    if (e.label != 0 && e.label != 1) {
      throw InvalidArgument("Train: label must be 0 or 1");
    }
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("Train: sample weights must be finite and >= 0");
    }
    if (!e.x.allFinite()) throw InvalidArgument("Train: non-finite feature");
  }
}

bool LexLess(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Row order normalized by (id, x, label, weight).
std::vector<std::size_t> CanonicalOrder(std::span<const TrainingExample> ex) {
  std::vector<std::size_t> order(ex.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = ex[a];
    const auto& eb = ex[b];
    if (ea.id != eb.id) return ea.id < eb.id;
    if (LexLess(ea.x, eb.x)) return true;
    if (LexLess(eb.x, ea.x)) return false;
    if (ea.label != eb.label) return ea.label < eb.label;
    return ea.weight < eb.weight;
  });
  return order;
}

struct Problem {
  Eigen::MatrixXd design;  // n x (d + 1); last column is the intercept.
  Eigen::VectorXd y;
  Eigen::VectorXd s;  // Sample weights.
  double lambda = 0.0;

  Eigen::Index d() const { return design.cols() - 1; }

  double Loss(const Eigen::VectorXd& theta) const {
    const Eigen::VectorXd z = design * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      loss += s[i] * (Softplus(z[i]) - y[i] * z[i]);
    }
    return loss + 0.5 * lambda * theta.head(d()).squaredNorm();
  }

  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta,
                           Eigen::VectorXd* curvature = nullptr) const {
    const Eigen::VectorXd z = design * theta;
    Eigen::VectorXd r(z.size());
    if (curvature != nullptr) curvature->resize(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double p = Sigmoid(z[i]);
      r[i] = s[i] * (p - y[i]);
      if (curvature != nullptr) (*curvature)[i] = s[i] * p * (1.0 - p);
    }
    Eigen::VectorXd g = design.transpose() * r;
    g.head(d()) += lambda * theta.head(d());
    return g;
  }
};

Problem BuildProblem(std::span<const TrainingExample> examples, double lambda) {
  const auto order = CanonicalOrder(examples);
  const auto n = static_cast<Eigen::Index>(examples.size());
  const auto d = examples.front().x.size();
  Problem p;
  p.lambda = lambda;
  p.design.resize(n, d + 1);
  p.y.resize(n);
  p.s.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& e = examples[order[static_cast<std::size_t>(r)]];
    p.design.row(r).head(d) = e.x.transpose();
    p.design(r, d) = 1.0;
    p.y[r] = e.label;
    p.s[r] = e.weight;
  }
  return p;
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LinearModel LinearModel::Zero(std::size_t dimension, double lambda) {
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension));
  m.lambda = lambda;
  return m;
}

double RegularizedLoss(std::span<const TrainingExample> examples,
                       const Eigen::VectorXd& weights, double intercept,
                       double lambda) {
  CheckExamples(examples);
  const Problem p = BuildProblem(examples, lambda);
  Eigen::VectorXd theta(weights.size() + 1);
  theta << weights, intercept;
  return p.Loss(theta);
}

Eigen::VectorXd RegularizedLossGradient(std::span<const TrainingExample> examples,
                                        const Eigen::VectorXd& weights,
                                        double intercept, double lambda) {
  CheckExamples(examples);
  const Problem p = BuildProblem(examples, lambda);
  Eigen::VectorXd theta(weights.size() + 1);
  theta << weights, intercept;
  return p.Gradient(theta);
}

LinearModel Train(std::span<const TrainingExample> examples,
                  const TrainConfig& config, std::uint64_t schema_fingerprint) {
  CheckExamples(examples);
  if (!(config.lambda >= 0.0)) throw InvalidArgument("Train: lambda must be >= 0");
  if (!(config.gradient_tolerance > 0.0)) {
    throw InvalidArgument("Train: gradient tolerance must be > 0");
  }
  const auto d = examples.front().x.size();
  LinearModel model = LinearModel::Zero(static_cast<std::size_t>(d), config.lambda);
  model.schema_fingerprint = schema_fingerprint;
  model.trained = true;

  double pos = 0.0, neg = 0.0;
  bool has_pos = false, has_neg = false;
  for (const auto& e : examples) {
    if (e.weight <= 0.0) continue;
    (e.label == 1 ? pos : neg) += e.weight;
    (e.label == 1 ? has_pos : has_neg) = true;
  }
  if (!(has_pos && has_neg)) {
    model.degenerate = true;
    model.converged = true;
    model.intercept = std::log((pos + 1.0) / (neg + 1.0));
    return model;
  }

  const Problem problem = BuildProblem(examples, config.lambda);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd curvature;
  Eigen::VectorXd grad = problem.Gradient(theta, &curvature);
  double loss = problem.Loss(theta);
  Eigen::MatrixXd hessian(d + 1, d + 1);
  int it = 0;
  for (; it < config.max_iterations; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
      model.converged = true;
      break;
    }
    hessian.noalias() = problem.design.transpose() *
                        curvature.asDiagonal() * problem.design;
    hessian.diagonal().head(d).array() += config.lambda;

    Eigen::VectorXd step;
    double damping = 0.0;
    const double base = 1e-12 * (1.0 + hessian.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd h = hessian;
      h.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() == Eigen::Success) {
        step = llt.solve(-grad);
        if (step.allFinite()) break;
      }
      step.resize(0);
      damping = damping == 0.0 ? base : damping * 10.0;
    }
    if (step.size() == 0) break;

    // Backtracking (Armijo) line search.
    const double slope = grad.dot(step);
    double t = 1.0;
    Eigen::VectorXd candidate;
    double candidate_loss = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      candidate = theta + t * step;
      candidate_loss = problem.Loss(candidate);
      if (candidate_loss <= loss + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Rounding noise in the loss near the optimum: keep the full Newton
      // step only if it reduces the gradient.
      candidate = theta + step;
      Eigen::VectorXd c;
      const Eigen::VectorXd g = problem.Gradient(candidate, &c);
      if (g.lpNorm<Eigen::Infinity>() >= grad.lpNorm<Eigen::Infinity>()) break;
      candidate_loss = problem.Loss(candidate);
    }
    theta = candidate;
    loss = candidate_loss;
    grad = problem.Gradient(theta, &curvature);
  }
  if (!model.converged &&
      grad.lpNorm<Eigen::Infinity>() < config.gradient_tolerance) {
    model.converged = true;
  }
  model.iterations = it;
  model.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  model.weights = theta.head(d);
  model.intercept = theta[d];
  if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
    throw Error("Train: optimizer produced non-finite weights");
  }
  return model;
}

double Logit(const LinearModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.weights.size()) {
    throw InvalidArgument("dimension mismatch: model has " +
                          std::to_string(model.weights.size()) +
                          " weights, instance has " + std::to_string(x.size()));
  }
  return model.weights.dot(x) + model.intercept;
}

double PredictProba(const LinearModel& model, const Eigen::VectorXd& x) {
  return Sigmoid(Logit(model, x));
}

int PredictLabel(const LinearModel& model, const Eigen::VectorXd& x) {
  return Logit(model, x) > 0.0 ? 1 : 0;
}

Metrics Evaluate(const LinearModel& model,
                 std::span<const EncodedInstance> test) {
  if (test.empty()) throw InvalidArgument("Evaluate: empty test set");
  std::int64_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (const auto& inst : test) {
    const int pred = PredictLabel(model, inst.x);
    if (pred == inst.y) ++correct;
    if (pred == 1 && inst.y == 1) ++tp;
    if (pred == 1 && inst.y == 0) ++fp;
    if (pred == 0 && inst.y == 1) ++fn;
  }
  Metrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  const std::int64_t denom = 2 * tp + fp + fn;
  m.f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  return m;
}

nlohmann::json ModelToJson(const LinearModel& model) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(model.schema_fingerprint));
  nlohmann::json j;
  j["schema_hash"] = hash;
  j["lambda"] = model.lambda;
  j["intercept"] = model.intercept;
  j["weights"] = std::vector<double>(model.weights.data(),
                                     model.weights.data() + model.weights.size());
  j["trained"] = model.trained;
  j["degenerate"] = model.degenerate;
  return j;
}

LinearModel ModelFromJson(const nlohmann::json& j) {
  try {
    LinearModel m;
    m.schema_fingerprint =
        std::stoull(j.at("schema_hash").get<std::string>(), nullptr, 16);
    m.lambda = j.at("lambda").get<double>();
    m.intercept = j.at("intercept").get<double>();
    const auto w = j.at("weights").get<std::vector<double>>();
    m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                                  static_cast<Eigen::Index>(w.size()));
    m.trained = j.value("trained", true);
    m.degenerate = j.value("degenerate", false);
    m.converged = true;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model record: ") + e.what());
  } catch (const std::logic_error& e) {
    throw DataError(std::string("malformed model record: ") + e.what());
  }
}

std::string SerializeModel(const LinearModel& model) {
  return ModelToJson(model).dump();
}

LinearModel ParseModel(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model record: ") + e.what());
  }
  return ModelFromJson(j);
}

}  // namespace xal
