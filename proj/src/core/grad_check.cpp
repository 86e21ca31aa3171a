/* Copyright 2026 The MaskText Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "core/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <utility>

#include "core/alignment_numerics.hpp"
#include "core/errors.hpp"
#include "core/template_engine.hpp"

namespace masktext::numerics {

namespace {

using Rng = std::mt19937_64;
using Errors = std::vector<std::pair<std::string, double>>;

std::size_t Dim(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

DenseTensor RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = normal(rng);
  return DenseTensor::Matrix(rows, cols, std::move(v));
}

// Column-wise softmax of random logits mixed with 10% uniform mass, so every
// pixel is a distribution and every entry is at least 0.1 / classes. The
// central-difference truncation error of the log terms grows like (h / p)^2,
// which at h = 1e-5 exceeds 1e-4 relative once p drops below about 1e-3.
DenseTensor RandomProbs(Rng& rng, std::size_t classes, std::size_t pixels) {
  DenseTensor p = RandomMatrix(rng, classes, pixels, 1.5);
  const double floor = 0.1 / static_cast<double>(classes);
  for (std::size_t i = 0; i < pixels; ++i) {
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p(c, i) = std::exp(p(c, i));
      z += p(c, i);
    }
    for (std::size_t c = 0; c < classes; ++c) p(c, i) = 0.9 * p(c, i) / z + floor;
  }
  return p;
}

std::vector<int> RandomTargets(Rng& rng, std::size_t classes, std::size_t pixels) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(classes) - 1);
  std::vector<int> t(pixels);
  for (int& x : t) x = pick(rng);
  return t;
}

double Contract(const DenseTensor& a, const DenseTensor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * b.values()[i];
  return acc;
}

DenseTensor Scaled(DenseTensor t, double s) {
  for (double& x : t.values()) x *= s;
  return t;
}

struct SegInstance {
  DenseTensor p;
  std::vector<int> target;
};

SegInstance RandomSeg(Rng& rng) {
  const std::size_t classes = Dim(rng, 2, 4);
  const std::size_t pixels = Dim(rng, 4, 12);
  return {RandomProbs(rng, classes, pixels), RandomTargets(rng, classes, pixels)};
}

Errors CheckAttention(Rng& rng, double h) {
  const std::size_t nq = Dim(rng, 2, 4), nk = Dim(rng, 2, 5);
  const std::size_t d = Dim(rng, 2, 5), dv = Dim(rng, 2, 4);
  const DenseTensor q = RandomMatrix(rng, nq, d);
  const DenseTensor k = RandomMatrix(rng, nk, d);
  const DenseTensor v = RandomMatrix(rng, nk, dv);
  const DenseTensor upstream = RandomMatrix(rng, nq, dv);

  const AttentionGrads g =
      AttentionBackward(q, k, v, AttentionWithWeights(q, k, v), upstream);
  return {
      {"query", MaxRelativeError(g.d_query, NumericGradient(
                    [&](const DenseTensor& x) { return Contract(upstream, Attention(x, k, v)); },
                    q, h))},
      {"key", MaxRelativeError(g.d_key, NumericGradient(
                  [&](const DenseTensor& x) { return Contract(upstream, Attention(q, x, v)); },
                  k, h))},
      {"value", MaxRelativeError(g.d_value, NumericGradient(
                    [&](const DenseTensor& x) { return Contract(upstream, Attention(q, k, x)); },
                    v, h))},
  };
}

Errors CheckFuse(Rng& rng, double h) {
  const std::size_t n = Dim(rng, 2, 4), m = Dim(rng, 2, 4);
  const std::size_t d = Dim(rng, 2, 4), dt = Dim(rng, 2, 4);
  const std::size_t dk = Dim(rng, 2, 4), dv = Dim(rng, 2, 4);
  const DenseTensor visual = RandomMatrix(rng, n, d);
  const DenseTensor text = RandomMatrix(rng, m, dt);
  const FusionWeights w{RandomMatrix(rng, d, dk, 0.7), RandomMatrix(rng, dt, dk, 0.7),
                        RandomMatrix(rng, dt, dv, 0.7), RandomMatrix(rng, dv, d, 0.7)};
  const DenseTensor upstream = RandomMatrix(rng, n, dv);
  const FusionGrads g = FuseBackward(visual, text, w, upstream);

  auto loss = [&](const DenseTensor& vis, const DenseTensor& txt, const FusionWeights& ww) {
    return Contract(upstream, Fuse(vis, txt, ww));
  };
  auto with = [&](DenseTensor FusionWeights::*field, const DenseTensor& x) {
    FusionWeights copy = w;
    copy.*field = x;
    return loss(visual, text, copy);
  };
  return {
      {"visual", MaxRelativeError(g.d_visual, NumericGradient(
                     [&](const DenseTensor& x) { return loss(x, text, w); }, visual, h))},
      {"text", MaxRelativeError(g.d_text, NumericGradient(
                   [&](const DenseTensor& x) { return loss(visual, x, w); }, text, h))},
      {"query", MaxRelativeError(g.d_query, NumericGradient(
                    [&](const DenseTensor& x) { return with(&FusionWeights::query, x); },
                    w.query, h))},
      {"key", MaxRelativeError(g.d_key, NumericGradient(
                  [&](const DenseTensor& x) { return with(&FusionWeights::key, x); },
                  w.key, h))},
      {"value", MaxRelativeError(g.d_value, NumericGradient(
                    [&](const DenseTensor& x) { return with(&FusionWeights::value, x); },
                    w.value, h))},
      {"bridge", MaxRelativeError(g.d_bridge, NumericGradient(
                     [&](const DenseTensor& x) { return with(&FusionWeights::bridge, x); },
                     w.bridge, h))},
  };
}

Errors CheckFocal(Rng& rng, double h) {
  SegInstance s = RandomSeg(rng);
  FocalParams params;
  std::uniform_real_distribution<double> weight(0.25, 1.0);
  for (std::size_t c = 0; c < s.p.rows(); ++c) params.alpha.push_back(weight(rng));
  const LossAndGrad lg = FocalLossGrad(s.p, s.target, params);
  return {{"probabilities",
           MaxRelativeError(lg.grad, NumericGradient(
                                         [&](const DenseTensor& x) {
                                           return FocalLoss(x, s.target, params);
                                         },
                                         s.p, h))}};
}

Errors CheckDice(Rng& rng, double h) {
  SegInstance s = RandomSeg(rng);
  const LossAndGrad lg = DiceLossGrad(s.p, s.target);
  return {{"probabilities",
           MaxRelativeError(lg.grad, NumericGradient(
                                         [&](const DenseTensor& x) {
                                           return DiceLoss(x, s.target);
                                         },
                                         s.p, h))}};
}

std::optional<Errors> CheckLovasz(Rng& rng, double h) {
  SegInstance s = RandomSeg(rng);
  if (LovaszMinErrorGap(s.p, s.target) < 4.0 * h) return std::nullopt;
  const LossAndGrad lg = LovaszLossGrad(s.p, s.target);
  return Errors{{"probabilities",
                 MaxRelativeError(lg.grad, NumericGradient(
                                               [&](const DenseTensor& x) {
                                                 return LovaszLoss(x, s.target);
                                               },
                                               s.p, h))}};
}

std::optional<Errors> CheckSeg(Rng& rng, double h) {
  SegInstance s = RandomSeg(rng);
  if (LovaszMinErrorGap(s.p, s.target) < 4.0 * h) return std::nullopt;
  const LossAndGrad lg = SegLossGrad(s.p, s.target);
  return Errors{{"probabilities",
                 MaxRelativeError(lg.grad, NumericGradient(
                                               [&](const DenseTensor& x) {
                                                 return SegLoss(x, s.target).total;
                                               },
                                               s.p, h))}};
}

double Cot(const DenseTensor& visual, const DenseTensor& text, double tau) {
  return ContrastiveLoss(SimilarityMatrix(EmbeddingBatch(visual), EmbeddingBatch(text), tau))
      .combined;
}

Errors CheckContrastive(Rng& rng, double h) {
  constexpr std::size_t kBatch = 4, kDim = 8;
  const double tau = LossWeights{}.tau;
  const DenseTensor visual = RandomMatrix(rng, kBatch, kDim);
  const DenseTensor text = RandomMatrix(rng, kBatch, kDim);
  const DenseTensor s = RandomMatrix(rng, kBatch, kBatch, 2.0);

  const EmbeddingBatch ev(visual), et(text);
  const DenseTensor ds = ContrastiveLossGrad(SimilarityMatrix(ev, et, tau));
  const EmbeddingGrads g = SimilarityBackward(ev, et, tau, true, ds);
  return {
      {"similarity", MaxRelativeError(ContrastiveLossGrad(s), NumericGradient(
                         [](const DenseTensor& x) { return ContrastiveLoss(x).combined; },
                         s, h))},
      {"visual", MaxRelativeError(g.d_visual, NumericGradient(
                     [&](const DenseTensor& x) { return Cot(x, text, tau); }, visual, h))},
      {"text", MaxRelativeError(g.d_text, NumericGradient(
                   [&](const DenseTensor& x) { return Cot(visual, x, tau); }, text, h))},
  };
}

std::optional<Errors> CheckTotal(Rng& rng, double h) {
  const LossWeights weights;
  SegInstance s = RandomSeg(rng);
  const std::size_t batch = Dim(rng, 2, 5), dim = Dim(rng, 2, 6);
  const DenseTensor visual = RandomMatrix(rng, batch, dim);
  const DenseTensor text = RandomMatrix(rng, batch, dim);
  if (LovaszMinErrorGap(s.p, s.target) < 4.0 * h) return std::nullopt;

  auto total = [&](const DenseTensor& p, const DenseTensor& vis, const DenseTensor& txt) {
    return TotalLoss(SegLoss(p, s.target, weights).total, Cot(vis, txt, weights.tau), weights);
  };
  const EmbeddingBatch ev(visual), et(text);
  const DenseTensor ds =
      Scaled(ContrastiveLossGrad(SimilarityMatrix(ev, et, weights.tau)), weights.lambda);
  const EmbeddingGrads g = SimilarityBackward(ev, et, weights.tau, true, ds);
  return Errors{
      {"probabilities",
       MaxRelativeError(SegLossGrad(s.p, s.target, weights).grad,
                        NumericGradient(
                            [&](const DenseTensor& x) { return total(x, visual, text); }, s.p,
                            h))},
      {"visual", MaxRelativeError(g.d_visual, NumericGradient(
                     [&](const DenseTensor& x) { return total(s.p, x, text); }, visual, h))},
      {"text", MaxRelativeError(g.d_text, NumericGradient(
                   [&](const DenseTensor& x) { return total(s.p, visual, x); }, text, h))},
  };
}

std::optional<Errors> RunTrial(const std::string& op, Rng& rng, double h) {
  if (op == "attention") return CheckAttention(rng, h);
  if (op == "fuse") return CheckFuse(rng, h);
  if (op == "focal") return CheckFocal(rng, h);
  if (op == "dice") return CheckDice(rng, h);
  if (op == "lovasz") return CheckLovasz(rng, h);
  if (op == "seg") return CheckSeg(rng, h);
  if (op == "contrastive") return CheckContrastive(rng, h);
  return CheckTotal(rng, h);
}

OpCheck RunOp(const std::string& op, const GradCheckOptions& options) {
  Rng rng(options.seed ^ Fnv1a64(op));
  OpCheck check;
  check.op = op;
  const int max_attempts = options.trials * 10;
  for (int attempt = 0; attempt < max_attempts && check.trials < options.trials; ++attempt) {
    const std::optional<Errors> errors = RunTrial(op, rng, options.h);
    if (!errors) {
      ++check.skipped;
      continue;
    }
    ++check.trials;
    if (check.tensors.empty()) {
      for (const auto& [name, err] : *errors) check.tensors.push_back({name, 0.0});
    }
    for (std::size_t i = 0; i < errors->size(); ++i) {
      const double err = (*errors)[i].second;
      check.tensors[i].max_rel_error = std::max(check.tensors[i].max_rel_error, err);
      check.max_rel_error = std::max(check.max_rel_error, err);
    }
  }
  check.passed = check.trials == options.trials && check.max_rel_error < options.tolerance;
  return check;
}

}  // namespace

double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
  return std::abs(analytic - numeric) / scale;
}

DenseTensor NumericGradient(const std::function<double(const DenseTensor&)>& f,
                            const DenseTensor& x, double h) {
  DenseTensor probe = x;
  DenseTensor grad = DenseTensor::Zeros(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe.values()[i];
    probe.values()[i] = orig + h;
    const double up = f(probe);
    probe.values()[i] = orig - h;
    const double down = f(probe);
    probe.values()[i] = orig;
    grad.values()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double MaxRelativeError(const DenseTensor& analytic, const DenseTensor& numeric) {
  if (analytic.size() != numeric.size()) {
    throw Error(ErrorCode::kShapeMismatch, "analytic gradient " + analytic.ShapeString() +
                                               " vs numeric " + numeric.ShapeString());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.values()[i], n = numeric.values()[i];
    if (!std::isfinite(a) || !std::isfinite(n)) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "non-finite gradient entry " + std::to_string(i));
    }
    worst = std::max(worst, RelativeError(a, n));
  }
  return worst;
}

const std::vector<std::string>& GradCheckOps() {
  static const std::vector<std::string> kOps = {
      "attention", "fuse", "focal", "dice", "lovasz", "seg", "contrastive", "total"};
  return kOps;
}

nlohmann::ordered_json GradCheckReport::ToJson() const {
  nlohmann::ordered_json out;
  out["h"] = options.h;
  out["tolerance"] = options.tolerance;
  out["trials"] = options.trials;
  out["seed"] = options.seed;
  out["passed"] = passed;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const OpCheck& op : ops) {
    nlohmann::ordered_json tensors = nlohmann::ordered_json::object();
    for (const TensorCheck& t : op.tensors) tensors[t.name] = t.max_rel_error;
    list.push_back({{"op", op.op},
                    {"passed", op.passed},
                    {"cases", op.trials},
                    {"subgradient_skips", op.skipped},
                    {"max_rel_error", op.max_rel_error},
                    {"tensors", tensors}});
  }
  out["ops"] = std::move(list);
  return out;
}

GradCheckReport RunGradCheck(const GradCheckOptions& options) {
  if (options.trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be at least 1");
  }
  if (!(options.h > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "finite-difference step must be positive");
  }
  std::vector<std::string> ops = options.ops.empty() ? GradCheckOps() : options.ops;
  for (const auto& op : ops) {
    if (std::find(GradCheckOps().begin(), GradCheckOps().end(), op) == GradCheckOps().end()) {
      throw Error(ErrorCode::kInvalidArgument, "unknown gradient-check op '" + op + "'");
    }
  }
  GradCheckReport report;
  report.options = options;
  report.options.ops = ops;
  report.passed = true;
  for (const auto& op : ops) {
    report.ops.push_back(RunOp(op, options));
    report.passed = report.passed && report.ops.back().passed;
  }
  return report;
}

}  // namespace masktext::numerics
