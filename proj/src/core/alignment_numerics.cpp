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

#include "core/alignment_numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "core/errors.hpp"

namespace masktext::numerics {

namespace {

[[noreturn]] void ShapeError(const std::string& what) {
  throw Error(ErrorCode::kShapeMismatch, what);
}

void CheckSegInputs(const DenseTensor& p, std::span<const int> target) {
  RequireMatrix(p, "probabilities");
  if (p.rows() < 1 || p.cols() < 1) ShapeError("probabilities must be non-empty");
  if (target.size() != p.cols()) {
    ShapeError("target has " + std::to_string(target.size()) + " pixels, probabilities " +
               p.ShapeString());
  }
  for (int t : target) {
    if (t < 0 || static_cast<std::size_t>(t) >= p.rows()) {
      throw Error(ErrorCode::kClassOutOfRange,
                  "target class " + std::to_string(t) + " outside 0.." +
                      std::to_string(p.rows() - 1));
    }
  }
}

// Normalized rows and their original norms.
struct Normalized {
  DenseTensor unit;
  std::vector<double> norms;
};

Normalized NormalizeRows(const DenseTensor& x) {
  Normalized out{x, std::vector<double>(x.rows(), 1.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double ss = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) ss += x(i, j) * x(i, j);
    const double n = std::sqrt(ss);
    if (!(n > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot L2-normalize zero embedding row " + std::to_string(i));
    }
    out.norms[i] = n;
    for (std::size_t j = 0; j < x.cols(); ++j) out.unit(i, j) = x(i, j) / n;
  }
  return out;
}

// Back-propagates through u = x / |x|.
DenseTensor NormalizeBackward(const Normalized& n, const DenseTensor& d_unit) {
  DenseTensor dx = DenseTensor::Zeros({d_unit.rows(), d_unit.cols()});
  for (std::size_t i = 0; i < d_unit.rows(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d_unit.cols(); ++j) dot += n.unit(i, j) * d_unit(i, j);
    for (std::size_t j = 0; j < d_unit.cols(); ++j) {
      dx(i, j) = (d_unit(i, j) - n.unit(i, j) * dot) / n.norms[i];
    }
  }
  return dx;
}

double LogSumExpRow(const DenseTensor& s, std::size_t i) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.cols(); ++j) m = std::max(m, s(i, j));
  double acc = 0.0;
  for (std::size_t j = 0; j < s.cols(); ++j) acc += std::exp(s(i, j) - m);
  return m + std::log(acc);
}

double LogSumExpCol(const DenseTensor& s, std::size_t j) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.rows(); ++i) m = std::max(m, s(i, j));
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) acc += std::exp(s(i, j) - m);
  return m + std::log(acc);
}

struct LovaszClassTerm {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d p_c, per pixel
};

// Lovasz extension of the Jaccard loss for one class.
LovaszClassTerm LovaszForClass(const DenseTensor& p, std::span<const int> target, int c) {
  const std::size_t n = p.cols();
  std::vector<double> err(n);
  std::vector<std::uint8_t> fg(n);
  for (std::size_t i = 0; i < n; ++i) {
    fg[i] = target[i] == c;
    err[i] = std::abs(static_cast<double>(fg[i]) - p(static_cast<std::size_t>(c), i));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return err[a] > err[b]; });

  double gts = 0.0;
  for (auto f : fg) gts += f;
  LovaszClassTerm term;
  term.grad.assign(n, 0.0);
  double cum_fg = 0.0, cum_bg = 0.0, prev_jaccard = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    cum_fg += fg[i];
    cum_bg += 1.0 - fg[i];
    const double intersection = gts - cum_fg;
    const double union_ = gts + cum_bg;
    const double jaccard = 1.0 - intersection / union_;
    const double g = jaccard - prev_jaccard;
    prev_jaccard = jaccard;
    term.loss += err[i] * g;
    term.grad[i] = fg[i] ? -g : g;
  }
  return term;
}

std::vector<int> PresentClasses(const DenseTensor& p, std::span<const int> target) {
  std::vector<std::uint8_t> present(p.rows(), 0);
  for (int t : target) present[static_cast<std::size_t>(t)] = 1;
  std::vector<int> out;
  for (std::size_t c = 0; c < present.size(); ++c) {
    if (present[c]) out.push_back(static_cast<int>(c));
  }
  return out;
}

double FocalAlpha(const FocalParams& params, int c, std::size_t classes) {
  if (params.alpha.empty()) return 1.0;
  if (params.alpha.size() != classes) {
    ShapeError("focal alpha has " + std::to_string(params.alpha.size()) +
               " weights for " + std::to_string(classes) + " classes");
  }
  return params.alpha[static_cast<std::size_t>(c)];
}

}  // namespace

// ---------------------------------------------------------------------------

AttentionForward AttentionWithWeights(const DenseTensor& q, const DenseTensor& k,
                                      const DenseTensor& v) {
  RequireMatrix(q, "queries");
  RequireMatrix(k, "keys");
  RequireMatrix(v, "values");
  if (q.cols() != k.cols()) {
    ShapeError("query dim " + std::to_string(q.cols()) + " != key dim " +
               std::to_string(k.cols()));
  }
  if (k.rows() != v.rows()) {
    ShapeError(std::to_string(k.rows()) + " keys but " + std::to_string(v.rows()) + " values");
  }
  if (k.rows() == 0) ShapeError("attention needs at least one key");

  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  DenseTensor weights = MatMulTransB(q, k);
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      weights(i, j) *= scale;
      m = std::max(m, weights(i, j));
    }
    double z = 0.0;
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      weights(i, j) = std::exp(weights(i, j) - m);
      z += weights(i, j);
    }
    for (std::size_t j = 0; j < weights.cols(); ++j) weights(i, j) /= z;
  }
  DenseTensor output = MatMul(weights, v);
  return {std::move(output), std::move(weights)};
}

DenseTensor Attention(const DenseTensor& q, const DenseTensor& k, const DenseTensor& v) {
  return AttentionWithWeights(q, k, v).output;
}

AttentionGrads AttentionBackward(const DenseTensor& q, const DenseTensor& k,
                                 const DenseTensor& v, const AttentionForward& fwd,
                                 const DenseTensor& d_output) {
  if (d_output.rank() != 2 || d_output.rows() != fwd.output.rows() ||
      d_output.cols() != fwd.output.cols()) {
    ShapeError("attention output gradient " + d_output.ShapeString() + " vs output " +
               fwd.output.ShapeString());
  }
  const DenseTensor& a = fwd.weights;
  AttentionGrads g;
  g.d_value = MatMulTransA(a, d_output);
  const DenseTensor d_weights = MatMulTransB(d_output, v);
  // Softmax Jacobian, row-wise.
  DenseTensor d_scores = DenseTensor::Zeros({a.rows(), a.cols()});
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) dot += d_weights(i, j) * a(i, j);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      d_scores(i, j) = a(i, j) * (d_weights(i, j) - dot) * scale;
    }
  }
  g.d_query = MatMul(d_scores, k);
  g.d_key = MatMulTransA(d_scores, q);
  return g;
}

FusionWeights FusionWeights::WithIdentityProjections(std::size_t dim, DenseTensor bridge) {
  return {DenseTensor::Identity(dim), DenseTensor::Identity(dim), DenseTensor::Identity(dim),
          std::move(bridge)};
}

DenseTensor Fuse(const DenseTensor& visual, const DenseTensor& text, const FusionWeights& w) {
  RequireMatrix(visual, "visual features");
  RequireMatrix(text, "text features");
  RequireMatrix(w.bridge, "bridge");
  if (w.bridge.cols() != visual.cols()) {
    ShapeError("bridge " + w.bridge.ShapeString() + " does not accept visual features " +
               visual.ShapeString());
  }
  const DenseTensor q = MatMul(visual, w.query);
  const DenseTensor k = MatMul(text, w.key);
  const DenseTensor v = MatMul(text, w.value);
  DenseTensor out = Attention(q, k, v);
  const DenseTensor bridged = MatMulTransB(visual, w.bridge);
  if (bridged.cols() != out.cols()) {
    ShapeError("bridge output dim " + std::to_string(bridged.cols()) +
               " != attention value dim " + std::to_string(out.cols()));
  }
  auto o = out.values();
  const auto b = bridged.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += b[i];
  return out;
}

DenseTensor Fuse(const DenseTensor& visual, const DenseTensor& text, const DenseTensor& bridge) {
  RequireMatrix(visual, "visual features");
  RequireMatrix(text, "text features");
  if (visual.cols() != text.cols()) {
    ShapeError("identity projections need equal visual and text dims, got " +
               visual.ShapeString() + " and " + text.ShapeString());
  }
  return Fuse(visual, text, FusionWeights::WithIdentityProjections(visual.cols(), bridge));
}

FusionGrads FuseBackward(const DenseTensor& visual, const DenseTensor& text,
                         const FusionWeights& w, const DenseTensor& d_output) {
  const DenseTensor q = MatMul(visual, w.query);
  const DenseTensor k = MatMul(text, w.key);
  const DenseTensor v = MatMul(text, w.value);
  const AttentionForward fwd = AttentionWithWeights(q, k, v);
  const AttentionGrads ag = AttentionBackward(q, k, v, fwd, d_output);

  FusionGrads g;
  g.d_query = MatMulTransA(visual, ag.d_query);
  g.d_key = MatMulTransA(text, ag.d_key);
  g.d_value = MatMulTransA(text, ag.d_value);
  g.d_bridge = MatMulTransA(d_output, visual);

  g.d_visual = MatMulTransB(ag.d_query, w.query);
  const DenseTensor via_bridge = MatMul(d_output, w.bridge);
  for (std::size_t i = 0; i < g.d_visual.size(); ++i) {
    g.d_visual.values()[i] += via_bridge.values()[i];
  }
  g.d_text = MatMulTransB(ag.d_key, w.key);
  const DenseTensor via_value = MatMulTransB(ag.d_value, w.value);
  for (std::size_t i = 0; i < g.d_text.size(); ++i) {
    g.d_text.values()[i] += via_value.values()[i];
  }
  return g;
}

// ---------------------------------------------------------------------------

ProbMap::ProbMap(std::size_t classes, std::size_t pixels, std::vector<double> values)
    : ProbMap(DenseTensor::Matrix(classes, pixels, std::move(values))) {}

ProbMap::ProbMap(DenseTensor values) : values_(std::move(values)) {
  RequireMatrix(values_, "probability map");
  if (values_.rows() < 1 || values_.cols() < 1) ShapeError("probability map must be non-empty");
  for (std::size_t i = 0; i < values_.cols(); ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < values_.rows(); ++c) {
      if (values_(c, i) < 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "negative probability at pixel " + std::to_string(i));
      }
      sum += values_(c, i);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "probabilities at pixel " + std::to_string(i) + " sum to " +
                      std::to_string(sum));
    }
  }
}

LossAndGrad FocalLossGrad(const DenseTensor& p, std::span<const int> target,
                          const FocalParams& params) {
  CheckSegInputs(p, target);
  const std::size_t n = p.cols();
  LossAndGrad out{0.0, DenseTensor::Zeros({p.rows(), n})};
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int t = target[i];
    const double alpha = FocalAlpha(params, t, p.rows());
    const double raw = p(static_cast<std::size_t>(t), i);
    const bool clamped = raw < kProbClamp || raw > 1.0 - kProbClamp;
    const double pt = std::clamp(raw, kProbClamp, 1.0 - kProbClamp);
    const double one_minus = 1.0 - pt;
    const double log_pt = std::log(pt);
    const double modulator = params.gamma == 0.0 ? 1.0 : std::pow(one_minus, params.gamma);
    out.value += -alpha * modulator * log_pt;
    if (!clamped) {
      const double d_mod =
          params.gamma == 0.0 ? 0.0 : params.gamma * std::pow(one_minus, params.gamma - 1.0);
      out.grad(static_cast<std::size_t>(t), i) =
          alpha * (d_mod * log_pt - modulator / pt) * inv_n;
    }
  }
  out.value *= inv_n;
  return out;
}

double FocalLoss(const DenseTensor& p, std::span<const int> target, const FocalParams& params) {
  return FocalLossGrad(p, target, params).value;
}

double CrossEntropy(const DenseTensor& p, std::span<const int> target) {
  CheckSegInputs(p, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.cols(); ++i) {
    acc -= std::log(std::clamp(p(static_cast<std::size_t>(target[i]), i), kProbClamp,
                               1.0 - kProbClamp));
  }
  return acc / static_cast<double>(p.cols());
}

LossAndGrad DiceLossGrad(const DenseTensor& p, std::span<const int> target, double epsilon) {
  CheckSegInputs(p, target);
  const std::size_t classes = p.rows();
  const std::size_t n = p.cols();
  LossAndGrad out{0.0, DenseTensor::Zeros({classes, n})};
  double mean_coeff = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double inter = 0.0, psum = 0.0, tsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = target[i] == static_cast<int>(c) ? 1.0 : 0.0;
      inter += p(c, i) * t;
      psum += p(c, i);
      tsum += t;
    }
    const double num = 2.0 * inter + epsilon;
    const double den = psum + tsum + epsilon;
    mean_coeff += num / den;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = target[i] == static_cast<int>(c) ? 1.0 : 0.0;
      out.grad(c, i) = -(2.0 * t * den - num) / (den * den) / static_cast<double>(classes);
    }
  }
  out.value = 1.0 - mean_coeff / static_cast<double>(classes);
  return out;
}

double DiceLoss(const DenseTensor& p, std::span<const int> target, double epsilon) {
  return DiceLossGrad(p, target, epsilon).value;
}

LossAndGrad LovaszLossGrad(const DenseTensor& p, std::span<const int> target) {
  CheckSegInputs(p, target);
  const auto present = PresentClasses(p, target);
  LossAndGrad out{0.0, DenseTensor::Zeros({p.rows(), p.cols()})};
  const double inv = 1.0 / static_cast<double>(present.size());
  for (int c : present) {
    const LovaszClassTerm term = LovaszForClass(p, target, c);
    out.value += term.loss;
    for (std::size_t i = 0; i < p.cols(); ++i) {
      out.grad(static_cast<std::size_t>(c), i) = term.grad[i] * inv;
    }
  }
  out.value *= inv;
  return out;
}

double LovaszLoss(const DenseTensor& p, std::span<const int> target) {
  return LovaszLossGrad(p, target).value;
}

double LovaszMinErrorGap(const DenseTensor& p, std::span<const int> target) {
  CheckSegInputs(p, target);
  double gap = std::numeric_limits<double>::infinity();
  for (int c : PresentClasses(p, target)) {
    std::vector<double> err(p.cols());
    for (std::size_t i = 0; i < p.cols(); ++i) {
      err[i] = std::abs((target[i] == c ? 1.0 : 0.0) - p(static_cast<std::size_t>(c), i));
    }
    std::sort(err.begin(), err.end());
    gap = std::min(gap, err.front());
    for (std::size_t i = 1; i < err.size(); ++i) gap = std::min(gap, err[i] - err[i - 1]);
  }
  return gap;
}

SegLossBreakdown SegLoss(const DenseTensor& p, std::span<const int> target,
                         const LossWeights& weights, const SegLossParams& params) {
  weights.Validate();
  SegLossBreakdown b;
  b.focal = FocalLoss(p, target, params.focal);
  b.dice = DiceLoss(p, target, params.dice_epsilon);
  b.lovasz = LovaszLoss(p, target);
  b.total = weights.alpha * b.focal + weights.beta * b.dice + weights.gamma * b.lovasz;
  return b;
}

LossAndGrad SegLossGrad(const DenseTensor& p, std::span<const int> target,
                        const LossWeights& weights, const SegLossParams& params) {
  weights.Validate();
  const LossAndGrad f = FocalLossGrad(p, target, params.focal);
  const LossAndGrad d = DiceLossGrad(p, target, params.dice_epsilon);
  const LossAndGrad l = LovaszLossGrad(p, target);
  LossAndGrad out{weights.alpha * f.value + weights.beta * d.value + weights.gamma * l.value,
                  DenseTensor::Zeros({p.rows(), p.cols()})};
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad.values()[i] = weights.alpha * f.grad.values()[i] +
                           weights.beta * d.grad.values()[i] +
                           weights.gamma * l.grad.values()[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

DenseTensor SimilarityMatrix(const EmbeddingBatch& visual, const EmbeddingBatch& text,
                             double tau, bool normalize) {
  if (visual.rows() != text.rows() || visual.cols() != text.cols()) {
    ShapeError("visual batch " + visual.values().ShapeString() + " vs text batch " +
               text.values().ShapeString());
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kNonPositiveTau, "temperature must be positive, got " +
                                                std::to_string(tau));
  }
  DenseTensor s = normalize ? MatMulTransB(NormalizeRows(visual.values()).unit,
                                           NormalizeRows(text.values()).unit)
                            : MatMulTransB(visual.values(), text.values());
  for (double& x : s.values()) x /= tau;
  return s;
}

ContrastiveLosses ContrastiveLoss(const DenseTensor& s) {
  RequireMatrix(s, "similarity");
  if (s.rows() != s.cols() || s.rows() == 0) {
    ShapeError("similarity must be square and non-empty, got " + s.ShapeString());
  }
  const std::size_t b = s.rows();
  ContrastiveLosses out;
  for (std::size_t i = 0; i < b; ++i) {
    out.vision_to_text += LogSumExpRow(s, i) - s(i, i);
    out.text_to_vision += LogSumExpCol(s, i) - s(i, i);
  }
  out.vision_to_text /= static_cast<double>(b);
  out.text_to_vision /= static_cast<double>(b);
  out.combined = 0.5 * (out.vision_to_text + out.text_to_vision);
  return out;
}

DenseTensor ContrastiveLossGrad(const DenseTensor& s) {
  ContrastiveLoss(s);  // shape checks
  const std::size_t b = s.rows();
  DenseTensor g = DenseTensor::Zeros({b, b});
  std::vector<double> row_lse(b), col_lse(b);
  for (std::size_t i = 0; i < b; ++i) {
    row_lse[i] = LogSumExpRow(s, i);
    col_lse[i] = LogSumExpCol(s, i);
  }
  const double scale = 0.5 / static_cast<double>(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const double row_soft = std::exp(s(i, j) - row_lse[i]);
      const double col_soft = std::exp(s(i, j) - col_lse[j]);
      const double delta = i == j ? 2.0 : 0.0;
      g(i, j) = scale * (row_soft + col_soft - delta);
    }
  }
  return g;
}

EmbeddingGrads SimilarityBackward(const EmbeddingBatch& visual, const EmbeddingBatch& text,
                                  double tau, bool normalize, const DenseTensor& d_similarity) {
  if (d_similarity.rank() != 2 || d_similarity.rows() != visual.rows() ||
      d_similarity.cols() != text.rows()) {
    ShapeError("similarity gradient " + d_similarity.ShapeString());
  }
  DenseTensor ds = d_similarity;
  for (double& x : ds.values()) x /= tau;
  if (!normalize) {
    return {MatMul(ds, text.values()), MatMulTransA(ds, visual.values())};
  }
  const Normalized nv = NormalizeRows(visual.values());
  const Normalized nt = NormalizeRows(text.values());
  return {NormalizeBackward(nv, MatMul(ds, nt.unit)),
          NormalizeBackward(nt, MatMulTransA(ds, nv.unit))};
}

double TotalLoss(double seg, double cot, const LossWeights& weights) {
  return seg + weights.lambda * cot;
}

}  // namespace masktext::numerics
