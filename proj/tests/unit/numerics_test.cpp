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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "core/alignment_numerics.hpp"
#include "core/errors.hpp"
#include "core/grad_check.hpp"

namespace masktext::numerics {
namespace {

using Mat = std::vector<std::vector<double>>;

DenseTensor Random(std::mt19937_64& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(r * c);
  for (auto& x : v) x = n(rng);
  return DenseTensor::Matrix(r, c, std::move(v));
}

// classes x pixels, columns on the simplex interior.
DenseTensor RandomProbs(std::mt19937_64& rng, std::size_t classes, std::size_t pixels) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  DenseTensor p = DenseTensor::Zeros({classes, pixels});
  for (std::size_t i = 0; i < pixels; ++i) {
    double s = 0;
    for (std::size_t c = 0; c < classes; ++c) s += p(c, i) = u(rng);
    for (std::size_t c = 0; c < classes; ++c) p(c, i) /= s;
  }
  return p;
}

std::vector<int> RandomTargets(std::mt19937_64& rng, std::size_t classes, std::size_t pixels) {
  std::vector<int> t(pixels);
  for (auto& x : t) x = std::uniform_int_distribution<int>(0, int(classes) - 1)(rng);
  return t;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// Naive triple-loop attention.
Mat NaiveAttention(const DenseTensor& q, const DenseTensor& k, const DenseTensor& v) {
  const std::size_t nq = q.rows(), nk = k.rows(), d = q.cols(), dv = v.cols();
  Mat out(nq, std::vector<double>(dv, 0.0));
  for (std::size_t i = 0; i < nq; ++i) {
    std::vector<double> s(nk);
    for (std::size_t j = 0; j < nk; ++j) {
      double dot = 0;
      for (std::size_t t = 0; t < d; ++t) dot += q(i, t) * k(j, t);
      s[j] = dot / std::sqrt(double(d));
    }
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0;
    for (auto& x : s) z += x = std::exp(x - mx);
    for (std::size_t j = 0; j < nk; ++j)
      for (std::size_t t = 0; t < dv; ++t) out[i][t] += s[j] / z * v(j, t);
  }
  return out;
}

void ExpectNear(const DenseTensor& a, const Mat& b, double tol) {
  ASSERT_EQ(a.rows(), b.size());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_NEAR(a(i, j), b[i][j], tol);
}

TEST(Attention, MatchesNaiveOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto q = Random(rng, 3, 4), k = Random(rng, 5, 4), v = Random(rng, 5, 2);
    ExpectNear(Attention(q, k, v), NaiveAttention(q, k, v), 1e-12);
  }
}

TEST(Attention, SingleKeyReturnsValueRow) {
  std::mt19937_64 rng(2);
  auto q = Random(rng, 4, 3), k = Random(rng, 1, 3), v = Random(rng, 1, 5);
  auto out = Attention(q, k, v);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(out(i, j), v(0, j));
}

TEST(Attention, LargeAlignedQuerySelectsValue) {
  // Orthonormal key rows; query 100 * K_1, scaled by 1/sqrt(d) = 1/2.
  auto k = DenseTensor::Identity(4);
  auto q = DenseTensor::Matrix(1, 4, {100, 0, 0, 0});
  std::mt19937_64 rng(3);
  auto v = Random(rng, 4, 3);
  auto out = Attention(q, k, v);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(out(0, j), v(0, j), 1e-6);
}

TEST(Attention, WeightRowsSumToOne) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto fwd = AttentionWithWeights(Random(rng, 6, 3, 30.0), Random(rng, 7, 3, 30.0),
                                    Random(rng, 7, 2));
    for (std::size_t i = 0; i < 6; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < 7; ++j) s += fwd.weights(i, j);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(Attention, ShapeMismatch) {
  std::mt19937_64 rng(5);
  EXPECT_EQ(CodeOf([&] { Attention(Random(rng, 2, 3), Random(rng, 2, 4), Random(rng, 2, 2)); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(CodeOf([&] { Attention(Random(rng, 2, 3), Random(rng, 2, 3), Random(rng, 3, 2)); }),
            ErrorCode::kShapeMismatch);
}

TEST(Fuse, DegenerateAndZeroBridge) {
  std::mt19937_64 rng(6);
  auto ri = Random(rng, 3, 4);
  auto rt = DenseTensor::Matrix(1, 4, {0, 0, 0, 0});
  auto out = Fuse(ri, rt, DenseTensor::Identity(4));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(out(i, j), 0.0 + ri(i, j));

  auto rt2 = Random(rng, 5, 4);
  auto zero = Fuse(ri, rt2, DenseTensor::Zeros({4, 4}));
  ExpectNear(zero, NaiveAttention(ri, rt2, rt2), 1e-12);
}

TEST(Fuse, MatchesComposedOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    FusionWeights w{Random(rng, 4, 3), Random(rng, 5, 3), Random(rng, 5, 2), Random(rng, 2, 4)};
    auto ri = Random(rng, 6, 4), rt = Random(rng, 3, 5);
    Mat att = NaiveAttention(MatMul(ri, w.query), MatMul(rt, w.key), MatMul(rt, w.value));
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t t = 0; t < 4; ++t) att[i][j] += w.bridge(j, t) * ri(i, t);
    ExpectNear(Fuse(ri, rt, w), att, 1e-12);
  }
  EXPECT_EQ(CodeOf([&] { Fuse(Random(rng, 2, 3), Random(rng, 2, 3), DenseTensor::Identity(4)); }),
            ErrorCode::kShapeMismatch);
}

TEST(Focal, HandValue) {
  auto p = DenseTensor::Matrix(2, 1, {0.5, 0.5});
  std::vector<int> t{0};
  EXPECT_NEAR(FocalLoss(p, t), 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(FocalLoss(p, t), 0.173287, 1e-6);
}

TEST(Focal, PerfectPredictionIsClampBound) {
  auto p = DenseTensor::Matrix(2, 3, {1, 0, 1, 0, 1, 0});
  std::vector<int> t{0, 1, 0};
  const double bound = std::pow(1e-7, 2.0) * -std::log(1 - 1e-7);
  EXPECT_LE(FocalLoss(p, t), bound * (1 + 1e-9));
  EXPECT_GE(FocalLoss(p, t), 0.0);
}

TEST(Focal, GammaZeroIsCrossEntropy) {
  std::mt19937_64 rng(8);
  auto p = RandomProbs(rng, 4, 30);
  auto t = RandomTargets(rng, 4, 30);
  double ce = 0;
  for (std::size_t i = 0; i < 30; ++i) ce -= std::log(p(t[i], i));
  ce /= 30;
  EXPECT_NEAR(FocalLoss(p, t, {0.0, {}}), ce, 1e-12);
  EXPECT_NEAR(CrossEntropy(p, t), ce, 1e-12);
}

TEST(Focal, AlphaIndexedByTarget) {
  auto p = DenseTensor::Matrix(2, 2, {0.5, 0.2, 0.5, 0.8});
  std::vector<int> t{0, 1};
  FocalParams params{2.0, {3.0, 0.5}};
  const double expect = (3.0 * 0.25 * -std::log(0.5) + 0.5 * 0.04 * -std::log(0.8)) / 2;
  EXPECT_NEAR(FocalLoss(p, t, params), expect, 1e-15);
  EXPECT_EQ(CodeOf([&] { FocalLoss(p, t, {2.0, {1.0}}); }), ErrorCode::kShapeMismatch);
}

TEST(Focal, SmallProbabilityGradientAgainstRichardson) {
  // Near p = 1e-3 plain central differences at h = 1e-5 carry O(h^2 / p^3)
  // truncation error; one step-halving extrapolation removes the h^2 term.
  auto p = DenseTensor::Matrix(3, 2, {1e-3, 0.6, 0.4, 2e-3, 0.599, 0.398});
  std::vector<int> t{0, 1};
  auto lg = FocalLossGrad(p, t);
  auto f = [&](const DenseTensor& x) { return FocalLoss(x, t); };
  const auto d1 = NumericGradient(f, p, 1e-5);
  const auto d2 = NumericGradient(f, p, 5e-6);
  double plain = 0, extrapolated = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double rich = (4 * d2.values()[i] - d1.values()[i]) / 3;
    plain = std::max(plain, RelativeError(lg.grad.values()[i], d1.values()[i]));
    extrapolated = std::max(extrapolated, RelativeError(lg.grad.values()[i], rich));
  }
  EXPECT_LT(extrapolated, 1e-7);
  EXPECT_LT(extrapolated, plain);
}

TEST(Focal, ZeroGradientWhereClamped) {
  auto p = DenseTensor::Matrix(2, 1, {1.0, 0.0});
  std::vector<int> t{0};
  auto lg = FocalLossGrad(p, t);
  for (double g : lg.grad.values()) EXPECT_EQ(g, 0.0);
}

// Scalar-loop dice.
double DiceOracle(const DenseTensor& p, const std::vector<int>& t, double eps) {
  double acc = 0;
  for (std::size_t c = 0; c < p.rows(); ++c) {
    double inter = 0, ps = 0, ts = 0;
    for (std::size_t i = 0; i < p.cols(); ++i) {
      const double tc = t[i] == int(c) ? 1.0 : 0.0;
      inter += p(c, i) * tc;
      ps += p(c, i);
      ts += tc;
    }
    acc += (2 * inter + eps) / (ps + ts + eps);
  }
  return 1 - acc / p.rows();
}

TEST(Dice, PerfectWrongAndOracle) {
  auto perfect = DenseTensor::Matrix(2, 4, {1, 0, 0, 1, 0, 1, 1, 0});
  std::vector<int> t{0, 1, 1, 0};
  EXPECT_LT(std::abs(DiceLoss(perfect, t)), 1e-6);
  auto wrong = DenseTensor::Matrix(2, 4, {0, 1, 1, 0, 1, 0, 0, 1});
  EXPECT_NEAR(DiceLoss(wrong, t), 1.0, 1e-6);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = RandomProbs(rng, 2, 16);
    auto tt = RandomTargets(rng, 2, 16);
    EXPECT_NEAR(DiceLoss(p, tt), DiceOracle(p, tt, 1e-6), 1e-12);
  }
}

TEST(Dice, PerfectPredictionIsSimplexMinimum) {
  // The raw-probability gradient is not small at a perfect prediction (an
  // absent class contributes 1 / (C eps) per pixel), but every direction that
  // stays on the simplex increases the loss.
  auto p = DenseTensor::Matrix(3, 4, {1, 0, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0});
  std::vector<int> t{0, 1, 1, 0};
  auto lg = DiceLossGrad(p, t);
  EXPECT_LT(std::abs(lg.value), 1e-6);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t from = static_cast<std::size_t>(t[i]);
    for (std::size_t to = 0; to < 3; ++to) {
      if (to == from) continue;
      const double dir = lg.grad(to, i) - lg.grad(from, i);
      EXPECT_GE(dir, 0.0);
    }
  }
  auto f = [&](const DenseTensor& x) { return DiceLoss(x, t); };
  auto num = NumericGradient(f, p, 1e-9);
  EXPECT_LT(MaxRelativeError(lg.grad, num), 1e-4);
}

// Lovasz-softmax via cumulative sums over the descending error order.
double LovaszOracle(const DenseTensor& p, const std::vector<int>& t) {
  double total = 0;
  int present = 0;
  for (std::size_t c = 0; c < p.rows(); ++c) {
    std::vector<double> fg(p.cols()), err(p.cols());
    double gts = 0;
    for (std::size_t i = 0; i < p.cols(); ++i) {
      fg[i] = t[i] == int(c);
      err[i] = std::abs(fg[i] - p(c, i));
      gts += fg[i];
    }
    if (gts == 0) continue;
    std::vector<std::size_t> order(p.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return err[a] > err[b]; });
    double cum_fg = 0, cum_bg = 0, prev_jac = 0, loss = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      cum_fg += fg[order[k]];
      cum_bg += 1 - fg[order[k]];
      const double inter = gts - cum_fg;
      const double uni = gts + cum_bg;
      const double jac = 1 - inter / uni;
      loss += err[order[k]] * (jac - prev_jac);
      prev_jac = jac;
    }
    total += loss;
    ++present;
  }
  return present ? total / present : 0;
}

TEST(Lovasz, HandValuesAndOracle) {
  auto one = DenseTensor::Matrix(2, 1, {0.3, 0.7});
  EXPECT_NEAR(LovaszLoss(one, std::vector<int>{0}), 0.7, 1e-15);
  auto perfect = DenseTensor::Matrix(2, 3, {1, 0, 1, 0, 1, 0});
  EXPECT_EQ(LovaszLoss(perfect, std::vector<int>{0, 1, 0}), 0.0);

  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t classes = 2 + trial % 3;
    auto p = RandomProbs(rng, classes, 8);
    auto t = RandomTargets(rng, classes, 8);
    EXPECT_NEAR(LovaszLoss(p, t), LovaszOracle(p, t), 1e-12);
  }
}

TEST(SegLoss, CombinationAndPerfect) {
  std::mt19937_64 rng(11);
  auto p = RandomProbs(rng, 3, 20);
  auto t = RandomTargets(rng, 3, 20);
  const double f = FocalLoss(p, t), d = DiceOracle(p, t, 1e-6), l = LovaszOracle(p, t);
  auto b = SegLoss(p, t);
  EXPECT_NEAR(b.total, 0.4 * f + 0.3 * d + 0.3 * l, 1e-12);

  LossWeights focal_only;
  focal_only.alpha = 1;
  focal_only.beta = focal_only.gamma = 0;
  EXPECT_EQ(SegLoss(p, t, focal_only).total, f);

  // Linear in the weights.
  LossWeights a, c;
  a.alpha = 0.1, a.beta = 0.7, a.gamma = 0.2;
  c.alpha = 0.9, c.beta = 0.1, c.gamma = 0.5;
  LossWeights sum;
  sum.alpha = a.alpha + c.alpha, sum.beta = a.beta + c.beta, sum.gamma = a.gamma + c.gamma;
  EXPECT_NEAR(SegLoss(p, t, sum).total, SegLoss(p, t, a).total + SegLoss(p, t, c).total, 1e-12);

  auto perfect = DenseTensor::Matrix(2, 3, {1, 0, 1, 0, 1, 0});
  EXPECT_LE(SegLoss(perfect, std::vector<int>{0, 1, 0}).total, 1e-5);
}

TEST(SegLoss, RejectsBadTargets) {
  auto p = DenseTensor::Matrix(2, 2, {0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(CodeOf([&] { SegLoss(p, std::vector<int>{0}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(CodeOf([&] { SegLoss(p, std::vector<int>{0, 2}); }), ErrorCode::kClassOutOfRange);
}

TEST(ProbMap, Validation) {
  EXPECT_NO_THROW(ProbMap(2, 1, {0.25, 0.75}));
  EXPECT_THROW(ProbMap(2, 1, {0.25, 0.7}), Error);
  EXPECT_THROW(ProbMap(2, 1, {-0.25, 1.25}), Error);
}

TEST(Similarity, IdentityScalingAndOracle) {
  EmbeddingBatch eye(DenseTensor::Identity(3));
  auto s = SimilarityMatrix(eye, eye, 1.0, false);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(s(i, j), i == j ? 1.0 : 0.0);

  std::mt19937_64 rng(12);
  EmbeddingBatch a(Random(rng, 4, 6)), b(Random(rng, 4, 6));
  auto s1 = SimilarityMatrix(a, b, 1.0, false), s2 = SimilarityMatrix(a, b, 0.5, false);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(s2(i, j), 2 * s1(i, j));
      double dot = 0, na = 0, nb = 0;
      for (std::size_t k = 0; k < 6; ++k) {
        dot += a.values()(i, k) * b.values()(j, k);
        na += a.values()(i, k) * a.values()(i, k);
        nb += b.values()(j, k) * b.values()(j, k);
      }
      EXPECT_NEAR(s1(i, j), dot, 1e-12);
      EXPECT_NEAR(SimilarityMatrix(a, b, 0.7)(i, j), dot / std::sqrt(na * nb) / 0.7, 1e-12);
    }
  EXPECT_EQ(CodeOf([&] { SimilarityMatrix(a, b, 0.0); }), ErrorCode::kNonPositiveTau);
  EXPECT_EQ(CodeOf([&] { SimilarityMatrix(a, b, -1.0); }), ErrorCode::kNonPositiveTau);
  EXPECT_EQ(CodeOf([&] { SimilarityMatrix(a, EmbeddingBatch(Random(rng, 3, 6)), 1.0); }),
            ErrorCode::kShapeMismatch);
  EmbeddingBatch zero(DenseTensor::Zeros({4, 6}));
  EXPECT_EQ(CodeOf([&] { SimilarityMatrix(a, zero, 1.0); }), ErrorCode::kInvalidArgument);
}

TEST(Contrastive, ClosedFormsAndSymmetry) {
  auto one = ContrastiveLoss(DenseTensor::Matrix(1, 1, {3.7}));
  EXPECT_EQ(one.vision_to_text, 0.0);
  EXPECT_EQ(one.text_to_vision, 0.0);
  EXPECT_EQ(one.combined, 0.0);

  auto two = ContrastiveLoss(DenseTensor::Identity(2));
  EXPECT_NEAR(two.vision_to_text, std::log(1 + std::exp(-1.0)), 1e-9);
  EXPECT_NEAR(two.text_to_vision, std::log(1 + std::exp(-1.0)), 1e-9);
  EXPECT_NEAR(two.combined, 0.313262, 1e-6);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = Random(rng, 5, 5, 3.0);
    auto sym = m;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) sym(i, j) = m(i, j) + m(j, i);
    auto l = ContrastiveLoss(sym);
    EXPECT_NEAR(l.vision_to_text, l.text_to_vision, 1e-12);
    EXPECT_GT(l.combined, 0.0);
  }
}

TEST(Contrastive, ShiftAndPermutationInvariance) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = Random(rng, 6, 6, 2.0);
    auto shifted = s;
    for (double& v : shifted.values()) v += 123.456;
    auto a = ContrastiveLoss(s), b = ContrastiveLoss(shifted);
    EXPECT_NEAR(a.vision_to_text, b.vision_to_text, 1e-10);
    EXPECT_NEAR(a.text_to_vision, b.text_to_vision, 1e-10);
    EXPECT_NEAR(a.combined, b.combined, 1e-10);

    EmbeddingBatch vi(Random(rng, 6, 4)), tx(Random(rng, 6, 4));
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    DenseTensor pv = DenseTensor::Zeros({6, 4}), pt = DenseTensor::Zeros({6, 4});
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        pv(i, k) = vi.values()(perm[i], k);
        pt(i, k) = tx.values()(perm[i], k);
      }
    auto l1 = ContrastiveLoss(SimilarityMatrix(vi, tx, 0.7));
    auto l2 = ContrastiveLoss(SimilarityMatrix(EmbeddingBatch(pv), EmbeddingBatch(pt), 0.7));
    EXPECT_NEAR(l1.combined, l2.combined, 1e-12);
    EXPECT_NEAR(l1.vision_to_text, l2.vision_to_text, 1e-12);
  }
  EXPECT_EQ(CodeOf([&] { ContrastiveLoss(Random(rng, 2, 3)); }), ErrorCode::kShapeMismatch);
}

TEST(TotalLoss, Arithmetic) {
  EXPECT_EQ(TotalLoss(1.0, 0.0), 1.0);
  EXPECT_EQ(TotalLoss(0.0, 2.0), 1.0);
  EXPECT_NEAR(TotalLoss(0.8173, 1.2291), 0.8173 + 0.5 * 1.2291, 1e-15);
}

TEST(GradCheck, SpecificSmallCases) {
  std::mt19937_64 rng(15);
  // Attention at 3x4 against central differences, tighter than the op default.
  auto q = Random(rng, 3, 4), k = Random(rng, 3, 4), v = Random(rng, 3, 4);
  auto dout = Random(rng, 3, 4);
  auto loss = [&](const DenseTensor& qq, const DenseTensor& kk, const DenseTensor& vv) {
    auto o = Attention(qq, kk, vv);
    double s = 0;
    for (std::size_t i = 0; i < o.size(); ++i) s += o.values()[i] * dout.values()[i];
    return s;
  };
  auto g = AttentionBackward(q, k, v, AttentionWithWeights(q, k, v), dout);
  auto nq = NumericGradient([&](const DenseTensor& x) { return loss(x, k, v); }, q, 1e-5);
  auto nk = NumericGradient([&](const DenseTensor& x) { return loss(q, x, v); }, k, 1e-5);
  auto nv = NumericGradient([&](const DenseTensor& x) { return loss(q, k, x); }, v, 1e-5);
  EXPECT_LT(MaxRelativeError(g.d_query, nq), 1e-6);
  EXPECT_LT(MaxRelativeError(g.d_key, nk), 1e-6);
  EXPECT_LT(MaxRelativeError(g.d_value, nv), 1e-6);

  // Contrastive at B = 4, d = 8.
  EmbeddingBatch vi(Random(rng, 4, 8)), tx(Random(rng, 4, 8));
  auto s = SimilarityMatrix(vi, tx, 0.7);
  auto ds = ContrastiveLossGrad(s);
  auto ns = NumericGradient([](const DenseTensor& x) { return ContrastiveLoss(x).combined; }, s,
                            1e-5);
  EXPECT_LT(MaxRelativeError(ds, ns), 1e-6);
  auto ge = SimilarityBackward(vi, tx, 0.7, true, ds);
  auto nvi = NumericGradient(
      [&](const DenseTensor& x) {
        return ContrastiveLoss(SimilarityMatrix(EmbeddingBatch(x), tx, 0.7)).combined;
      },
      vi.values(), 1e-5);
  EXPECT_LT(MaxRelativeError(ge.d_visual, nvi), 1e-6);
}

TEST(GradCheck, AllOpsPassAtDefaults) {
  auto report = RunGradCheck({});
  EXPECT_TRUE(report.passed);
  ASSERT_EQ(report.ops.size(), GradCheckOps().size());
  for (const auto& op : report.ops) {
    EXPECT_TRUE(op.passed) << op.op << " " << op.max_rel_error;
    EXPECT_EQ(op.trials, 20) << op.op;
    EXPECT_LT(op.max_rel_error, 1e-4) << op.op;
  }
  // Deterministic report.
  EXPECT_EQ(RunGradCheck({}).ToJson().dump(), report.ToJson().dump());
}

TEST(GradCheck, RejectsUnknownOpsAndNonFinite) {
  GradCheckOptions o;
  o.ops = {"softmax"};
  EXPECT_EQ(CodeOf([&] { RunGradCheck(o); }), ErrorCode::kInvalidArgument);
  o.ops = {};
  o.trials = 0;
  EXPECT_EQ(CodeOf([&] { RunGradCheck(o); }), ErrorCode::kInvalidArgument);
  auto a = DenseTensor::Matrix(1, 2, {1.0, 2.0});
  DenseTensor b = DenseTensor::Zeros({1, 2});
  b.values()[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(CodeOf([&] { MaxRelativeError(a, b); }), ErrorCode::kNonFiniteGradient);
}

TEST(GradCheck, RelativeErrorFloor) {
  EXPECT_EQ(RelativeError(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(RelativeError(0.0, 1e-9), 1e-3);
  EXPECT_DOUBLE_EQ(RelativeError(2.0, 1.0), 0.5);
}

}  // namespace
}  // namespace masktext::numerics
