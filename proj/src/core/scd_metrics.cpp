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

#include "core/scd_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/png_io.hpp"

namespace masktext {

namespace {

double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double Harmonic(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

// Intersection over union where an empty union counts as perfect agreement.
double Iou(double inter, double uni) { return uni > 0.0 ? inter / uni : 1.0; }

struct ChangeBlock {
  double nn = 0, nc = 0, cn = 0, cc = 0;  // gt-major: no/change x no/change
};

ChangeBlock Collapse(const ScdConfusion& conf) {
  ChangeBlock b;
  for (int g = 0; g < conf.dim(); ++g) {
    for (int p = 0; p < conf.dim(); ++p) {
      const double v = static_cast<double>(conf.at(g, p));
      if (g == 0 && p == 0) b.nn += v;
      else if (g == 0) b.nc += v;
      else if (p == 0) b.cn += v;
      else b.cc += v;
    }
  }
  return b;
}

void RequireNonEmpty(const ScdConfusion& conf) {
  if (conf.total() == 0) throw Error(ErrorCode::kEmptyConfusion, "confusion matrix is empty");
}

std::vector<std::filesystem::path> ListPngs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kInvalidArgument, "not a directory: " + dir.string());
  }
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint16_t> LoadLabels(const std::filesystem::path& path, EvalMode mode,
                                      int& width, int& height) {
  RawImage img = ReadPng(path);
  if (img.channels != 1) {
    throw Error(ErrorCode::kDecode, "label map must be single-channel: " + path.string());
  }
  width = img.width;
  height = img.height;
  if (mode == EvalMode::kBcd) {
    for (auto& v : img.samples) v = v != 0;
  }
  return std::move(img.samples);
}

}  // namespace

void Accumulate(std::span<const std::uint16_t> pred, std::span<const std::uint16_t> gt,
                ScdConfusion& conf) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction has " + std::to_string(pred.size()) +
                                               " pixels, ground truth " +
                                               std::to_string(gt.size()));
  }
  const auto n = static_cast<std::uint16_t>(conf.n_classes());
  // Validate first so a rejected pair leaves the confusion untouched.
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] > n || gt[i] > n) {
      throw Error(ErrorCode::kClassOutOfRange,
                  "label " + std::to_string(std::max(pred[i], gt[i])) + " at pixel " +
                      std::to_string(i) + " exceeds " + std::to_string(n) + " classes");
    }
  }
  for (std::size_t i = 0; i < pred.size(); ++i) conf.Add(gt[i], pred[i]);
}

void Accumulate(const ChangeMask& pred, const ChangeMask& gt, ScdConfusion& conf) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::kShapeMismatch,
                "prediction " + std::to_string(pred.width()) + "x" +
                    std::to_string(pred.height()) + " vs ground truth " +
                    std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  Accumulate(pred.labels(), gt.labels(), conf);
}

BinaryMetrics ComputeBinaryMetrics(const ScdConfusion& conf) {
  RequireNonEmpty(conf);
  const ChangeBlock b = Collapse(conf);
  BinaryMetrics m;
  m.tp = static_cast<std::uint64_t>(b.cc);
  m.fp = static_cast<std::uint64_t>(b.nc);
  m.fn = static_cast<std::uint64_t>(b.cn);
  m.tn = static_cast<std::uint64_t>(b.nn);
  m.precision = Ratio(b.cc, b.cc + b.nc);
  m.recall = Ratio(b.cc, b.cc + b.cn);
  m.f1 = Harmonic(m.precision, m.recall);
  m.iou = Ratio(b.cc, b.cc + b.nc + b.cn);
  m.oa = (b.cc + b.nn) / (b.cc + b.nn + b.nc + b.cn);
  return m;
}

double Kappa(std::span<const std::uint64_t> cells, int dim) {
  const auto d = static_cast<std::size_t>(dim);
  double total = 0.0, trace = 0.0;
  std::vector<double> rows(d, 0.0), cols(d, 0.0);
  for (std::size_t g = 0; g < d; ++g) {
    for (std::size_t p = 0; p < d; ++p) {
      const double v = static_cast<double>(cells[g * d + p]);
      rows[g] += v;
      cols[p] += v;
      total += v;
      if (g == p) trace += v;
    }
  }
  if (total == 0.0) return 0.0;
  double chance = 0.0;
  for (std::size_t i = 0; i < d; ++i) chance += rows[i] * cols[i];
  const double pe = chance / (total * total);
  if (pe == 1.0) return 0.0;
  const double po = trace / total;
  return (po - pe) / (1.0 - pe);
}

ScdMetrics ComputeScdMetrics(const ScdConfusion& conf, PrfAveraging averaging) {
  RequireNonEmpty(conf);
  const int dim = conf.dim();
  const ChangeBlock b = Collapse(conf);
  ScdMetrics m;

  m.iou_no_change = Iou(b.nn, b.nn + b.nc + b.cn);
  m.iou_change = Iou(b.cc, b.cc + b.nc + b.cn);
  m.miou = 0.5 * (m.iou_no_change + m.iou_change);

  std::vector<std::uint64_t> suppressed(conf.cells().begin(), conf.cells().end());
  suppressed[0] = 0;
  m.kappa_no_change_suppressed = Kappa(suppressed, dim);
  const bool any_change = b.nc + b.cn + b.cc > 0;
  m.sek = any_change ? m.kappa_no_change_suppressed * std::exp(m.iou_change - 1.0) : 0.0;

  double sc_tp = 0.0, trace = 0.0;
  for (int c = 0; c < dim; ++c) {
    trace += static_cast<double>(conf.at(c, c));
    if (c > 0) sc_tp += static_cast<double>(conf.at(c, c));
  }
  const double pred_change = b.nc + b.cc;
  const double gt_change = b.cn + b.cc;
  const double sc_precision = Ratio(sc_tp, pred_change);
  const double sc_recall = Ratio(sc_tp, gt_change);
  m.f_scd = pred_change == 0.0 && gt_change == 0.0 ? 1.0 : Harmonic(sc_precision, sc_recall);
  m.oa = trace / static_cast<double>(conf.total());

  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  int present = 0;
  for (int c = 1; c < dim; ++c) {
    double gt_c = 0.0, pred_c = 0.0;
    for (int k = 0; k < dim; ++k) {
      gt_c += static_cast<double>(conf.at(c, k));
      pred_c += static_cast<double>(conf.at(k, c));
    }
    const double tp = static_cast<double>(conf.at(c, c));
    ClassScore s;
    s.class_index = c;
    s.present = gt_c > 0.0 || pred_c > 0.0;
    s.precision = Ratio(tp, pred_c);
    s.recall = Ratio(tp, gt_c);
    s.f1 = Harmonic(s.precision, s.recall);
    if (s.present) {
      ++present;
      sum_p += s.precision;
      sum_r += s.recall;
      sum_f += s.f1;
    }
    m.classes.push_back(s);
  }
  if (averaging == PrfAveraging::kMacro) {
    m.precision = Ratio(sum_p, present);
    m.recall = Ratio(sum_r, present);
    m.mf1 = Ratio(sum_f, present);
  } else {
    m.precision = sc_precision;
    m.recall = sc_recall;
    m.mf1 = Harmonic(sc_precision, sc_recall);
  }
  return m;
}

EvalResult EvaluateDirectories(const std::filesystem::path& pred_dir,
                               const std::filesystem::path& gt_dir,
                               const EvalOptions& options) {
  const int n = options.mode == EvalMode::kBcd ? 1 : options.n_classes;
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one semantic class");
  ListPngs(pred_dir);  // existence check
  const auto gt_files = ListPngs(gt_dir);
  if (gt_files.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no PNG label maps in " + gt_dir.string());
  }

  std::vector<std::optional<ScdConfusion>> parts(gt_files.size());
  std::vector<std::exception_ptr> failures(gt_files.size());
  ParallelFor(0, gt_files.size(), options.jobs, [&](std::size_t i) {
    try {
      const auto pred_path = pred_dir / gt_files[i].filename();
      int gw = 0, gh = 0, pw = 0, ph = 0;
      const auto gt = LoadLabels(gt_files[i], options.mode, gw, gh);
      const auto pred = LoadLabels(pred_path, options.mode, pw, ph);
      if (gw != pw || gh != ph) {
        throw Error(ErrorCode::kShapeMismatch,
                    gt_files[i].filename().string() + ": prediction " + std::to_string(pw) +
                        "x" + std::to_string(ph) + " vs ground truth " + std::to_string(gw) +
                        "x" + std::to_string(gh));
      }
      ScdConfusion conf(n);
      Accumulate(pred, gt, conf);
      parts[i] = std::move(conf);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  EvalResult result{ScdConfusion(n), gt_files.size()};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (failures[i]) std::rethrow_exception(failures[i]);
    result.confusion.Merge(*parts[i]);
  }
  return result;
}

nlohmann::ordered_json BinaryMetricsToJson(const BinaryMetrics& m) {
  return {{"f1", m.f1},   {"iou", m.iou}, {"oa", m.oa}, {"precision", m.precision},
          {"recall", m.recall}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
}

nlohmann::ordered_json ScdMetricsToJson(const ScdMetrics& m) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (const auto& c : m.classes) {
    classes.push_back({{"class_index", c.class_index},
                       {"present", c.present},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1}});
  }
  return {{"sek", m.sek},
          {"f_scd", m.f_scd},
          {"miou", m.miou},
          {"precision", m.precision},
          {"recall", m.recall},
          {"mf1", m.mf1},
          {"oa", m.oa},
          {"iou_no_change", m.iou_no_change},
          {"iou_change", m.iou_change},
          {"kappa_no_change_suppressed", m.kappa_no_change_suppressed},
          {"classes", classes}};
}

}  // namespace masktext
