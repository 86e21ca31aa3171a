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

#include "masktext/masktext.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "core/alignment_numerics.hpp"
#include "core/dataset_io.hpp"
#include "core/errors.hpp"
#include "core/grad_check.hpp"
#include "core/overlay.hpp"
#include "core/scd_metrics.hpp"
#include "core/template_engine.hpp"
#include "core/transcriber.hpp"

namespace mt = masktext;
namespace mn = masktext::numerics;

struct mt_quadruple_list {
  std::vector<mt::SemanticQuadruple> items;
};

struct mt_dataset {
  mt::DatasetManifest manifest;
};

struct mt_confusion {
  mt::ScdConfusion conf;
};

namespace {

thread_local std::string g_last_error;

mt_status Fail(mt::ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<mt_status>(code);
}

template <typename Fn>
mt_status Guard(Fn&& fn) {
  try {
    fn();
    return MT_OK;
  } catch (const mt::Error& e) {
    return Fail(e.code(), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(mt::ErrorCode::kInternal, "out of memory");
  } catch (const std::exception& e) {
    return Fail(mt::ErrorCode::kInternal, e.what());
  } catch (...) {
    return Fail(mt::ErrorCode::kInternal, "unknown failure");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw mt::Error(mt::ErrorCode::kInvalidArgument, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Emit(char** out, const std::string& s) {
  if (out) *out = Dup(s);
}

mt::DenseTensor ToTensor(const mt_matrix& m, const char* what) {
  if (m.rows * m.cols > 0 && !m.data) {
    throw mt::Error(mt::ErrorCode::kInvalidArgument, std::string(what) + " has no data");
  }
  std::vector<double> v(m.data, m.data + m.rows * m.cols);
  return mt::DenseTensor::Matrix(m.rows, m.cols, std::move(v));
}

void CopyOut(const mt::DenseTensor& t, double* out) {
  if (out) std::copy(t.values().begin(), t.values().end(), out);
}

std::span<const int> Targets(const int* target, const mt_matrix& p) {
  Require(target != nullptr || p.cols == 0, "target is NULL");
  return {target, p.cols};
}

mt::QuantityThresholds Thresholds(const mt_thresholds* t) {
  mt::QuantityThresholds th;
  if (t) th = {t->t1, t->t2, t->t3};
  th.Validate();
  return th;
}

mt::LossWeights Weights(const mt_loss_weights* w) {
  mt::LossWeights lw;
  if (w) lw = {w->alpha, w->beta, w->gamma, w->lambda, w->tau};
  lw.Validate();
  return lw;
}

mt::SemanticQuadruple FromC(const mt_quadruple& q) {
  Require(q.location >= 0 && q.location < 9, "location out of range");
  Require(q.quantity >= 0 && q.quantity < 4, "quantity out of range");
  mt::SemanticQuadruple out;
  out.location = static_cast<mt::Direction>(q.location);
  out.quantity = static_cast<mt::Quantity>(q.quantity);
  out.category = q.category ? q.category : "";
  out.change_type = q.change_type ? q.change_type : "";
  out.pixel_count = q.pixel_count;
  out.centroid_x = q.centroid_x;
  out.centroid_y = q.centroid_y;
  out.class_index = q.class_index;
  return out;
}

mt::AttributeSelection Attrs(unsigned bits) {
  Require(bits <= MT_ATTR_ALL, "unknown attribute bits");
  return mt::AttributeSelection::FromBits(bits);
}

const mt::ManifestEntry& FindEntry(const mt_dataset* dataset, const char* image_id) {
  Require(dataset && image_id, "invalid dataset arguments");
  const mt::ManifestEntry* e = dataset->manifest.Find(image_id);
  if (!e) {
    throw mt::Error(mt::ErrorCode::kInvalidArgument,
                    std::string("no manifest entry '") + image_id + "'");
  }
  return *e;
}

mn::FusionWeights FusionFromC(mt_matrix w_q, mt_matrix w_k, mt_matrix w_v, mt_matrix bridge) {
  return {ToTensor(w_q, "w_q"), ToTensor(w_k, "w_k"), ToTensor(w_v, "w_v"),
          ToTensor(bridge, "bridge")};
}

void RequireCell(const mt_confusion* conf, int gt, int pred) {
  Require(conf != nullptr, "confusion is NULL");
  if (gt < 0 || pred < 0 || gt >= conf->conf.dim() || pred >= conf->conf.dim()) {
    throw mt::Error(mt::ErrorCode::kClassOutOfRange, "confusion cell out of range");
  }
}

}  // namespace

extern "C" {

const char* mt_version(void) { return "1.0.0"; }

const char* mt_status_name(mt_status status) {
  if (status < MT_OK || status > MT_ERR_INTERNAL) return "Unknown";
  return mt::ErrorCodeName(static_cast<mt::ErrorCode>(status));
}

const char* mt_last_error(void) { return g_last_error.c_str(); }

void mt_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------------------

const char* mt_direction_name(int direction) {
  if (direction < 0 || direction >= 9) return "";
  return mt::DirectionName(static_cast<mt::Direction>(direction)).data();
}

const char* mt_quantity_name(int quantity) {
  if (quantity < 0 || quantity >= 4) return "";
  return mt::QuantityName(static_cast<mt::Quantity>(quantity)).data();
}

void mt_thresholds_default(mt_thresholds* out) {
  if (!out) return;
  const mt::QuantityThresholds th;
  *out = {th.t1, th.t2, th.t3};
}

mt_status mt_centroid(const uint8_t* bits, int width, int height, double* cx, double* cy) {
  return Guard([&] {
    Require(bits && cx && cy && width > 0 && height > 0, "invalid centroid arguments");
    std::vector<std::uint8_t> raster(bits, bits + static_cast<std::size_t>(width) * height);
    const mt::Centroid c = mt::ComputeCentroid(mt::BinaryMask(width, height, std::move(raster)));
    *cx = c.x;
    *cy = c.y;
  });
}

mt_status mt_classify_direction(double cx, double cy, int width, int height, int* direction) {
  return Guard([&] {
    Require(direction && width > 0 && height > 0, "invalid direction arguments");
    Require(cx >= 0 && cx < width && cy >= 0 && cy < height, "point outside the image");
    *direction = static_cast<int>(mt::ClassifyDirection(cx, cy, width, height));
  });
}

mt_status mt_classify_quantity(uint64_t pixel_count, const mt_thresholds* thresholds,
                               int* quantity) {
  return Guard([&] {
    Require(quantity && pixel_count > 0, "invalid quantity arguments");
    *quantity = static_cast<int>(mt::ClassifyQuantity(pixel_count, Thresholds(thresholds)));
  });
}

mt_status mt_transcribe(const uint16_t* labels, int width, int height,
                        const mt_class_entry* classes, size_t n_classes,
                        const mt_thresholds* thresholds, mt_quadruple_list** out) {
  return Guard([&] {
    Require(labels && out && width > 0 && height > 0, "invalid transcribe arguments");
    Require(classes || n_classes == 0, "class table is NULL");
    std::vector<mt::ClassEntry> table;
    for (size_t i = 0; i < n_classes; ++i) {
      table.push_back({classes[i].class_index,
                       classes[i].category ? classes[i].category : "",
                       classes[i].change_type ? classes[i].change_type : ""});
    }
    std::vector<std::uint16_t> raster(labels, labels + static_cast<std::size_t>(width) * height);
    const mt::ChangeMask mask(width, height, std::move(raster), std::move(table));
    auto list = std::make_unique<mt_quadruple_list>();
    list->items = mt::TranscribeMask(mask, Thresholds(thresholds));
    *out = list.release();
  });
}

size_t mt_quadruple_list_size(const mt_quadruple_list* list) {
  return list ? list->items.size() : 0;
}

mt_status mt_quadruple_list_get(const mt_quadruple_list* list, size_t index, mt_quadruple* out) {
  return Guard([&] {
    Require(list && out, "invalid list arguments");
    Require(index < list->items.size(), "index out of range");
    const auto& q = list->items[index];
    *out = {static_cast<int>(q.location), static_cast<int>(q.quantity), q.category.c_str(),
            q.change_type.c_str(), q.pixel_count, q.centroid_x, q.centroid_y, q.class_index};
  });
}

void mt_quadruple_list_free(mt_quadruple_list* list) { delete list; }

// ---------------------------------------------------------------------------

mt_status mt_attrs_parse(const char* list, unsigned* attrs) {
  return Guard([&] {
    Require(list && attrs, "invalid attrs arguments");
    *attrs = mt::AttributeSelection::Parse(list).bits();
  });
}

int mt_select_template(uint64_t seed, const char* image_id, uint64_t class_index) {
  return mt::SelectTemplate(seed, image_id ? image_id : "", class_index);
}

mt_status mt_render(const mt_quadruple* quadruple, int template_id, unsigned attrs,
                    char** sentence) {
  return Guard([&] {
    Require(quadruple && sentence, "invalid render arguments");
    *sentence = Dup(mt::Render(FromC(*quadruple), template_id, Attrs(attrs)).sentence);
  });
}

mt_status mt_describe(const mt_quadruple_list* list, const char* image_id, uint64_t seed,
                      unsigned attrs, char** text) {
  return Guard([&] {
    Require(list && image_id && text, "invalid describe arguments");
    *text = Dup(mt::DescribeSample(list->items, image_id, seed, Attrs(attrs)).text);
  });
}

mt_status mt_parse(const char* sentence, mt_parsed* out) {
  return Guard([&] {
    Require(sentence && out, "invalid parse arguments");
    const mt::ParsedDescription d = mt::ParseDescription(sentence);
    mt_parsed p{};
    p.template_id = d.template_id;
    p.no_change = d.no_change ? 1 : 0;
    p.attrs = d.attrs.bits();
    p.quantity = d.quantity ? static_cast<int>(*d.quantity) : -1;
    p.location = d.location ? static_cast<int>(*d.location) : -1;
    p.category = d.category ? Dup(*d.category) : nullptr;
    p.change_type = d.change_type ? Dup(*d.change_type) : nullptr;
    *out = p;
  });
}

void mt_parsed_release(mt_parsed* parsed) {
  if (!parsed) return;
  std::free(parsed->category);
  std::free(parsed->change_type);
  parsed->category = nullptr;
  parsed->change_type = nullptr;
}

// ---------------------------------------------------------------------------

mt_status mt_dataset_open(const char* config_path, mt_dataset** out) {
  return Guard([&] {
    Require(config_path && out, "invalid dataset arguments");
    auto ds = std::make_unique<mt_dataset>();
    ds->manifest = mt::LoadManifest(config_path);
    *out = ds.release();
  });
}

void mt_dataset_free(mt_dataset* dataset) { delete dataset; }

size_t mt_dataset_size(const mt_dataset* dataset) {
  return dataset ? dataset->manifest.entries.size() : 0;
}

const char* mt_dataset_entry_id(const mt_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->manifest.entries.size()) return nullptr;
  return dataset->manifest.entries[index].image_id.c_str();
}

void mt_dataset_set_seed(mt_dataset* dataset, uint64_t seed) {
  if (dataset) dataset->manifest.seed = seed;
}

mt_status mt_dataset_set_attrs(mt_dataset* dataset, unsigned attrs) {
  return Guard([&] {
    Require(dataset != nullptr, "dataset is NULL");
    dataset->manifest.attrs = Attrs(attrs);
  });
}

mt_status mt_dataset_build(const mt_dataset* dataset, const char* out_dir, int jobs,
                           int fail_fast, char** report) {
  return Guard([&] {
    Require(dataset && out_dir, "invalid build arguments");
    mt::BuildOptions opts;
    opts.jobs = std::max(jobs, 1);
    opts.fail_fast = fail_fast != 0;
    const mt::BuildReport r = mt::WriteMultimodalDataset(dataset->manifest, out_dir, opts);
    Emit(report, r.ToJson().dump(2));
  });
}

mt_status mt_dataset_record(const mt_dataset* dataset, const char* image_id, char** record) {
  return Guard([&] {
    Require(record != nullptr, "record is NULL");
    const mt::ManifestEntry& e = FindEntry(dataset, image_id);
    const mt::MultimodalRecord r = mt::BuildRecord(dataset->manifest, e);
    *record = Dup(mt::RecordToJson(dataset->manifest, e, r).dump());
  });
}

mt_status mt_dataset_stats(const mt_dataset* dataset, int jobs, char** stats) {
  return Guard([&] {
    Require(dataset && stats, "invalid stats arguments");
    *stats = Dup(mt::DatasetStats(dataset->manifest, std::max(jobs, 1)).dump(2));
  });
}

mt_status mt_dataset_overlay(const mt_dataset* dataset, const char* image_id,
                             const char* out_dir, char** path) {
  return Guard([&] {
    Require(out_dir != nullptr, "out_dir is NULL");
    const mt::ManifestEntry& e = FindEntry(dataset, image_id);
    Emit(path, mt::WriteOverlay(dataset->manifest, e, out_dir).string());
  });
}

mt_status mt_validate_dataset(const char* config_path, char** findings, size_t* n_findings) {
  return Guard([&] {
    Require(config_path != nullptr, "config path is NULL");
    const auto list = mt::ValidateDataset(config_path);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& f : list) {
      arr.push_back({{"image_id", f.image_id}, {"kind", f.kind}, {"message", f.message}});
    }
    if (n_findings) *n_findings = list.size();
    Emit(findings, arr.dump(2));
  });
}

// ---------------------------------------------------------------------------

mt_status mt_attention(mt_matrix q, mt_matrix k, mt_matrix v, double* out) {
  return Guard([&] {
    Require(out != nullptr, "output buffer is NULL");
    CopyOut(mn::Attention(ToTensor(q, "q"), ToTensor(k, "k"), ToTensor(v, "v")), out);
  });
}

mt_status mt_attention_backward(mt_matrix q, mt_matrix k, mt_matrix v, mt_matrix d_out,
                                double* d_q, double* d_k, double* d_v) {
  return Guard([&] {
    const auto tq = ToTensor(q, "q"), tk = ToTensor(k, "k"), tv = ToTensor(v, "v");
    const auto g = mn::AttentionBackward(tq, tk, tv, mn::AttentionWithWeights(tq, tk, tv),
                                         ToTensor(d_out, "d_out"));
    CopyOut(g.d_query, d_q);
    CopyOut(g.d_key, d_k);
    CopyOut(g.d_value, d_v);
  });
}

mt_status mt_fuse(mt_matrix visual, mt_matrix text, mt_matrix w_q, mt_matrix w_k,
                  mt_matrix w_v, mt_matrix bridge, double* out) {
  return Guard([&] {
    Require(out != nullptr, "output buffer is NULL");
    CopyOut(mn::Fuse(ToTensor(visual, "visual"), ToTensor(text, "text"),
                     FusionFromC(w_q, w_k, w_v, bridge)),
            out);
  });
}

mt_status mt_fuse_identity(mt_matrix visual, mt_matrix text, mt_matrix bridge, double* out) {
  return Guard([&] {
    Require(out != nullptr, "output buffer is NULL");
    CopyOut(mn::Fuse(ToTensor(visual, "visual"), ToTensor(text, "text"),
                     ToTensor(bridge, "bridge")),
            out);
  });
}

mt_status mt_fuse_backward(mt_matrix visual, mt_matrix text, mt_matrix w_q, mt_matrix w_k,
                           mt_matrix w_v, mt_matrix bridge, mt_matrix d_out, double* d_visual,
                           double* d_text, double* d_w_q, double* d_w_k, double* d_w_v,
                           double* d_bridge) {
  return Guard([&] {
    const auto tv = ToTensor(visual, "visual"), tt = ToTensor(text, "text");
    const auto w = FusionFromC(w_q, w_k, w_v, bridge);
    mn::Fuse(tv, tt, w);  // shape validation
    const auto g = mn::FuseBackward(tv, tt, w, ToTensor(d_out, "d_out"));
    CopyOut(g.d_visual, d_visual);
    CopyOut(g.d_text, d_text);
    CopyOut(g.d_query, d_w_q);
    CopyOut(g.d_key, d_w_k);
    CopyOut(g.d_value, d_w_v);
    CopyOut(g.d_bridge, d_bridge);
  });
}

void mt_loss_weights_default(mt_loss_weights* out) {
  if (!out) return;
  const mt::LossWeights w;
  *out = {w.alpha, w.beta, w.gamma, w.lambda, w.tau};
}

mt_status mt_focal_loss(mt_matrix p, const int* target, double gamma, const double* alpha,
                        double* loss, double* grad) {
  return Guard([&] {
    Require(loss != nullptr, "loss is NULL");
    mn::FocalParams params;
    params.gamma = gamma;
    if (alpha) params.alpha.assign(alpha, alpha + p.rows);
    const auto r = mn::FocalLossGrad(ToTensor(p, "p"), Targets(target, p), params);
    *loss = r.value;
    CopyOut(r.grad, grad);
  });
}

mt_status mt_dice_loss(mt_matrix p, const int* target, double epsilon, double* loss,
                       double* grad) {
  return Guard([&] {
    Require(loss != nullptr, "loss is NULL");
    const auto r = mn::DiceLossGrad(ToTensor(p, "p"), Targets(target, p), epsilon);
    *loss = r.value;
    CopyOut(r.grad, grad);
  });
}

mt_status mt_lovasz_loss(mt_matrix p, const int* target, double* loss, double* grad) {
  return Guard([&] {
    Require(loss != nullptr, "loss is NULL");
    const auto r = mn::LovaszLossGrad(ToTensor(p, "p"), Targets(target, p));
    *loss = r.value;
    CopyOut(r.grad, grad);
  });
}

mt_status mt_seg_loss_eval(mt_matrix p, const int* target, const mt_loss_weights* weights,
                           mt_seg_loss* out, double* grad) {
  return Guard([&] {
    Require(out != nullptr, "output is NULL");
    const auto tp = ToTensor(p, "p");
    const auto w = Weights(weights);
    const auto b = mn::SegLoss(tp, Targets(target, p), w);
    *out = {b.focal, b.dice, b.lovasz, b.total};
    if (grad) CopyOut(mn::SegLossGrad(tp, Targets(target, p), w).grad, grad);
  });
}

mt_status mt_similarity(mt_matrix visual, mt_matrix text, double tau, int normalize,
                        double* out) {
  return Guard([&] {
    Require(out != nullptr, "output buffer is NULL");
    CopyOut(mn::SimilarityMatrix(mt::EmbeddingBatch(ToTensor(visual, "visual")),
                                 mt::EmbeddingBatch(ToTensor(text, "text")), tau,
                                 normalize != 0),
            out);
  });
}

mt_status mt_contrastive_loss(mt_matrix s, mt_contrastive* out, double* grad) {
  return Guard([&] {
    Require(out != nullptr, "output is NULL");
    const auto ts = ToTensor(s, "s");
    const auto l = mn::ContrastiveLoss(ts);
    *out = {l.vision_to_text, l.text_to_vision, l.combined};
    if (grad) CopyOut(mn::ContrastiveLossGrad(ts), grad);
  });
}

mt_status mt_contrastive_embeddings(mt_matrix visual, mt_matrix text, double tau,
                                    int normalize, mt_contrastive* out, double* d_visual,
                                    double* d_text) {
  return Guard([&] {
    Require(out != nullptr, "output is NULL");
    const mt::EmbeddingBatch ev(ToTensor(visual, "visual"));
    const mt::EmbeddingBatch et(ToTensor(text, "text"));
    const auto s = mn::SimilarityMatrix(ev, et, tau, normalize != 0);
    const auto l = mn::ContrastiveLoss(s);
    *out = {l.vision_to_text, l.text_to_vision, l.combined};
    if (d_visual || d_text) {
      const auto g =
          mn::SimilarityBackward(ev, et, tau, normalize != 0, mn::ContrastiveLossGrad(s));
      CopyOut(g.d_visual, d_visual);
      CopyOut(g.d_text, d_text);
    }
  });
}

double mt_total_loss(double seg, double cot, const mt_loss_weights* weights) {
  mt::LossWeights w;
  if (weights) w.lambda = weights->lambda;
  return mn::TotalLoss(seg, cot, w);
}

mt_status mt_losscheck(const char* ops, int trials, double h, double tolerance, uint64_t seed,
                       int* passed, char** report) {
  return Guard([&] {
    mn::GradCheckOptions opts;
    if (ops) {
      std::stringstream ss(ops);
      std::string op;
      while (std::getline(ss, op, ',')) {
        op.erase(0, op.find_first_not_of(' '));
        op.erase(op.find_last_not_of(' ') + 1);
        if (!op.empty()) opts.ops.push_back(op);
      }
    }
    opts.trials = trials;
    opts.h = h;
    opts.tolerance = tolerance;
    opts.seed = seed;
    const auto r = mn::RunGradCheck(opts);
    if (passed) *passed = r.passed ? 1 : 0;
    Emit(report, r.ToJson().dump(2));
  });
}

// ---------------------------------------------------------------------------

mt_status mt_confusion_create(int n_classes, mt_confusion** out) {
  return Guard([&] {
    Require(out && n_classes >= 1 && n_classes < 65535, "invalid class count");
    *out = new mt_confusion{mt::ScdConfusion(n_classes)};
  });
}

void mt_confusion_free(mt_confusion* conf) { delete conf; }

int mt_confusion_classes(const mt_confusion* conf) { return conf ? conf->conf.n_classes() : 0; }

mt_status mt_confusion_accumulate(mt_confusion* conf, const uint16_t* pred, const uint16_t* gt,
                                  size_t n_pixels) {
  return Guard([&] {
    Require(conf && ((pred && gt) || n_pixels == 0), "invalid accumulate arguments");
    mt::Accumulate(std::span<const std::uint16_t>(pred, n_pixels),
                   std::span<const std::uint16_t>(gt, n_pixels), conf->conf);
  });
}

mt_status mt_confusion_add(mt_confusion* conf, int gt, int pred, uint64_t count) {
  return Guard([&] {
    RequireCell(conf, gt, pred);
    conf->conf.Add(gt, pred, count);
  });
}

mt_status mt_confusion_merge(mt_confusion* into, const mt_confusion* from) {
  return Guard([&] {
    Require(into && from, "confusion is NULL");
    into->conf.Merge(from->conf);
  });
}

mt_status mt_confusion_cell(const mt_confusion* conf, int gt, int pred, uint64_t* out) {
  return Guard([&] {
    RequireCell(conf, gt, pred);
    Require(out != nullptr, "output is NULL");
    *out = conf->conf.at(gt, pred);
  });
}

uint64_t mt_confusion_total(const mt_confusion* conf) { return conf ? conf->conf.total() : 0; }

mt_status mt_binary_metrics_compute(const mt_confusion* conf, mt_binary_metrics* out) {
  return Guard([&] {
    Require(conf && out, "invalid metrics arguments");
    const auto m = mt::ComputeBinaryMetrics(conf->conf);
    *out = {m.f1, m.iou, m.oa, m.precision, m.recall};
  });
}

mt_status mt_scd_metrics_compute(const mt_confusion* conf, int micro, mt_scd_metrics* out) {
  return Guard([&] {
    Require(conf && out, "invalid metrics arguments");
    const auto m = mt::ComputeScdMetrics(
        conf->conf, micro ? mt::PrfAveraging::kMicro : mt::PrfAveraging::kMacro);
    *out = {m.sek, m.f_scd, m.miou, m.precision, m.recall, m.mf1, m.oa};
  });
}

mt_status mt_metrics_json(const mt_confusion* conf, int bcd, int micro, char** json) {
  return Guard([&] {
    Require(conf && json, "invalid metrics arguments");
    nlohmann::ordered_json out;
    if (bcd) {
      out = mt::BinaryMetricsToJson(mt::ComputeBinaryMetrics(conf->conf));
    } else {
      out = mt::ScdMetricsToJson(mt::ComputeScdMetrics(
          conf->conf, micro ? mt::PrfAveraging::kMicro : mt::PrfAveraging::kMacro));
      out["averaging"] = micro ? "micro" : "macro";
    }
    *json = Dup(out.dump(2));
  });
}

mt_status mt_eval_dirs(const char* pred_dir, const char* gt_dir, int bcd, int n_classes,
                       int jobs, mt_confusion** out, size_t* images) {
  return Guard([&] {
    Require(pred_dir && gt_dir && out, "invalid eval arguments");
    mt::EvalOptions opts;
    opts.mode = bcd ? mt::EvalMode::kBcd : mt::EvalMode::kScd;
    opts.n_classes = n_classes;
    opts.jobs = std::max(jobs, 1);
    mt::EvalResult r = mt::EvaluateDirectories(pred_dir, gt_dir, opts);
    if (images) *images = r.images;
    *out = new mt_confusion{std::move(r.confusion)};
  });
}

}  // extern "C"
