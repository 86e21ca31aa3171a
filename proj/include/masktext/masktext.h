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

/* C interface of libmasktext.
 *
 * Every fallible call returns an mt_status. On failure a message describing
 * the error is available from mt_last_error() on the calling thread until the
 * next failing call on that thread. Strings returned through char** are
 * heap-allocated and must be released with mt_string_free. Matrices are
 * row-major doubles; output buffers are caller-allocated with the sizes
 * given in each comment. Handles are not synchronized: share them across
 * threads only for read-only calls. */

#ifndef MASKTEXT_MASKTEXT_H_
#define MASKTEXT_MASKTEXT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MT_API __declspec(dllexport)
#else
#define MT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mt_status {
  MT_OK = 0,
  MT_ERR_INVALID_ARGUMENT = 1,
  MT_ERR_CONFIG = 2,
  MT_ERR_MISSING_FILE = 3,
  MT_ERR_PALETTE_GAP = 4,
  MT_ERR_DECODE = 5,
  MT_ERR_EMPTY_MASK = 6,
  MT_ERR_SHAPE_MISMATCH = 7,
  MT_ERR_CLASS_OUT_OF_RANGE = 8,
  MT_ERR_PARSE_FAILURE = 9,
  MT_ERR_NON_POSITIVE_TAU = 10,
  MT_ERR_NON_FINITE_GRADIENT = 11,
  MT_ERR_EMPTY_CONFUSION = 12,
  MT_ERR_IO = 13,
  MT_ERR_DEGENERATE = 14,
  MT_ERR_INTERNAL = 15
} mt_status;

MT_API const char* mt_version(void);
/* "Ok", "ShapeMismatch", ... */
MT_API const char* mt_status_name(mt_status status);
MT_API const char* mt_last_error(void);
MT_API void mt_string_free(char* s);

/* ------------------------------------------------------------------------ */
/* Transcription */

/* Enum values match the order below. */
typedef enum mt_direction {
  MT_NORTH = 0, MT_SOUTH, MT_EAST, MT_WEST, MT_CENTER,
  MT_NORTHEAST, MT_NORTHWEST, MT_SOUTHEAST, MT_SOUTHWEST
} mt_direction;

typedef enum mt_quantity {
  MT_A_SINGLE = 0, MT_A_FEW, MT_SEVERAL, MT_MULTIPLE
} mt_quantity;

MT_API const char* mt_direction_name(int direction);
MT_API const char* mt_quantity_name(int quantity);

typedef struct mt_thresholds {
  uint64_t t1, t2, t3;
} mt_thresholds;

/* 800 / 4000 / 8000 */
MT_API void mt_thresholds_default(mt_thresholds* out);

typedef struct mt_class_entry {
  uint16_t class_index;
  const char* category;
  const char* change_type;
} mt_class_entry;

typedef struct mt_quadruple {
  int location;   /* mt_direction */
  int quantity;   /* mt_quantity */
  const char* category;
  const char* change_type;
  uint64_t pixel_count;
  double centroid_x;
  double centroid_y;
  uint16_t class_index;
} mt_quadruple;

typedef struct mt_quadruple_list mt_quadruple_list;

/* bits: width*height bytes, non-zero = foreground. MT_ERR_EMPTY_MASK when no
 * pixel is set. */
MT_API mt_status mt_centroid(const uint8_t* bits, int width, int height,
                             double* cx, double* cy);
MT_API mt_status mt_classify_direction(double cx, double cy, int width, int height,
                                       int* direction);
/* thresholds may be NULL for the defaults. */
MT_API mt_status mt_classify_quantity(uint64_t pixel_count, const mt_thresholds* thresholds,
                                      int* quantity);

/* labels: width*height class indices, 0 = no change. classes describes every
 * non-zero label. One quadruple per non-empty class, in table order. */
MT_API mt_status mt_transcribe(const uint16_t* labels, int width, int height,
                               const mt_class_entry* classes, size_t n_classes,
                               const mt_thresholds* thresholds, mt_quadruple_list** out);
MT_API size_t mt_quadruple_list_size(const mt_quadruple_list* list);
/* String fields stay valid until the list is freed. */
MT_API mt_status mt_quadruple_list_get(const mt_quadruple_list* list, size_t index,
                                       mt_quadruple* out);
MT_API void mt_quadruple_list_free(mt_quadruple_list* list);

/* ------------------------------------------------------------------------ */
/* Templates */

enum {
  MT_ATTR_QUANTITY = 1,
  MT_ATTR_TYPE = 2,
  MT_ATTR_CATEGORY = 4,
  MT_ATTR_LOCATION = 8,
  MT_ATTR_ALL = 15
};

/* "all", "none" or a comma list such as "type,category". */
MT_API mt_status mt_attrs_parse(const char* list, unsigned* attrs);

/* 1..5 */
MT_API int mt_select_template(uint64_t seed, const char* image_id, uint64_t class_index);

MT_API mt_status mt_render(const mt_quadruple* quadruple, int template_id, unsigned attrs,
                           char** sentence);

/* Sentences for every quadruple joined by single spaces, or the no-change
 * sentence for an empty list. */
MT_API mt_status mt_describe(const mt_quadruple_list* list, const char* image_id,
                             uint64_t seed, unsigned attrs, char** text);

typedef struct mt_parsed {
  int template_id;
  int no_change;
  unsigned attrs;     /* fields present in the sentence */
  int quantity;       /* -1 when absent */
  int location;       /* -1 when absent */
  char* category;     /* NULL when absent */
  char* change_type;  /* NULL when absent */
} mt_parsed;

/* MT_ERR_PARSE_FAILURE when the sentence matches no template. */
MT_API mt_status mt_parse(const char* sentence, mt_parsed* out);
MT_API void mt_parsed_release(mt_parsed* parsed);

/* ------------------------------------------------------------------------ */
/* Datasets */

typedef struct mt_dataset mt_dataset;

/* Loads and validates the manifest, checking files and scanning masks for
 * palette gaps. */
MT_API mt_status mt_dataset_open(const char* config_path, mt_dataset** out);
MT_API void mt_dataset_free(mt_dataset* dataset);
MT_API size_t mt_dataset_size(const mt_dataset* dataset);
/* Pointer valid while the dataset lives. */
MT_API const char* mt_dataset_entry_id(const mt_dataset* dataset, size_t index);
MT_API void mt_dataset_set_seed(mt_dataset* dataset, uint64_t seed);
MT_API mt_status mt_dataset_set_attrs(mt_dataset* dataset, unsigned attrs);

/* Writes <split>.mm.jsonl and <split>.report.json under out_dir. Per-entry
 * failures are listed in the report and do not fail the call. report may be
 * NULL. */
MT_API mt_status mt_dataset_build(const mt_dataset* dataset, const char* out_dir, int jobs,
                                  int fail_fast, char** report);
/* One JSONL record without the trailing newline. */
MT_API mt_status mt_dataset_record(const mt_dataset* dataset, const char* image_id,
                                   char** record);
MT_API mt_status mt_dataset_stats(const mt_dataset* dataset, int jobs, char** stats);
/* Writes <out_dir>/<image_id>.png. path may be NULL. */
MT_API mt_status mt_dataset_overlay(const mt_dataset* dataset, const char* image_id,
                                    const char* out_dir, char** path);

/* JSON array of {image_id, kind, message}; empty iff the dataset is clean. */
MT_API mt_status mt_validate_dataset(const char* config_path, char** findings,
                                     size_t* n_findings);

/* ------------------------------------------------------------------------ */
/* Numerics */

typedef struct mt_matrix {
  const double* data;
  size_t rows;
  size_t cols;
} mt_matrix;

/* out: q.rows x v.cols */
MT_API mt_status mt_attention(mt_matrix q, mt_matrix k, mt_matrix v, double* out);
/* Gradient buffers are shaped like their inputs; any may be NULL. */
MT_API mt_status mt_attention_backward(mt_matrix q, mt_matrix k, mt_matrix v,
                                       mt_matrix d_out, double* d_q, double* d_k,
                                       double* d_v);

/* visual n x d, text m x d_t, w_q d x d_k, w_k d_t x d_k, w_v d_t x d_v,
 * bridge d_v x d. out: n x d_v. */
MT_API mt_status mt_fuse(mt_matrix visual, mt_matrix text, mt_matrix w_q, mt_matrix w_k,
                         mt_matrix w_v, mt_matrix bridge, double* out);
/* Identity projections; requires d == d_t. */
MT_API mt_status mt_fuse_identity(mt_matrix visual, mt_matrix text, mt_matrix bridge,
                                  double* out);
MT_API mt_status mt_fuse_backward(mt_matrix visual, mt_matrix text, mt_matrix w_q,
                                  mt_matrix w_k, mt_matrix w_v, mt_matrix bridge,
                                  mt_matrix d_out, double* d_visual, double* d_text,
                                  double* d_w_q, double* d_w_k, double* d_w_v,
                                  double* d_bridge);

typedef struct mt_loss_weights {
  double alpha, beta, gamma, lambda, tau;
} mt_loss_weights;

/* 0.4 / 0.3 / 0.3 / 0.5 / 0.7 */
MT_API void mt_loss_weights_default(mt_loss_weights* out);

/* p: classes x pixels probabilities; target: one class per pixel. grad, when
 * not NULL, receives d loss / d p (classes x pixels). alpha may be NULL for
 * unit class weights. */
MT_API mt_status mt_focal_loss(mt_matrix p, const int* target, double gamma,
                               const double* alpha, double* loss, double* grad);
MT_API mt_status mt_dice_loss(mt_matrix p, const int* target, double epsilon, double* loss,
                              double* grad);
MT_API mt_status mt_lovasz_loss(mt_matrix p, const int* target, double* loss, double* grad);

typedef struct mt_seg_loss {
  double focal, dice, lovasz, total;
} mt_seg_loss;

/* weights may be NULL for the defaults; focal gamma 2, dice epsilon 1e-6. */
MT_API mt_status mt_seg_loss_eval(mt_matrix p, const int* target,
                                  const mt_loss_weights* weights, mt_seg_loss* out,
                                  double* grad);

/* out: B x B */
MT_API mt_status mt_similarity(mt_matrix visual, mt_matrix text, double tau, int normalize,
                               double* out);

typedef struct mt_contrastive {
  double vision_to_text, text_to_vision, combined;
} mt_contrastive;

/* grad, when not NULL, receives d combined / d S. */
MT_API mt_status mt_contrastive_loss(mt_matrix s, mt_contrastive* out, double* grad);
/* Contrastive loss of two embedding batches, with gradients shaped like the
 * inputs (either may be NULL). */
MT_API mt_status mt_contrastive_embeddings(mt_matrix visual, mt_matrix text, double tau,
                                           int normalize, mt_contrastive* out,
                                           double* d_visual, double* d_text);

/* seg + lambda * cot; weights may be NULL. */
MT_API double mt_total_loss(double seg, double cot, const mt_loss_weights* weights);

/* Finite-difference gradient checks. ops: comma list or NULL for all.
 * passed is set to 1 iff every op stays below the tolerance. */
MT_API mt_status mt_losscheck(const char* ops, int trials, double h, double tolerance,
                              uint64_t seed, int* passed, char** report);

/* ------------------------------------------------------------------------ */
/* Metrics */

typedef struct mt_confusion mt_confusion;

MT_API mt_status mt_confusion_create(int n_classes, mt_confusion** out);
MT_API void mt_confusion_free(mt_confusion* conf);
MT_API int mt_confusion_classes(const mt_confusion* conf);
/* pred, gt: n_pixels labels each. Nothing is counted when the call fails. */
MT_API mt_status mt_confusion_accumulate(mt_confusion* conf, const uint16_t* pred,
                                         const uint16_t* gt, size_t n_pixels);
MT_API mt_status mt_confusion_add(mt_confusion* conf, int gt, int pred, uint64_t count);
MT_API mt_status mt_confusion_merge(mt_confusion* into, const mt_confusion* from);
MT_API mt_status mt_confusion_cell(const mt_confusion* conf, int gt, int pred,
                                   uint64_t* out);
MT_API uint64_t mt_confusion_total(const mt_confusion* conf);

typedef struct mt_binary_metrics {
  double f1, iou, oa, precision, recall;
} mt_binary_metrics;

typedef struct mt_scd_metrics {
  double sek, f_scd, miou, precision, recall, mf1, oa;
} mt_scd_metrics;

MT_API mt_status mt_binary_metrics_compute(const mt_confusion* conf, mt_binary_metrics* out);
/* micro: 0 averages Pre / Rec / mF1 over present classes, 1 pools changed
 * pixels. */
MT_API mt_status mt_scd_metrics_compute(const mt_confusion* conf, int micro,
                                        mt_scd_metrics* out);
/* Full metric JSON for the confusion. bcd: 1 for binary metrics. */
MT_API mt_status mt_metrics_json(const mt_confusion* conf, int bcd, int micro, char** json);

/* Accumulates every PNG in gt_dir against the same file name in pred_dir.
 * bcd: 1 treats any non-zero value as change and ignores n_classes. */
MT_API mt_status mt_eval_dirs(const char* pred_dir, const char* gt_dir, int bcd,
                              int n_classes, int jobs, mt_confusion** out, size_t* images);

#ifdef __cplusplus
}
#endif

#endif  /* MASKTEXT_MASKTEXT_H_ */
