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

#include "support/oracles.hpp"

#include <cmath>

namespace masktext::testing {

std::string OracleQuantity(std::uint64_t n) {
  if (n >= 8000) return "multiple";
  if (n >= 4000) return "several";
  if (n >= 800) return "a few";
  return "a single";
}

namespace {

// 0 = first third, 1 = middle, 2 = last, comparing 3 * sum against extent * n
// so no division is involved.
int Band(std::uint64_t sum, std::uint64_t n, std::uint64_t extent) {
  const std::uint64_t lhs = 3 * sum;
  if (lhs < extent * n) return 0;
  if (lhs < 2 * extent * n) return 1;
  return 2;
}

}  // namespace

std::vector<OracleQuadruple> OracleTranscribe(int width, int height,
                                              const std::vector<std::uint16_t>& labels,
                                              int max_class) {
  std::vector<OracleQuadruple> out;
  for (int c = 1; c <= max_class; ++c) {
    std::uint64_t n = 0, sx = 0, sy = 0;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (labels[static_cast<std::size_t>(y) * width + x] == c) {
          ++n;
          sx += x;
          sy += y;
        }
      }
    }
    if (n == 0) continue;
    static const char* kGrid[3][3] = {
        {"northwest", "north", "northeast"},
        {"west", "center", "east"},
        {"southwest", "south", "southeast"},
    };
    OracleQuadruple q;
    q.class_index = c;
    q.count = n;
    q.location = kGrid[Band(sy, n, height)][Band(sx, n, width)];
    q.quantity = OracleQuantity(n);
    out.push_back(q);
  }
  return out;
}

namespace {

double Div(double a, double b) { return b == 0 ? 0 : a / b; }

double HarmonicMean(double a, double b) {
  if (a == 0 || b == 0) return 0;
  return 2 / (1 / a + 1 / b);
}

double CohenKappa(const std::vector<double>& m, int d) {
  double total = 0, diag = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) total += m[i * d + j];
    diag += m[i * d + i];
  }
  if (total == 0) return 0;
  double pe = 0;
  for (int i = 0; i < d; ++i) {
    double row = 0, col = 0;
    for (int j = 0; j < d; ++j) {
      row += m[i * d + j];
      col += m[j * d + i];
    }
    pe += (row / total) * (col / total);
  }
  if (pe == 1) return 0;
  return (diag / total - pe) / (1 - pe);
}

}  // namespace

OracleScd OracleScdMetrics(const std::vector<std::uint64_t>& cells, int n) {
  const int d = n + 1;
  std::vector<double> h(cells.begin(), cells.end());
  auto at = [&](int g, int p) { return h[g * d + p]; };

  double total = 0, diag = 0, gt_nc_row = 0, pred_nc_col = 0;
  for (int g = 0; g < d; ++g) {
    for (int p = 0; p < d; ++p) total += at(g, p);
    diag += at(g, g);
    gt_nc_row += at(0, g);
    pred_nc_col += at(g, 0);
  }
  // 2x2 change / no-change table.
  const double tn = at(0, 0);
  const double fp = gt_nc_row - tn;
  const double fn = pred_nc_col - tn;
  const double tp = total - tn - fp - fn;
  const double iou_nc = (tn + fp + fn) == 0 ? 1 : tn / (tn + fp + fn);
  const double iou_c = (tp + fp + fn) == 0 ? 1 : tp / (tp + fp + fn);

  OracleScd r{};
  r.miou = (iou_nc + iou_c) / 2;
  std::vector<double> n0 = h;
  n0[0] = 0;
  const double kappa_n0 = CohenKappa(n0, d);
  r.sek = (fp + fn + tp) == 0 ? 0 : kappa_n0 * std::exp(iou_c) / std::exp(1.0);

  double sc_tp = 0;
  for (int c = 1; c < d; ++c) sc_tp += at(c, c);
  const double change_pred = total - pred_nc_col;  // column 0 excluded
  const double change_gt = total - gt_nc_row;      // row 0 excluded
  const double sc_p = Div(sc_tp, change_pred);
  const double sc_r = Div(sc_tp, change_gt);
  r.f_scd = (change_pred == 0 && change_gt == 0) ? 1 : HarmonicMean(sc_p, sc_r);
  r.oa = diag / total;

  double sp = 0, sr = 0, sf = 0;
  int present = 0;
  for (int c = 1; c < d; ++c) {
    double row = 0, col = 0;
    for (int k = 0; k < d; ++k) {
      row += at(c, k);
      col += at(k, c);
    }
    if (row == 0 && col == 0) continue;
    const double p = Div(at(c, c), col);
    const double rc = Div(at(c, c), row);
    sp += p;
    sr += rc;
    sf += HarmonicMean(p, rc);
    ++present;
  }
  r.pre = present ? sp / present : 0;
  r.rec = present ? sr / present : 0;
  r.mf1 = present ? sf / present : 0;
  r.pre_micro = sc_p;
  r.rec_micro = sc_r;
  r.mf1_micro = HarmonicMean(sc_p, sc_r);
  return r;
}

}  // namespace masktext::testing
