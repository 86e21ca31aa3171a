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

// masktext: mask-to-text dataset builder and numeric checks.
//
//   masktext transcribe data.ini --out out/ [--seed N] [--attrs type,category]
//   masktext validate data.ini
//   masktext stats data.ini
//   masktext overlay data.ini --ids a,b --out overlays/
//   masktext losscheck [--ops contrastive] [--trials 20] [--tolerance 1e-4]
//   masktext eval --pred p/ --gt g/ --classes 6 [--mode scd|bcd]
//
// Exit codes: 0 success, 1 usage or config error, 2 data or check failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "masktext/masktext.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

using Json = nlohmann::ordered_json;

struct DatasetDeleter {
  void operator()(mt_dataset* d) const { mt_dataset_free(d); }
};
struct ConfusionDeleter {
  void operator()(mt_confusion* c) const { mt_confusion_free(c); }
};
using DatasetPtr = std::unique_ptr<mt_dataset, DatasetDeleter>;
using ConfusionPtr = std::unique_ptr<mt_confusion, ConfusionDeleter>;

// Takes ownership of a library string.
std::string Take(char* s) {
  std::string out = s ? s : "";
  mt_string_free(s);
  return out;
}

void Report(mt_status status, const std::string& what) {
  std::cerr << "masktext: " << what << ": " << mt_status_name(status) << ": "
            << mt_last_error() << "\n";
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct DatasetFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> attrs;
  int jobs = 1;
};

// Loads the manifest and applies flag overrides. Returns null after printing
// a diagnostic.
DatasetPtr OpenDataset(const DatasetFlags& flags) {
  mt_dataset* raw = nullptr;
  if (mt_status st = mt_dataset_open(flags.config.c_str(), &raw); st != MT_OK) {
    Report(st, "cannot load " + flags.config);
    return nullptr;
  }
  DatasetPtr ds(raw);
  if (flags.seed) mt_dataset_set_seed(ds.get(), *flags.seed);
  if (flags.attrs) {
    unsigned bits = 0;
    if (mt_status st = mt_attrs_parse(flags.attrs->c_str(), &bits); st != MT_OK) {
      Report(st, "--attrs");
      return nullptr;
    }
    mt_dataset_set_attrs(ds.get(), bits);
  }
  return ds;
}

int RunTranscribe(const DatasetFlags& flags, const std::string& out_dir, bool fail_fast) {
  DatasetPtr ds = OpenDataset(flags);
  if (!ds) return kExitUsage;
  const auto t0 = std::chrono::steady_clock::now();
  char* report_raw = nullptr;
  if (mt_status st = mt_dataset_build(ds.get(), out_dir.c_str(), flags.jobs, fail_fast ? 1 : 0,
                                      &report_raw);
      st != MT_OK) {
    Report(st, "transcribe");
    return kExitData;
  }
  const Json report = Json::parse(Take(report_raw));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "masktext: wrote " << report["written"].get<std::size_t>() << " of "
            << report["entries"].get<std::size_t>() << " records to " << out_dir << " in "
            << secs << " s\n";
  for (const auto& e : report["errors"]) {
    std::cerr << "masktext: " << e["image_id"].get<std::string>() << ": "
              << e["error"].get<std::string>() << ": " << e["message"].get<std::string>()
              << "\n";
  }
  std::cout << report.dump(2) << "\n";
  if (fail_fast && !report["errors"].empty()) return kExitData;
  return kExitOk;
}

int RunValidate(const std::string& config) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(config, ec)) {
    std::cerr << "masktext: config file not found: " << config << "\n";
    return kExitUsage;
  }
  char* raw = nullptr;
  std::size_t n = 0;
  if (mt_status st = mt_validate_dataset(config.c_str(), &raw, &n); st != MT_OK) {
    Report(st, "validate");
    return kExitUsage;
  }
  const Json findings = Json::parse(Take(raw));
  for (const auto& f : findings) {
    const std::string id = f["image_id"].get<std::string>();
    std::cerr << "masktext: " << (id.empty() ? std::string("<dataset>") : id) << ": "
              << f["kind"].get<std::string>() << ": " << f["message"].get<std::string>()
              << "\n";
  }
  std::cout << findings.dump(2) << "\n";
  std::cerr << "masktext: " << n << " finding(s)\n";
  return n == 0 ? kExitOk : kExitData;
}

int RunStats(const DatasetFlags& flags) {
  DatasetPtr ds = OpenDataset(flags);
  if (!ds) return kExitUsage;
  char* raw = nullptr;
  if (mt_status st = mt_dataset_stats(ds.get(), flags.jobs, &raw); st != MT_OK) {
    Report(st, "stats");
    return kExitData;
  }
  const Json stats = Json::parse(Take(raw));
  std::cout << stats.dump(2) << "\n";
  return stats.contains("errors") && !stats["errors"].empty() ? kExitData : kExitOk;
}

int RunOverlay(const DatasetFlags& flags, const std::string& ids, const std::string& out_dir) {
  DatasetPtr ds = OpenDataset(flags);
  if (!ds) return kExitUsage;
  std::vector<std::string> wanted = SplitList(ids);
  if (wanted.empty()) {
    for (std::size_t i = 0; i < mt_dataset_size(ds.get()); ++i) {
      wanted.emplace_back(mt_dataset_entry_id(ds.get(), i));
    }
  }
  Json written = Json::array();
  int status = kExitOk;
  for (const auto& id : wanted) {
    char* path = nullptr;
    if (mt_status st = mt_dataset_overlay(ds.get(), id.c_str(), out_dir.c_str(), &path);
        st != MT_OK) {
      Report(st, "overlay " + id);
      status = st == MT_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
      continue;
    }
    written.push_back(Take(path));
  }
  std::cout << written.dump(2) << "\n";
  return status;
}

int RunLosscheck(const std::string& ops, int trials, double h, double tolerance,
                 std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  int passed = 0;
  char* raw = nullptr;
  if (mt_status st = mt_losscheck(ops.empty() ? nullptr : ops.c_str(), trials, h, tolerance,
                                  seed, &passed, &raw);
      st != MT_OK) {
    Report(st, "losscheck");
    return st == MT_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  }
  const Json report = Json::parse(Take(raw));
  for (const auto& op : report["ops"]) {
    std::fprintf(stderr, "masktext: %-12s %-4s max rel err %.3e  cases %d  skips %d\n",
                 op["op"].get<std::string>().c_str(), op["passed"].get<bool>() ? "ok" : "FAIL",
                 op["max_rel_error"].get<double>(), op["cases"].get<int>(),
                 op["subgradient_skips"].get<int>());
  }
  std::fprintf(stderr, "masktext: losscheck finished in %.2f s\n",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::cout << report.dump(2) << "\n";
  return passed ? kExitOk : kExitData;
}

void PrintTable(const std::vector<std::pair<std::string, double>>& cols) {
  std::string header, rule, row;
  for (const auto& [name, value] : cols) {
    char cell[32];
    std::snprintf(cell, sizeof(cell), "%8.2f", value * 100.0);
    char head[32];
    std::snprintf(head, sizeof(head), "%8s", name.c_str());
    header += " | " + std::string(head);
    rule += "-|-" + std::string(8, '-');
    row += " | " + std::string(cell);
  }
  std::cerr << header.substr(1) << " |\n" << rule.substr(1) << "-|\n" << row.substr(1) << " |\n";
}

int RunEval(const std::string& pred, const std::string& gt, int classes,
            const std::string& mode, const std::string& averaging, int jobs) {
  const bool bcd = mode == "bcd";
  const bool micro = averaging == "micro";
  if (!bcd && classes < 1) {
    std::cerr << "masktext: --classes is required in scd mode\n";
    return kExitUsage;
  }
  mt_confusion* raw = nullptr;
  std::size_t images = 0;
  if (mt_status st = mt_eval_dirs(pred.c_str(), gt.c_str(), bcd ? 1 : 0, classes, jobs, &raw,
                                  &images);
      st != MT_OK) {
    Report(st, "eval");
    return st == MT_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  }
  ConfusionPtr conf(raw);
  char* metrics_raw = nullptr;
  if (mt_status st = mt_metrics_json(conf.get(), bcd ? 1 : 0, micro ? 1 : 0, &metrics_raw);
      st != MT_OK) {
    Report(st, "eval");
    return kExitData;
  }
  Json metrics = Json::parse(Take(metrics_raw));

  Json out;
  out["mode"] = mode;
  out["images"] = images;
  out["pixels"] = mt_confusion_total(conf.get());
  out["metrics"] = metrics;
  const int dim = mt_confusion_classes(conf.get()) + 1;
  Json rows = Json::array();
  for (int g = 0; g < dim; ++g) {
    Json row = Json::array();
    for (int p = 0; p < dim; ++p) {
      std::uint64_t v = 0;
      mt_confusion_cell(conf.get(), g, p, &v);
      row.push_back(v);
    }
    rows.push_back(row);
  }
  out["confusion"] = rows;
  std::cout << out.dump(2) << "\n";

  if (bcd) {
    PrintTable({{"F1", metrics["f1"]},
                {"IoU", metrics["iou"]},
                {"OA", metrics["oa"]},
                {"Pre.", metrics["precision"]},
                {"Rec.", metrics["recall"]}});
  } else {
    PrintTable({{"Sek", metrics["sek"]},
                {"F_scd", metrics["f_scd"]},
                {"mIoU", metrics["miou"]},
                {"Pre.", metrics["precision"]},
                {"Rec.", metrics["recall"]},
                {"mF1", metrics["mf1"]}});
  }
  return kExitOk;
}

void AddDatasetFlags(CLI::App* cmd, DatasetFlags& flags, bool with_render_flags) {
  cmd->add_option("config", flags.config, "dataset config file")->required();
  cmd->add_option("--jobs,-j", flags.jobs, "worker threads")->check(CLI::Range(1, 256));
  if (with_render_flags) {
    cmd->add_option("--seed", flags.seed, "template-selection seed (default: config, else 0)");
    cmd->add_option("--attrs", flags.attrs,
                    "attributes to render: all, none, or a list of "
                    "quantity,type,category,location");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Turns change-detection masks into structured text and checks the numerics"};
  app.set_version_flag("--version", std::string(mt_version()));
  app.require_subcommand(1);

  DatasetFlags flags;
  std::string out_dir = ".";
  bool fail_fast = false;
  auto* transcribe = app.add_subcommand("transcribe", "write <split>.mm.jsonl and a report");
  AddDatasetFlags(transcribe, flags, true);
  transcribe->add_option("--out,-o", out_dir, "output directory");
  transcribe->add_flag("--fail-fast", fail_fast, "stop at the first failing entry");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "check the manifest and every mask");
  validate->add_option("config", validate_config, "dataset config file")->required();

  auto* stats = app.add_subcommand("stats", "histograms and connected-component summaries");
  AddDatasetFlags(stats, flags, false);

  std::string ids;
  std::string overlay_dir = "overlays";
  auto* overlay = app.add_subcommand("overlay", "render pre/post/mask QA panels");
  AddDatasetFlags(overlay, flags, true);
  overlay->add_option("--ids", ids, "comma list of image ids (default: all)");
  overlay->add_option("--out,-o", overlay_dir, "output directory");

  std::string ops;
  int trials = 20;
  double h = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t check_seed = 0;
  auto* losscheck = app.add_subcommand("losscheck", "finite-difference gradient checks");
  losscheck->add_option("--ops", ops,
                        "comma list of attention,fuse,focal,dice,lovasz,seg,contrastive,total");
  losscheck->add_option("--trials", trials, "random instances per op")
      ->check(CLI::Range(1, 100000));
  losscheck->add_option("--step", h, "central-difference step h")->check(CLI::PositiveNumber);
  losscheck->add_option("--tolerance", tolerance, "max relative error");
  losscheck->add_option("--seed", check_seed, "instance seed");

  std::string pred_dir, gt_dir, mode = "scd", averaging = "macro";
  int classes = 0;
  int eval_jobs = 1;
  auto* eval = app.add_subcommand("eval", "score prediction label maps against ground truth");
  eval->add_option("--pred", pred_dir, "directory of predicted PNG label maps")->required();
  eval->add_option("--gt", gt_dir, "directory of ground-truth PNG label maps")->required();
  eval->add_option("--classes", classes, "semantic classes, excluding no-change");
  eval->add_option("--mode", mode, "scd or bcd")->check(CLI::IsMember({"scd", "bcd"}));
  eval->add_option("--averaging", averaging, "Pre/Rec/mF1 averaging: macro or micro")
      ->check(CLI::IsMember({"macro", "micro"}));
  eval->add_option("--jobs,-j", eval_jobs, "worker threads")->check(CLI::Range(1, 256));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*transcribe) return RunTranscribe(flags, out_dir, fail_fast);
  if (*validate) return RunValidate(validate_config);
  if (*stats) return RunStats(flags);
  if (*overlay) return RunOverlay(flags, ids, overlay_dir);
  if (*losscheck) return RunLosscheck(ops, trials, h, tolerance, check_seed);
  if (*eval) return RunEval(pred_dir, gt_dir, classes, mode, averaging, eval_jobs);
  return kExitUsage;
}
