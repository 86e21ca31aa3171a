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

#ifndef MASKTEXT_CORE_DATASET_IO_HPP_
#define MASKTEXT_CORE_DATASET_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/core_types.hpp"
#include "core/errors.hpp"
#include "core/png_io.hpp"
#include "core/template_engine.hpp"
#include "core/transcriber.hpp"

namespace masktext {

using Rgb = std::array<std::uint8_t, 3>;

struct PaletteEntry {
  std::uint16_t class_index = 0;
  std::uint32_t pixel_value = 0;  // index encoding
  Rgb color{};                    // rgb encoding
  std::string category;
  std::string change_type;
};

// Maps raw mask samples to class indices. With index encoding the sample value
// is the class index; with rgb encoding classes are numbered 1.. in palette
// order and black is no-change.
class Palette {
 public:
  enum class Encoding { kIndex, kRgb };

  Palette() = default;
  Palette(Encoding encoding, std::vector<PaletteEntry> entries);

  Encoding encoding() const { return encoding_; }
  const std::vector<PaletteEntry>& entries() const { return entries_; }
  std::vector<ClassEntry> ClassTable() const;

  // Throws PaletteGap for unmapped samples and DecodeError when the image
  // layout does not fit the encoding.
  ChangeMask Apply(const RawImage& image, const std::string& where) const;

 private:
  Encoding encoding_ = Encoding::kIndex;
  std::vector<PaletteEntry> entries_;
  std::vector<std::int32_t> index_lookup_;      // sample -> class, -1 unmapped
  std::map<std::uint32_t, std::uint16_t> rgb_lookup_;
};

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path pre_image;
  std::filesystem::path post_image;
  std::filesystem::path mask;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::string split = "train";
  std::vector<ManifestEntry> entries;
  Palette palette;
  QuantityThresholds thresholds;
  AttributeSelection attrs;
  std::uint64_t seed = 0;
  Connectivity connectivity = Connectivity::kFour;
  TemplateSet templates = TemplateSet::Default();

  const ManifestEntry* Find(const std::string& image_id) const;
  std::string Relative(const std::filesystem::path& p) const;
};

struct LoadOptions {
  bool check_files = true;
  // Masks scanned for values missing from the palette: -1 none, 0 all, N an
  // evenly spaced sample of N.
  long palette_scan = 32;
};

// Throws ConfigError, MissingFile or PaletteGap.
DatasetManifest LoadManifest(const std::filesystem::path& config_path,
                             const LoadOptions& options = {});

// Throws MissingFile, DecodeError, PaletteGap.
ChangeMask ReadMask(const std::filesystem::path& path, const Palette& palette);

struct MultimodalRecord {
  std::string image_id;
  std::string description;
  std::vector<TextDescription> sentences;
  std::vector<SemanticQuadruple> quadruples;
  int width = 0;
  int height = 0;
  std::uint64_t changed_pixels = 0;
};

MultimodalRecord BuildRecord(const DatasetManifest& manifest,
                             const ManifestEntry& entry);
MultimodalRecord BuildRecord(const DatasetManifest& manifest,
                             const ManifestEntry& entry,
                             const ChangeMask& mask);

// Fixed key order; see docs/record.schema.json.
nlohmann::ordered_json RecordToJson(const DatasetManifest& manifest,
                                    const ManifestEntry& entry,
                                    const MultimodalRecord& record);

struct EntryError {
  std::string image_id;
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};

struct BuildOptions {
  int jobs = 1;
  bool fail_fast = false;
};

struct BuildReport {
  std::string split;
  std::uint64_t seed = 0;
  std::string attributes;
  std::size_t entries = 0;
  std::size_t written = 0;
  bool aborted = false;
  std::vector<EntryError> errors;
  std::map<std::string, std::uint64_t> class_counts;  // "category|type"
  std::array<std::uint64_t, 9> direction_histogram{};
  std::array<std::uint64_t, 4> quantity_histogram{};
  std::array<std::uint64_t, 5> template_histogram{};
  std::uint64_t no_change_records = 0;

  nlohmann::ordered_json ToJson() const;
};

// Streams one JSON line per entry in manifest order. Entries are processed in
// bounded blocks across `jobs` workers; output order never depends on timing.
BuildReport BuildMultimodalDataset(const DatasetManifest& manifest,
                                   std::ostream& jsonl,
                                   const BuildOptions& options = {});

struct DatasetOutputs {
  std::filesystem::path jsonl;
  std::filesystem::path report;
};

DatasetOutputs OutputPaths(const DatasetManifest& manifest,
                           const std::filesystem::path& out_dir);

// Writes <split>.mm.jsonl and <split>.report.json under out_dir, replacing
// them atomically.
BuildReport WriteMultimodalDataset(const DatasetManifest& manifest,
                                   const std::filesystem::path& out_dir,
                                   const BuildOptions& options = {});

struct DatasetFinding {
  std::string image_id;  // empty for dataset-level findings
  std::string kind;
  std::string message;
};

// Manifest-level and per-mask findings; empty iff the dataset is clean.
std::vector<DatasetFinding> ValidateDataset(const std::filesystem::path& config_path);

// Direction / quantity / category histograms plus connected-component
// aggregates per class.
nlohmann::ordered_json DatasetStats(const DatasetManifest& manifest, int jobs = 1);

}  // namespace masktext

#endif  // MASKTEXT_CORE_DATASET_IO_HPP_
