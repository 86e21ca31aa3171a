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

#include "core/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"

namespace masktext {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kBlockSize = 256;

std::string Trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(Trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <typename Int>
Int ParseInt(const std::string& text, const std::string& what) {
  Int value{};
  const std::string t = Trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::kConfig, what + ": expected an integer, got '" + text + "'");
  }
  return value;
}

const pt::ptree* Section(const pt::ptree& tree, const char* name) {
  auto it = tree.find(name);
  return it == tree.not_found() ? nullptr : &it->second;
}

std::optional<std::string> Key(const pt::ptree* section, const char* key) {
  if (!section) return std::nullopt;
  auto v = section->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
  if (!v) return std::nullopt;
  return Trim(*v);
}

std::uint32_t PackRgb(std::uint16_t r, std::uint16_t g, std::uint16_t b) {
  return (static_cast<std::uint32_t>(r) << 16) |
         (static_cast<std::uint32_t>(g) << 8) | b;
}

std::pair<std::string, std::string> ParseClassValue(const std::string& key,
                                                    const std::string& value) {
  const auto parts = Split(value, '|');
  if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
    throw Error(ErrorCode::kConfig, "[palette] " + key +
                                        ": expected 'category | change type', "
                                        "got '" + value + "'");
  }
  return {parts[0], parts[1]};
}

Palette ParsePalette(const pt::ptree* section) {
  if (!section) throw Error(ErrorCode::kConfig, "missing [palette] section");
  Palette::Encoding encoding = Palette::Encoding::kIndex;
  if (auto enc = Key(section, "encoding")) {
    if (*enc == "rgb") {
      encoding = Palette::Encoding::kRgb;
    } else if (*enc != "index") {
      throw Error(ErrorCode::kConfig,
                  "[palette] encoding must be 'index' or 'rgb', got '" + *enc + "'");
    }
  }
  std::vector<PaletteEntry> entries;
  for (const auto& [raw_key, node] : *section) {
    const std::string key = Trim(raw_key);
    if (key == "encoding") continue;
    PaletteEntry e;
    std::tie(e.category, e.change_type) = ParseClassValue(key, node.data());
    if (encoding == Palette::Encoding::kIndex) {
      e.pixel_value = ParseInt<std::uint32_t>(key, "[palette] key");
      if (e.pixel_value > 65535) {
        throw Error(ErrorCode::kConfig, "[palette] value " + key + " out of range");
      }
      e.class_index = static_cast<std::uint16_t>(e.pixel_value);
    } else {
      const auto rgb = Split(key, ',');
      if (rgb.size() != 3) {
        throw Error(ErrorCode::kConfig,
                    "[palette] rgb key must be 'r,g,b', got '" + key + "'");
      }
      for (int c = 0; c < 3; ++c) {
        const auto v = ParseInt<unsigned>(rgb[c], "[palette] color");
        if (v > 255) throw Error(ErrorCode::kConfig, "[palette] color out of range: " + key);
        e.color[c] = static_cast<std::uint8_t>(v);
      }
      e.class_index = static_cast<std::uint16_t>(entries.size() + 1);
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw Error(ErrorCode::kConfig, "[palette] has no classes");
  return Palette(encoding, std::move(entries));
}

TemplateSet ParseTemplates(const pt::ptree* section, const Palette& palette) {
  TemplateSet set = TemplateSet::Default();
  if (section) {
    for (int id = 1; id <= kTemplateCount; ++id) {
      if (auto pattern = Key(section, std::to_string(id).c_str())) {
        set.templates[static_cast<std::size_t>(id - 1)] = Template::Compile(id, *pattern);
      }
    }
    if (auto pattern = Key(section, "center")) {
      set.center_variant = Template::Compile(1, *pattern);
    }
    for (const auto& [key, node] : *section) {
      const std::string k = Trim(key);
      const bool numbered = k.size() == 1 && k[0] >= '1' && k[0] <= '5';
      if (!numbered && k != "center" && k != "categories" && k != "change_types") {
        throw Error(ErrorCode::kConfig, "[templates] unknown key '" + k + "'");
      }
    }
  }
  // Vocabulary: palette names first, then any configured extras.
  std::vector<std::string> categories, types;
  auto add = [](std::vector<std::string>& v, const std::string& w) {
    if (!w.empty() && std::find(v.begin(), v.end(), w) == v.end()) v.push_back(w);
  };
  for (const auto& e : palette.entries()) {
    add(categories, e.category);
    add(types, e.change_type);
  }
  if (auto extra = Key(section, "categories")) {
    for (const auto& w : Split(*extra, ';')) add(categories, w);
  }
  if (auto extra = Key(section, "change_types")) {
    for (const auto& w : Split(*extra, ';')) add(types, w);
  }
  set.categories = std::move(categories);
  set.change_types = std::move(types);
  return set;
}

void RequireFile(const fs::path& p, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw Error(ErrorCode::kMissingFile, what + " not found: " + p.string());
  }
}

std::vector<ManifestEntry> DiscoverEntries(const fs::path& root,
                                           const pt::ptree* dataset,
                                           const pt::ptree* explicit_entries) {
  std::vector<ManifestEntry> entries;
  if (explicit_entries) {
    for (const auto& [raw_id, node] : *explicit_entries) {
      const auto parts = Split(node.data(), '|');
      if (parts.size() != 3) {
        throw Error(ErrorCode::kConfig, "[entries] " + raw_id +
                                            ": expected 'pre | post | mask'");
      }
      entries.push_back({Trim(raw_id), root / parts[0], root / parts[1], root / parts[2]});
    }
    return entries;
  }

  const std::string pre_dir = Key(dataset, "pre_dir").value_or("A");
  const std::string post_dir = Key(dataset, "post_dir").value_or("B");
  const std::string mask_dir = Key(dataset, "mask_dir").value_or("label");
  const std::string mask_ext = Key(dataset, "mask_ext").value_or(".png");
  const auto image_ext = Key(dataset, "image_ext");

  std::vector<std::string> ids;
  if (auto list = Key(dataset, "list")) {
    std::ifstream in(root / *list);
    if (!in) throw Error(ErrorCode::kMissingFile, "id list not found: " + (root / *list).string());
    std::string line;
    while (std::getline(in, line)) {
      line = Trim(line);
      if (line.empty() || line[0] == '#') continue;
      ids.push_back(line);
    }
  } else {
    const fs::path dir = root / mask_dir;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
      throw Error(ErrorCode::kMissingFile, "mask directory not found: " + dir.string());
    }
    for (const auto& f : fs::directory_iterator(dir)) {
      if (f.is_regular_file() && f.path().extension() == mask_ext) {
        ids.push_back(f.path().stem().string());
      }
    }
    std::sort(ids.begin(), ids.end());
  }
  for (const auto& id : ids) {
    const std::string mask_name = id + mask_ext;
    const std::string image_name = image_ext ? id + *image_ext : mask_name;
    entries.push_back({id, root / pre_dir / image_name, root / post_dir / image_name,
                       root / mask_dir / mask_name});
  }
  return entries;
}

json QuadrupleJson(const SemanticQuadruple& q) {
  json j;
  j["class_index"] = q.class_index;
  j["location"] = DirectionName(q.location);
  j["quantity"] = QuantityName(q.quantity);
  j["category"] = q.category;
  j["change_type"] = q.change_type;
  j["pixel_count"] = q.pixel_count;
  j["centroid"] = {{"x", q.centroid_x}, {"y", q.centroid_y}};
  return j;
}

}  // namespace

Palette::Palette(Encoding encoding, std::vector<PaletteEntry> entries)
    : encoding_(encoding), entries_(std::move(entries)) {
  std::set<std::uint16_t> seen;
  for (const auto& e : entries_) {
    if (encoding_ == Encoding::kIndex && e.pixel_value == 0) {
      throw Error(ErrorCode::kConfig, "palette value 0 is reserved for no-change");
    }
    if (encoding_ == Encoding::kRgb && e.color == Rgb{0, 0, 0}) {
      throw Error(ErrorCode::kConfig, "palette color 0,0,0 is reserved for no-change");
    }
    if (!seen.insert(e.class_index).second) {
      throw Error(ErrorCode::kConfig, "palette lists class " +
                                          std::to_string(e.class_index) + " twice");
    }
    if (encoding_ == Encoding::kIndex) {
      if (index_lookup_.size() <= e.pixel_value) index_lookup_.resize(e.pixel_value + 1, -1);
      index_lookup_[e.pixel_value] = e.class_index;
    } else {
      const auto key = PackRgb(e.color[0], e.color[1], e.color[2]);
      if (!rgb_lookup_.emplace(key, e.class_index).second) {
        throw Error(ErrorCode::kConfig, "palette lists a color twice");
      }
    }
  }
  if (encoding_ == Encoding::kIndex) {
    if (index_lookup_.empty()) index_lookup_.resize(1, -1);
    index_lookup_[0] = 0;
  }
}

std::vector<ClassEntry> Palette::ClassTable() const {
  std::vector<ClassEntry> table;
  table.reserve(entries_.size());
  for (const auto& e : entries_) table.push_back({e.class_index, e.category, e.change_type});
  std::stable_sort(table.begin(), table.end(), [](const ClassEntry& a, const ClassEntry& b) {
    return a.class_index < b.class_index;
  });
  return table;
}

ChangeMask Palette::Apply(const RawImage& image, const std::string& where) const {
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  std::vector<std::uint16_t> labels(n);
  if (encoding_ == Encoding::kIndex) {
    if (image.channels != 1) {
      throw Error(ErrorCode::kDecode,
                  where + ": index palette needs a single-channel or indexed mask");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint16_t v = image.samples[i];
      const std::int32_t c = v < index_lookup_.size() ? index_lookup_[v] : -1;
      if (c < 0) throw PaletteGapError(v, where);
      labels[i] = static_cast<std::uint16_t>(c);
    }
  } else {
    if (image.channels != 3) {
      throw Error(ErrorCode::kDecode, where + ": rgb palette needs an RGB mask");
    }
    std::uint32_t last_key = 0;
    std::uint16_t last_class = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto key = PackRgb(image.samples[3 * i], image.samples[3 * i + 1],
                               image.samples[3 * i + 2]);
      if (key == 0) {
        labels[i] = 0;
        continue;
      }
      if (key != last_key) {
        auto it = rgb_lookup_.find(key);
        if (it == rgb_lookup_.end()) throw PaletteGapError(key, where);
        last_key = key;
        last_class = it->second;
      }
      labels[i] = last_class;
    }
  }
  return ChangeMask(image.width, image.height, std::move(labels), ClassTable());
}

const ManifestEntry* DatasetManifest::Find(const std::string& image_id) const {
  for (const auto& e : entries) {
    if (e.image_id == image_id) return &e;
  }
  return nullptr;
}

std::string DatasetManifest::Relative(const fs::path& p) const {
  return p.lexically_relative(root).generic_string();
}

DatasetManifest LoadManifest(const fs::path& config_path, const LoadOptions& options) {
  std::error_code ec;
  if (!fs::is_regular_file(config_path, ec)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + config_path.string());
  }
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(config_path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed config: ") + e.what());
  }
  for (const auto& [name, node] : tree) {
    static const std::set<std::string> kKnown = {"dataset", "palette", "thresholds",
                                                 "templates", "attributes", "entries"};
    if (!kKnown.count(name)) {
      throw Error(ErrorCode::kConfig, "unknown section [" + name + "]");
    }
    if (node.data().size() && node.empty()) {
      throw Error(ErrorCode::kConfig, "key '" + name + "' outside any section");
    }
  }

  const pt::ptree* dataset = Section(tree, "dataset");
  DatasetManifest m;
  const fs::path base = fs::absolute(config_path).parent_path();
  m.root = (base / Key(dataset, "root").value_or(".")).lexically_normal();
  if (!m.root.empty() && m.root.filename().empty()) m.root = m.root.parent_path();
  m.split = Key(dataset, "split").value_or("train");
  if (m.split.empty() || m.split.find('/') != std::string::npos) {
    throw Error(ErrorCode::kConfig, "invalid split name '" + m.split + "'");
  }
  if (auto seed = Key(dataset, "seed")) m.seed = ParseInt<std::uint64_t>(*seed, "[dataset] seed");
  if (auto conn = Key(dataset, "connectivity")) {
    const int c = ParseInt<int>(*conn, "[dataset] connectivity");
    if (c != 4 && c != 8) throw Error(ErrorCode::kConfig, "connectivity must be 4 or 8");
    m.connectivity = c == 4 ? Connectivity::kFour : Connectivity::kEight;
  }
  long scan = options.palette_scan;
  if (auto s = Key(dataset, "palette_scan")) scan = ParseInt<long>(*s, "[dataset] palette_scan");

  m.palette = ParsePalette(Section(tree, "palette"));

  if (const auto* th = Section(tree, "thresholds")) {
    if (auto v = Key(th, "t1")) m.thresholds.t1 = ParseInt<std::uint64_t>(*v, "[thresholds] t1");
    if (auto v = Key(th, "t2")) m.thresholds.t2 = ParseInt<std::uint64_t>(*v, "[thresholds] t2");
    if (auto v = Key(th, "t3")) m.thresholds.t3 = ParseInt<std::uint64_t>(*v, "[thresholds] t3");
  }
  try {
    m.thresholds.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }

  if (auto use = Key(Section(tree, "attributes"), "use")) {
    try {
      m.attrs = AttributeSelection::Parse(*use);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, std::string("[attributes] ") + e.what());
    }
  }

  m.templates = ParseTemplates(Section(tree, "templates"), m.palette);
  m.entries = DiscoverEntries(m.root, dataset, Section(tree, "entries"));

  std::set<std::string> ids;
  for (const auto& e : m.entries) {
    if (e.image_id.empty()) throw Error(ErrorCode::kConfig, "empty image id");
    if (!ids.insert(e.image_id).second) {
      throw Error(ErrorCode::kConfig, "duplicate image id '" + e.image_id + "'");
    }
  }
  if (options.check_files) {
    for (const auto& e : m.entries) {
      RequireFile(e.pre_image, "pre-event image for " + e.image_id);
      RequireFile(e.post_image, "post-event image for " + e.image_id);
      RequireFile(e.mask, "mask for " + e.image_id);
    }
  }
  if (scan >= 0 && !m.entries.empty()) {
    // Evenly spaced sample. Undecodable masks are left to the per-entry
    // build report; only palette gaps fail the load.
    const std::size_t n = m.entries.size();
    const std::size_t limit = scan == 0 ? n : std::min<std::size_t>(n, scan);
    for (std::size_t k = 0; k < limit; ++k) {
      try {
        ReadMask(m.entries[k * n / limit].mask, m.palette);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDecode) throw;
      }
    }
  }
  return m;
}

ChangeMask ReadMask(const fs::path& path, const Palette& palette) {
  const RawImage raw = ReadPng(path);
  ChangeMask mask = palette.Apply(raw, path.string());
  if (auto findings = ValidateChangeMask(mask); !findings.empty()) {
    throw Error(ErrorCode::kDecode, path.string() + ": " + findings.front().message);
  }
  return mask;
}

MultimodalRecord BuildRecord(const DatasetManifest& manifest, const ManifestEntry& entry) {
  return BuildRecord(manifest, entry, ReadMask(entry.mask, manifest.palette));
}

MultimodalRecord BuildRecord(const DatasetManifest& manifest, const ManifestEntry& entry,
                             const ChangeMask& mask) {
  MultimodalRecord r;
  r.image_id = entry.image_id;
  r.width = mask.width();
  r.height = mask.height();
  r.quadruples = TranscribeMask(mask, manifest.thresholds);
  for (const auto& q : r.quadruples) r.changed_pixels += q.pixel_count;
  SampleDescription d = DescribeSample(r.quadruples, entry.image_id, manifest.seed,
                                       manifest.attrs, manifest.templates);
  r.sentences = std::move(d.sentences);
  r.description = std::move(d.text);
  return r;
}

json RecordToJson(const DatasetManifest& manifest, const ManifestEntry& entry,
                  const MultimodalRecord& record) {
  json j;
  j["image_id"] = record.image_id;
  j["split"] = manifest.split;
  j["pre_image"] = manifest.Relative(entry.pre_image);
  j["post_image"] = manifest.Relative(entry.post_image);
  j["mask"] = manifest.Relative(entry.mask);
  j["seed"] = manifest.seed;
  j["attributes"] = manifest.attrs.ToString();
  j["description"] = record.description;
  json sentences = json::array();
  for (const auto& s : record.sentences) {
    sentences.push_back({{"text", s.sentence},
                         {"template_id", s.template_id},
                         {"class_index", s.quadruple.class_index}});
  }
  j["sentences"] = std::move(sentences);
  json quads = json::array();
  for (const auto& q : record.quadruples) quads.push_back(QuadrupleJson(q));
  j["quadruples"] = std::move(quads);
  j["mask_stats"] = {{"width", record.width},
                     {"height", record.height},
                     {"changed_pixels", record.changed_pixels}};
  return j;
}

json BuildReport::ToJson() const {
  json j;
  j["split"] = split;
  j["seed"] = seed;
  j["attributes"] = attributes;
  j["entries"] = entries;
  j["written"] = written;
  j["failed"] = errors.size();
  j["aborted"] = aborted;
  json errs = json::array();
  for (const auto& e : errors) {
    errs.push_back({{"image_id", e.image_id},
                    {"error", ErrorCodeName(e.code)},
                    {"message", e.message}});
  }
  j["errors"] = std::move(errs);
  json classes = json::object();
  for (const auto& [k, v] : class_counts) classes[k] = v;
  j["class_quadruples"] = std::move(classes);
  json dirs = json::object();
  for (Direction d : kAllDirections) {
    dirs[std::string(DirectionName(d))] = direction_histogram[static_cast<std::size_t>(d)];
  }
  j["direction_histogram"] = std::move(dirs);
  json qs = json::object();
  for (Quantity q : kAllQuantities) {
    qs[std::string(QuantityName(q))] = quantity_histogram[static_cast<std::size_t>(q)];
  }
  j["quantity_histogram"] = std::move(qs);
  json ts = json::object();
  for (int t = 1; t <= kTemplateCount; ++t) {
    ts[std::to_string(t)] = template_histogram[static_cast<std::size_t>(t - 1)];
  }
  j["template_histogram"] = std::move(ts);
  j["no_change_records"] = no_change_records;
  return j;
}

BuildReport BuildMultimodalDataset(const DatasetManifest& manifest, std::ostream& jsonl,
                                   const BuildOptions& options) {
  BuildReport report;
  report.split = manifest.split;
  report.seed = manifest.seed;
  report.attributes = manifest.attrs.ToString();
  report.entries = manifest.entries.size();

  struct Slot {
    std::optional<MultimodalRecord> record;
    std::optional<EntryError> error;
  };
  std::vector<Slot> block;
  for (std::size_t start = 0; start < manifest.entries.size(); start += kBlockSize) {
    const std::size_t end = std::min(manifest.entries.size(), start + kBlockSize);
    block.assign(end - start, Slot{});
    ParallelFor(start, end, options.jobs, [&](std::size_t i) {
      const ManifestEntry& entry = manifest.entries[i];
      Slot& slot = block[i - start];
      try {
        slot.record = BuildRecord(manifest, entry);
      } catch (const Error& e) {
        slot.error = EntryError{entry.image_id, e.code(), e.what()};
      } catch (const std::exception& e) {
        slot.error = EntryError{entry.image_id, ErrorCode::kInternal, e.what()};
      }
    });

    for (std::size_t i = start; i < end; ++i) {
      Slot& slot = block[i - start];
      if (slot.error) {
        report.errors.push_back(*slot.error);
        if (options.fail_fast) {
          report.aborted = true;
          return report;
        }
        continue;
      }
      const MultimodalRecord& r = *slot.record;
      jsonl << RecordToJson(manifest, manifest.entries[i], r).dump() << '\n';
      ++report.written;
      if (r.quadruples.empty()) ++report.no_change_records;
      for (const auto& q : r.quadruples) {
        ++report.class_counts[q.category + "|" + q.change_type];
        ++report.direction_histogram[static_cast<std::size_t>(q.location)];
        ++report.quantity_histogram[static_cast<std::size_t>(q.quantity)];
      }
      for (const auto& s : r.sentences) {
        if (!r.quadruples.empty()) {
          ++report.template_histogram[static_cast<std::size_t>(s.template_id - 1)];
        }
      }
    }
  }
  return report;
}

DatasetOutputs OutputPaths(const DatasetManifest& manifest, const fs::path& out_dir) {
  return {out_dir / (manifest.split + ".mm.jsonl"), out_dir / (manifest.split + ".report.json")};
}

BuildReport WriteMultimodalDataset(const DatasetManifest& manifest, const fs::path& out_dir,
                                   const BuildOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  const DatasetOutputs out = OutputPaths(manifest, out_dir);

  auto tmp_jsonl = out.jsonl;
  tmp_jsonl += ".tmp";
  BuildReport report;
  {
    std::ofstream f(tmp_jsonl, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp_jsonl.string());
    report = BuildMultimodalDataset(manifest, f, options);
    f.flush();
    if (!f) throw Error(ErrorCode::kIo, "write failed: " + tmp_jsonl.string());
  }
  fs::rename(tmp_jsonl, out.jsonl, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move output into place: " + ec.message());

  auto tmp_report = out.report;
  tmp_report += ".tmp";
  {
    std::ofstream f(tmp_report, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp_report.string());
    f << report.ToJson().dump(2) << '\n';
  }
  fs::rename(tmp_report, out.report, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot move report into place: " + ec.message());
  return report;
}

std::vector<DatasetFinding> ValidateDataset(const fs::path& config_path) {
  std::vector<DatasetFinding> findings;
  DatasetManifest manifest;
  try {
    LoadOptions opts;
    opts.check_files = false;
    opts.palette_scan = -1;
    manifest = LoadManifest(config_path, opts);
  } catch (const Error& e) {
    findings.push_back({"", ErrorCodeName(e.code()), e.what()});
    return findings;
  }
  for (const auto& e : manifest.entries) {
    for (const auto* p : {&e.pre_image, &e.post_image}) {
      std::error_code ec;
      if (!fs::is_regular_file(*p, ec)) {
        findings.push_back({e.image_id, "MissingFile", "not found: " + p->string()});
      }
    }
    try {
      const RawImage raw = ReadPng(e.mask);
      const ChangeMask mask = manifest.palette.Apply(raw, e.mask.string());
      for (const auto& f : ValidateChangeMask(mask)) {
        findings.push_back({e.image_id, std::string(FindingKindName(f.kind)), f.message});
      }
    } catch (const Error& err) {
      findings.push_back({e.image_id, ErrorCodeName(err.code()), err.what()});
    }
  }
  return findings;
}

json DatasetStats(const DatasetManifest& manifest, int jobs) {
  struct ClassAgg {
    std::uint64_t quadruples = 0;
    std::uint64_t pixels = 0;
    std::uint64_t components = 0;
    std::uint64_t min_area = 0;
    std::uint64_t max_area = 0;
  };
  struct PerEntry {
    std::vector<SemanticQuadruple> quads;
    std::vector<std::vector<RegionStat>> regions;
    std::optional<EntryError> error;
  };
  std::vector<PerEntry> results(manifest.entries.size());
  ParallelFor(0, manifest.entries.size(), jobs, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    try {
      const ChangeMask mask = ReadMask(entry.mask, manifest.palette);
      results[i].quads = TranscribeMask(mask, manifest.thresholds);
      for (const auto& q : results[i].quads) {
        results[i].regions.push_back(
            RegionStats(mask.ExtractClass(q.class_index), manifest.connectivity));
      }
    } catch (const Error& e) {
      results[i].error = EntryError{entry.image_id, e.code(), e.what()};
    }
  });

  std::array<std::uint64_t, 9> dirs{};
  std::array<std::uint64_t, 4> qty{};
  std::map<std::string, ClassAgg> classes;
  for (const auto& e : manifest.palette.ClassTable()) {
    classes[e.category + "|" + e.change_type];
  }
  json errors = json::array();
  std::uint64_t no_change = 0;
  for (const auto& r : results) {
    if (r.error) {
      errors.push_back({{"image_id", r.error->image_id},
                        {"error", ErrorCodeName(r.error->code)},
                        {"message", r.error->message}});
      continue;
    }
    if (r.quads.empty()) ++no_change;
    for (std::size_t k = 0; k < r.quads.size(); ++k) {
      const auto& q = r.quads[k];
      ++dirs[static_cast<std::size_t>(q.location)];
      ++qty[static_cast<std::size_t>(q.quantity)];
      ClassAgg& agg = classes[q.category + "|" + q.change_type];
      ++agg.quadruples;
      agg.pixels += q.pixel_count;
      for (const auto& reg : r.regions[k]) {
        agg.min_area = agg.components == 0 ? reg.area : std::min(agg.min_area, reg.area);
        agg.max_area = std::max(agg.max_area, reg.area);
        ++agg.components;
      }
    }
  }

  json j;
  j["split"] = manifest.split;
  j["entries"] = manifest.entries.size();
  j["no_change_entries"] = no_change;
  json dj = json::object();
  for (Direction d : kAllDirections) dj[std::string(DirectionName(d))] = dirs[static_cast<std::size_t>(d)];
  j["direction_histogram"] = std::move(dj);
  json qj = json::object();
  for (Quantity q : kAllQuantities) qj[std::string(QuantityName(q))] = qty[static_cast<std::size_t>(q)];
  j["quantity_histogram"] = std::move(qj);
  json cj = json::object();
  for (const auto& [name, agg] : classes) {
    cj[name] = {{"quadruples", agg.quadruples},
                {"pixels", agg.pixels},
                {"components", agg.components},
                {"min_component_area", agg.min_area},
                {"max_component_area", agg.max_area},
                {"mean_component_area",
                 agg.components ? static_cast<double>(agg.pixels) / static_cast<double>(agg.components)
                                : 0.0}};
  }
  j["category_histogram"] = std::move(cj);
  j["connectivity"] = static_cast<int>(manifest.connectivity);
  j["errors"] = std::move(errors);
  return j;
}

}  // namespace masktext
