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

#include "support/fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "core/png_io.hpp"

namespace masktext::testing {

namespace fs = std::filesystem;

const std::vector<FixtureClass>& FixtureClasses() {
  static const std::vector<FixtureClass> kClasses = {
      {1, "buildings", "destroyed"},
      {2, "buildings", "newly built"},
      {3, "refugee camp", "newly established"},
      {4, "agricultural land", "destroyed"},
      {5, "greenhouse", "newly built"},
  };
  return kClasses;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("masktext_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<std::uint16_t> RandomLabels(std::mt19937_64& rng, int width, int height,
                                        const std::vector<std::uint16_t>& class_values,
                                        int max_classes, int min_classes) {
  std::vector<std::uint16_t> labels(static_cast<std::size_t>(width) * height, 0);
  std::vector<std::uint16_t> pool = class_values;
  std::shuffle(pool.begin(), pool.end(), rng);
  const int hi = std::min<int>(max_classes, static_cast<int>(pool.size()));
  const int k = std::uniform_int_distribution<int>(std::min(min_classes, hi), hi)(rng);
  for (int c = 0; c < k; ++c) {
    const int rects = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int r = 0; r < rects; ++r) {
      const int w = std::uniform_int_distribution<int>(1, std::max(1, width / 3))(rng);
      const int h = std::uniform_int_distribution<int>(1, std::max(1, height / 3))(rng);
      const int x0 = std::uniform_int_distribution<int>(0, width - w)(rng);
      const int y0 = std::uniform_int_distribution<int>(0, height - h)(rng);
      for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
          labels[static_cast<std::size_t>(y) * width + x] = pool[c];
        }
      }
    }
  }
  return labels;
}

void WriteLabelPng(const fs::path& path, int width, int height,
                   const std::vector<std::uint16_t>& labels) {
  std::vector<std::uint8_t> bytes(labels.begin(), labels.end());
  WriteGrayPng(path, width, height, bytes);
}

fs::path WriteDataset(const fs::path& dir, const DatasetSpec& spec) {
  fs::create_directories(dir / "A");
  fs::create_directories(dir / "B");
  fs::create_directories(dir / "label");
  std::mt19937_64 rng(spec.seed);
  std::vector<std::uint16_t> values;
  for (const auto& c : FixtureClasses()) values.push_back(c.value);

  std::ostringstream entries;
  for (int i = 0; i < spec.entries; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "img_%04d", i);
    const auto labels = RandomLabels(rng, spec.width, spec.height, values, spec.max_classes);
    WriteLabelPng(dir / "label" / (std::string(id) + ".png"), spec.width, spec.height, labels);
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(spec.width) * spec.height * 3);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      rgb[3 * p] = static_cast<std::uint8_t>(40 + 30 * labels[p]);
      rgb[3 * p + 1] = static_cast<std::uint8_t>(90 + p % 50);
      rgb[3 * p + 2] = 120;
    }
    WriteRgbPng(dir / "A" / (std::string(id) + ".png"), spec.width, spec.height, rgb);
    for (auto& v : rgb) v = static_cast<std::uint8_t>(255 - v);
    WriteRgbPng(dir / "B" / (std::string(id) + ".png"), spec.width, spec.height, rgb);
    entries << id << " = A/" << id << ".png | B/" << id << ".png | label/" << id << ".png\n";
  }

  std::ostringstream cfg;
  cfg << "; synthetic fixture\n"
      << "[dataset]\n"
      << "root = .\n"
      << "split = " << spec.split << "\n"
      << "image_ext = .png\n\n"
      << "[palette]\n"
      << "encoding = index\n";
  for (const auto& c : FixtureClasses()) {
    cfg << c.value << " = " << c.category << " | " << c.change_type << "\n";
  }
  if (spec.explicit_entries) cfg << "\n[entries]\n" << entries.str();
  cfg << "\n" << spec.extra_config;
  const fs::path config = dir / "config.ini";
  std::ofstream(config) << cfg.str();
  return config;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CommandResult RunCommand(const std::string& command) {
  static std::atomic<int> counter{0};
  const fs::path base = fs::temp_directory_path() /
                        ("masktext_cmd_" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter++));
  const std::string out_path = base.string() + ".out";
  const std::string err_path = base.string() + ".err";
  const std::string full = command + " >" + out_path + " 2>" + err_path;
  const int status = std::system(full.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out_path);
  r.err = ReadFile(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return r;
}

std::string CliPath() { return MASKTEXT_CLI; }

}  // namespace masktext::testing
