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

#ifndef MASKTEXT_TESTS_SUPPORT_FIXTURES_HPP_
#define MASKTEXT_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

// Synthetic datasets and random rasters shared by the unit and acceptance
// tests.
namespace masktext::testing {

struct FixtureClass {
  std::uint16_t value;
  std::string category;
  std::string change_type;
};

// Five classes over the default vocabularies.
const std::vector<FixtureClass>& FixtureClasses();

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

// Random label raster: between `min_classes` and `max_classes` classes from
// `class_values`, each painted as a few random rectangles. Later classes
// overwrite earlier ones, so a class can occasionally vanish.
std::vector<std::uint16_t> RandomLabels(std::mt19937_64& rng, int width, int height,
                                        const std::vector<std::uint16_t>& class_values,
                                        int max_classes, int min_classes = 0);

struct DatasetSpec {
  int entries = 2;
  int width = 64;
  int height = 64;
  std::uint64_t seed = 7;       // raster generation
  int max_classes = 3;
  bool explicit_entries = false;  // [entries] section instead of a directory scan
  std::string split = "train";
  std::string extra_config;       // appended verbatim
};

// Writes A/, B/, label/ PNGs and config.ini under dir; returns the config path.
std::filesystem::path WriteDataset(const std::filesystem::path& dir, const DatasetSpec& spec);

// Writes a label PNG (8-bit grayscale).
void WriteLabelPng(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint16_t>& labels);

std::string ReadFile(const std::filesystem::path& path);

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing stdout and stderr separately.
CommandResult RunCommand(const std::string& command);

// Path of the built CLI binary (from the MASKTEXT_CLI compile definition).
std::string CliPath();

}  // namespace masktext::testing

#endif  // MASKTEXT_TESTS_SUPPORT_FIXTURES_HPP_
