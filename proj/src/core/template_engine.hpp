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

#ifndef MASKTEXT_CORE_TEMPLATE_ENGINE_HPP_
#define MASKTEXT_CORE_TEMPLATE_ENGINE_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/core_types.hpp"

namespace masktext {

enum class Slot : std::uint8_t { kQuantity, kType, kCategory, kLocation };

std::string_view SlotName(Slot s);

// Which quadruple attributes appear in rendered sentences.
struct AttributeSelection {
  bool quantity = true;
  bool type = true;
  bool category = true;
  bool location = true;

  bool enabled(Slot s) const;
  bool any() const { return quantity || type || category || location; }
  unsigned bits() const;
  static AttributeSelection FromBits(unsigned bits);

  // Accepts "all", "none", or a comma list of slot names in any order.
  // Throws InvalidArgument on unknown names.
  static AttributeSelection Parse(std::string_view list);
  // Canonical comma list ("quantity,type,category,location"), or "none".
  std::string ToString() const;

  bool operator==(const AttributeSelection&) const = default;
};

// One compiled template. Pattern syntax:
//   [quantity] [type] [category] [location]   slots
//   {...}                                     phrase owned by the single slot
//                                             inside it; dropped with it
//   (is/are)                                  verb agreeing with the quantity
class Template {
 public:
  struct Piece {
    enum class Kind { kText, kSlot, kAgreement };
    Kind kind;
    std::string text;           // kText
    Slot slot = Slot::kQuantity;  // kSlot, or the owning slot of a group
    bool grouped = false;
  };

  // Throws Config on malformed patterns (unknown or repeated slots, unbalanced
  // groups, groups without exactly one slot).
  static Template Compile(int id, std::string pattern);

  int id() const { return id_; }
  const std::string& pattern() const { return pattern_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  int id_ = 0;
  std::string pattern_;
  std::vector<Piece> pieces_;
};

// Template pieces with disabled slots removed and scaffolding whitespace
// normalized. Rendering concatenates the pieces, substituting slot values.
struct Frame {
  struct Piece {
    Template::Piece::Kind kind;
    std::string text;
    Slot slot = Slot::kQuantity;
  };
  int template_id = 0;
  bool center_variant = false;
  AttributeSelection attrs;
  std::vector<Piece> pieces;
};

Frame BuildFrame(const Template& t, const AttributeSelection& attrs);

inline constexpr int kTemplateCount = 5;
inline constexpr std::string_view kNoChangeSentence = "The scene shows no change.";

// The five sentence templates, the center-location variant of template 1,
// and the category / change-type vocabularies used for parsing.
struct TemplateSet {
  std::array<Template, kTemplateCount> templates;
  Template center_variant;
  std::vector<std::string> categories;
  std::vector<std::string> change_types;

  static const TemplateSet& Default();
  static std::vector<std::string> DefaultCategories();
  static std::vector<std::string> DefaultChangeTypes();

  const Template& at(int template_id) const;
};

// Deterministic template draw: 1 + splitmix64(seed ^ fnv1a64(image_id) ^
// class_index) mod 5.
int SelectTemplate(std::uint64_t seed, std::string_view image_id,
                   std::uint64_t class_index);

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view s);

// Throws InvalidArgument on a bad template id or an empty selection.
TextDescription Render(const SemanticQuadruple& q, int template_id,
                       const AttributeSelection& attrs = {},
                       const TemplateSet& templates = TemplateSet::Default());

struct SampleDescription {
  std::vector<TextDescription> sentences;
  std::string text;  // sentences joined by single spaces
};

// Renders every quadruple with its own template draw. No quadruples gives the
// fixed no-change sentence; an empty attribute selection gives no text.
SampleDescription DescribeSample(
    const std::vector<SemanticQuadruple>& quadruples,
    std::string_view image_id, std::uint64_t seed,
    const AttributeSelection& attrs = {},
    const TemplateSet& templates = TemplateSet::Default());

struct ParsedDescription {
  int template_id = 0;
  bool no_change = false;
  AttributeSelection attrs;
  std::optional<Quantity> quantity;
  std::optional<std::string> change_type;
  std::optional<std::string> category;
  std::optional<Direction> location;
};

// Inverse of Render over a template set's vocabularies. Frames are tried from
// the richest attribute selection down; multi-word vocabulary entries are
// matched longest first with backtracking.
class DescriptionParser {
 public:
  explicit DescriptionParser(const TemplateSet& templates = TemplateSet::Default());

  // Throws ParseFailure carrying the furthest offset any frame reached.
  ParsedDescription Parse(std::string_view sentence) const;

 private:
  struct MatchState;
  bool Match(const Frame& frame, std::string_view s, std::size_t piece,
             std::size_t pos, MatchState& state) const;

  std::vector<Frame> frames_;
  std::vector<std::string> quantity_words_;
  std::vector<std::string> location_words_;
  std::vector<std::string> categories_;
  std::vector<std::string> change_types_;
};

ParsedDescription ParseDescription(
    std::string_view sentence,
    const TemplateSet& templates = TemplateSet::Default());

}  // namespace masktext

#endif  // MASKTEXT_CORE_TEMPLATE_ENGINE_HPP_
