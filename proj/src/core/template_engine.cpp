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

#include "core/template_engine.hpp"

#include <algorithm>
#include <bit>
#include <cctype>

#include "core/errors.hpp"

namespace masktext {

namespace {

using PieceKind = Template::Piece::Kind;

constexpr std::string_view kAgreementToken = "(is/are)";

std::optional<Slot> SlotFromName(std::string_view name) {
  if (name == "quantity") return Slot::kQuantity;
  if (name == "type") return Slot::kType;
  if (name == "category") return Slot::kCategory;
  if (name == "location") return Slot::kLocation;
  return std::nullopt;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string CollapseSpaces(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space) {
      // No space before closing punctuation.
      if (std::string_view(".,;:!?").find(c) == std::string_view::npos) {
        out += ' ';
      }
      in_space = false;
    }
    out += c;
  }
  if (in_space) out += ' ';
  return out;
}

std::string_view AgreementVerb(const SemanticQuadruple& q,
                               const AttributeSelection& attrs) {
  return attrs.quantity && q.quantity == Quantity::kSingle ? "is" : "are";
}

std::vector<std::string> LongestFirst(std::vector<std::string> words) {
  std::stable_sort(words.begin(), words.end(),
                   [](const std::string& a, const std::string& b) {
                     return a.size() > b.size();
                   });
  return words;
}

}  // namespace

std::string_view SlotName(Slot s) {
  switch (s) {
    case Slot::kQuantity: return "quantity";
    case Slot::kType: return "type";
    case Slot::kCategory: return "category";
    case Slot::kLocation: return "location";
  }
  return "?";
}

bool AttributeSelection::enabled(Slot s) const {
  switch (s) {
    case Slot::kQuantity: return quantity;
    case Slot::kType: return type;
    case Slot::kCategory: return category;
    case Slot::kLocation: return location;
  }
  return false;
}

unsigned AttributeSelection::bits() const {
  return (quantity ? 1u : 0u) | (type ? 2u : 0u) | (category ? 4u : 0u) |
         (location ? 8u : 0u);
}

AttributeSelection AttributeSelection::FromBits(unsigned b) {
  return {(b & 1u) != 0, (b & 2u) != 0, (b & 4u) != 0, (b & 8u) != 0};
}

AttributeSelection AttributeSelection::Parse(std::string_view list) {
  const std::string_view trimmed = Trim(list);
  if (trimmed == "all") return {};
  AttributeSelection sel{false, false, false, false};
  if (trimmed == "none" || trimmed.empty()) return sel;
  std::size_t start = 0;
  while (start <= trimmed.size()) {
    std::size_t end = trimmed.find(',', start);
    if (end == std::string_view::npos) end = trimmed.size();
    const std::string_view name = Trim(trimmed.substr(start, end - start));
    const auto slot = SlotFromName(name);
    if (!slot) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown attribute '" + std::string(name) +
                      "' (expected quantity, type, category, location, all "
                      "or none)");
    }
    switch (*slot) {
      case Slot::kQuantity: sel.quantity = true; break;
      case Slot::kType: sel.type = true; break;
      case Slot::kCategory: sel.category = true; break;
      case Slot::kLocation: sel.location = true; break;
    }
    start = end + 1;
  }
  return sel;
}

std::string AttributeSelection::ToString() const {
  std::string out;
  for (Slot s : {Slot::kQuantity, Slot::kType, Slot::kCategory, Slot::kLocation}) {
    if (!enabled(s)) continue;
    if (!out.empty()) out += ',';
    out += SlotName(s);
  }
  return out.empty() ? "none" : out;
}

Template Template::Compile(int id, std::string pattern) {
  Template t;
  t.id_ = id;
  t.pattern_ = std::move(pattern);
  const std::string_view p = t.pattern_;

  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kConfig, "template " + std::to_string(id) + " (\"" +
                                         t.pattern_ + "\"): " + why);
  };

  bool seen[4] = {false, false, false, false};
  bool in_group = false;
  std::size_t group_start = 0;
  int group_slots = 0;
  Slot group_slot = Slot::kQuantity;
  std::string text;

  auto flush_text = [&] {
    if (text.empty()) return;
    t.pieces_.push_back({PieceKind::kText, text, Slot::kQuantity, in_group});
    text.clear();
  };

  for (std::size_t i = 0; i < p.size();) {
    const char c = p[i];
    if (c == '[') {
      const std::size_t close = p.find(']', i);
      if (close == std::string_view::npos) throw fail("unterminated slot");
      const std::string_view name = p.substr(i + 1, close - i - 1);
      const auto slot = SlotFromName(name);
      if (!slot) throw fail("unknown slot [" + std::string(name) + "]");
      auto& flag = seen[static_cast<int>(*slot)];
      if (flag) throw fail("slot [" + std::string(name) + "] repeated");
      flag = true;
      flush_text();
      t.pieces_.push_back({PieceKind::kSlot, {}, *slot, in_group});
      if (in_group) {
        ++group_slots;
        group_slot = *slot;
      }
      i = close + 1;
    } else if (c == '{') {
      if (in_group) throw fail("nested groups");
      flush_text();
      in_group = true;
      group_start = t.pieces_.size();
      group_slots = 0;
      ++i;
    } else if (c == '}') {
      if (!in_group) throw fail("unbalanced '}'");
      flush_text();
      if (group_slots != 1) throw fail("a group must contain exactly one slot");
      for (std::size_t k = group_start; k < t.pieces_.size(); ++k) {
        t.pieces_[k].slot = group_slot;
      }
      in_group = false;
      ++i;
    } else if (p.substr(i, kAgreementToken.size()) == kAgreementToken) {
      flush_text();
      t.pieces_.push_back({PieceKind::kAgreement, {}, Slot::kQuantity, in_group});
      i += kAgreementToken.size();
    } else {
      text += c;
      ++i;
    }
  }
  if (in_group) throw fail("unbalanced '{'");
  flush_text();
  return t;
}

Frame BuildFrame(const Template& t, const AttributeSelection& attrs) {
  Frame f;
  f.template_id = t.id();
  f.attrs = attrs;
  for (const auto& piece : t.pieces()) {
    if (piece.grouped && !attrs.enabled(piece.slot)) continue;
    if (piece.kind == PieceKind::kSlot && !attrs.enabled(piece.slot)) continue;
    if (piece.kind == PieceKind::kText && !f.pieces.empty() &&
        f.pieces.back().kind == PieceKind::kText) {
      f.pieces.back().text += piece.text;
      continue;
    }
    f.pieces.push_back({piece.kind, piece.text, piece.slot});
  }
  for (auto& piece : f.pieces) {
    if (piece.kind == PieceKind::kText) piece.text = CollapseSpaces(piece.text);
  }
  if (!f.pieces.empty() && f.pieces.front().kind == PieceKind::kText) {
    auto& s = f.pieces.front().text;
    s.erase(0, s.find_first_not_of(' ') == std::string::npos
                   ? s.size()
                   : s.find_first_not_of(' '));
  }
  if (!f.pieces.empty() && f.pieces.back().kind == PieceKind::kText) {
    auto& s = f.pieces.back().text;
    while (!s.empty() && s.back() == ' ') s.pop_back();
  }
  std::erase_if(f.pieces, [](const Frame::Piece& p) {
    return p.kind == PieceKind::kText && p.text.empty();
  });
  return f;
}

const TemplateSet& TemplateSet::Default() {
  static const TemplateSet kDefault = [] {
    TemplateSet s;
    s.templates = {
        Template::Compile(1, "The scene shows [quantity] [type] [category]{ in the [location]}."),
        Template::Compile(2, "Observing [quantity] [type] [category]{ towards the [location]}."),
        Template::Compile(3, "[quantity] [type] [category]{ located in the [location]}."),
        Template::Compile(4, "{In the [location], }[quantity] [type] [category] (is/are) visible."),
        Template::Compile(5, "There (is/are) [quantity] [type] [category]{ in the [location] region}"),
    };
    s.center_variant = Template::Compile(
        1, "The scene shows [quantity] [type] [category]{ in the [location]}.");
    s.categories = DefaultCategories();
    s.change_types = DefaultChangeTypes();
    return s;
  }();
  return kDefault;
}

std::vector<std::string> TemplateSet::DefaultCategories() {
  return {"buildings",         "building",
          "refugee camp",      "agricultural land",
          "greenhouse",        "greenhouse destroyed",
          "greenhouse newly built"};
}

std::vector<std::string> TemplateSet::DefaultChangeTypes() {
  return {"destroyed", "newly built", "newly established"};
}

const Template& TemplateSet::at(int template_id) const {
  if (template_id < 1 || template_id > kTemplateCount) {
    throw Error(ErrorCode::kInvalidArgument,
                "template id must be in 1.." + std::to_string(kTemplateCount) +
                    ", got " + std::to_string(template_id));
  }
  return templates[static_cast<std::size_t>(template_id - 1)];
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t Fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

int SelectTemplate(std::uint64_t seed, std::string_view image_id,
                   std::uint64_t class_index) {
  const std::uint64_t folded = seed ^ Fnv1a64(image_id) ^ class_index;
  return 1 + static_cast<int>(SplitMix64(folded) % kTemplateCount);
}

TextDescription Render(const SemanticQuadruple& q, int template_id,
                       const AttributeSelection& attrs,
                       const TemplateSet& templates) {
  if (!attrs.any()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot render with every attribute disabled");
  }
  const bool use_center_variant =
      template_id == 1 && attrs.location && q.location == Direction::kCenter;
  const Template& t =
      use_center_variant ? templates.center_variant : templates.at(template_id);
  const Frame frame = BuildFrame(t, attrs);

  std::string out;
  for (const auto& piece : frame.pieces) {
    switch (piece.kind) {
      case PieceKind::kText: out += piece.text; break;
      case PieceKind::kAgreement: out += AgreementVerb(q, attrs); break;
      case PieceKind::kSlot:
        switch (piece.slot) {
          case Slot::kQuantity: out += QuantityName(q.quantity); break;
          case Slot::kType: out += q.change_type; break;
          case Slot::kCategory: out += q.category; break;
          case Slot::kLocation: out += DirectionName(q.location); break;
        }
        break;
    }
  }
  return {std::move(out), template_id, q, 0};
}

SampleDescription DescribeSample(
    const std::vector<SemanticQuadruple>& quadruples,
    std::string_view image_id, std::uint64_t seed,
    const AttributeSelection& attrs, const TemplateSet& templates) {
  SampleDescription sample;
  if (!attrs.any()) return sample;
  if (quadruples.empty()) {
    sample.sentences.push_back({std::string(kNoChangeSentence), 1, {}, seed});
    sample.text = kNoChangeSentence;
    return sample;
  }
  for (const auto& q : quadruples) {
    const int id = SelectTemplate(seed, image_id, q.class_index);
    TextDescription d = Render(q, id, attrs, templates);
    d.rng_seed = seed;
    if (!sample.text.empty()) sample.text += ' ';
    sample.text += d.sentence;
    sample.sentences.push_back(std::move(d));
  }
  return sample;
}

struct DescriptionParser::MatchState {
  ParsedDescription out;
  std::string_view verb;
  std::size_t furthest = 0;
};

DescriptionParser::DescriptionParser(const TemplateSet& templates)
    : categories_(LongestFirst(templates.categories)),
      change_types_(LongestFirst(templates.change_types)) {
  for (Quantity q : kAllQuantities) quantity_words_.emplace_back(QuantityName(q));
  for (Direction d : kAllDirections) location_words_.emplace_back(DirectionName(d));
  quantity_words_ = LongestFirst(std::move(quantity_words_));
  location_words_ = LongestFirst(std::move(location_words_));

  std::vector<unsigned> subsets;
  for (unsigned b = 1; b < 16; ++b) subsets.push_back(b);
  std::stable_sort(subsets.begin(), subsets.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) > std::popcount(b);
  });
  for (unsigned b : subsets) {
    const auto attrs = AttributeSelection::FromBits(b);
    for (const auto& t : templates.templates) frames_.push_back(BuildFrame(t, attrs));
    if (attrs.location) {
      Frame f = BuildFrame(templates.center_variant, attrs);
      f.template_id = 1;
      f.center_variant = true;
      frames_.push_back(std::move(f));
    }
  }
}

bool DescriptionParser::Match(const Frame& frame, std::string_view s,
                              std::size_t piece, std::size_t pos,
                              MatchState& state) const {
  state.furthest = std::max(state.furthest, pos);
  if (piece == frame.pieces.size()) {
    if (pos != s.size()) return false;
    if (frame.center_variant && state.out.location != Direction::kCenter) {
      return false;
    }
    if (!state.verb.empty()) {
      const bool singular = state.out.quantity == Quantity::kSingle;
      if ((state.verb == "is") != singular) return false;
    }
    return true;
  }
  const std::string_view rest = s.substr(pos);
  const auto& p = frame.pieces[piece];
  switch (p.kind) {
    case PieceKind::kText: {
      if (rest.starts_with(p.text)) {
        return Match(frame, s, piece + 1, pos + p.text.size(), state);
      }
      std::size_t common = 0;
      while (common < rest.size() && common < p.text.size() &&
             rest[common] == p.text[common]) {
        ++common;
      }
      state.furthest = std::max(state.furthest, pos + common);
      return false;
    }
    case PieceKind::kAgreement:
      for (std::string_view verb : {"are", "is"}) {
        if (!rest.starts_with(verb)) continue;
        state.verb = verb;
        if (Match(frame, s, piece + 1, pos + verb.size(), state)) return true;
      }
      state.verb = {};
      return false;
    case PieceKind::kSlot: {
      const std::vector<std::string>* words = nullptr;
      switch (p.slot) {
        case Slot::kQuantity: words = &quantity_words_; break;
        case Slot::kType: words = &change_types_; break;
        case Slot::kCategory: words = &categories_; break;
        case Slot::kLocation: words = &location_words_; break;
      }
      for (const auto& w : *words) {
        if (!rest.starts_with(w)) continue;
        switch (p.slot) {
          case Slot::kQuantity: state.out.quantity = QuantityFromName(w); break;
          case Slot::kType: state.out.change_type = w; break;
          case Slot::kCategory: state.out.category = w; break;
          case Slot::kLocation: state.out.location = DirectionFromName(w); break;
        }
        if (Match(frame, s, piece + 1, pos + w.size(), state)) return true;
      }
      switch (p.slot) {
        case Slot::kQuantity: state.out.quantity.reset(); break;
        case Slot::kType: state.out.change_type.reset(); break;
        case Slot::kCategory: state.out.category.reset(); break;
        case Slot::kLocation: state.out.location.reset(); break;
      }
      return false;
    }
  }
  return false;
}

ParsedDescription DescriptionParser::Parse(std::string_view sentence) const {
  if (sentence == kNoChangeSentence) {
    ParsedDescription d;
    d.template_id = 1;
    d.no_change = true;
    d.attrs = AttributeSelection::FromBits(0);
    return d;
  }
  std::size_t furthest = 0;
  for (const auto& frame : frames_) {
    MatchState state;
    if (Match(frame, sentence, 0, 0, state)) {
      state.out.template_id = frame.template_id;
      state.out.attrs = frame.attrs;
      return state.out;
    }
    furthest = std::max(furthest, state.furthest);
  }
  throw ParseFailure(furthest, std::string(sentence));
}

ParsedDescription ParseDescription(std::string_view sentence,
                                   const TemplateSet& templates) {
  if (&templates == &TemplateSet::Default()) {
    static const DescriptionParser kDefaultParser(TemplateSet::Default());
    return kDefaultParser.Parse(sentence);
  }
  return DescriptionParser(templates).Parse(sentence);
}

}  // namespace masktext
