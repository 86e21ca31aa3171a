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

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/template_engine.hpp"

namespace masktext {
namespace {

SemanticQuadruple Quad(Quantity q, std::string type, std::string category, Direction d) {
  SemanticQuadruple s;
  s.quantity = q;
  s.change_type = std::move(type);
  s.category = std::move(category);
  s.location = d;
  return s;
}

TEST(Render, TemplateOneNortheast) {
  auto q = Quad(Quantity::kSeveral, "destroyed", "buildings", Direction::kNortheast);
  EXPECT_EQ(Render(q, 1).sentence, "The scene shows several destroyed buildings in the northeast.");
}

TEST(Render, TemplateFiveSingularCenter) {
  auto q = Quad(Quantity::kSingle, "newly built", "greenhouse", Direction::kCenter);
  EXPECT_EQ(Render(q, 5).sentence, "There is a single newly built greenhouse in the center region");
}

TEST(Render, TemplateThreeLowercaseStart) {
  auto q = Quad(Quantity::kFew, "destroyed", "buildings", Direction::kSouthwest);
  EXPECT_EQ(Render(q, 3).sentence, "a few destroyed buildings located in the southwest.");
}

TEST(Render, TemplateTwoAndFour) {
  auto q = Quad(Quantity::kFew, "newly built", "greenhouse", Direction::kWest);
  EXPECT_EQ(Render(q, 2).sentence, "Observing a few newly built greenhouse towards the west.");
  EXPECT_EQ(Render(q, 4).sentence, "In the west, a few newly built greenhouse are visible.");
  q.quantity = Quantity::kSingle;
  EXPECT_EQ(Render(q, 4).sentence, "In the west, a single newly built greenhouse is visible.");
  EXPECT_EQ(Render(q, 5).sentence, "There is a single newly built greenhouse in the west region");
  q.quantity = Quantity::kMultiple;
  EXPECT_EQ(Render(q, 5).sentence, "There are multiple newly built greenhouse in the west region");
}

TEST(Render, CenterUsesNeutralVariant) {
  auto q = Quad(Quantity::kSeveral, "destroyed", "refugee camp", Direction::kCenter);
  EXPECT_EQ(Render(q, 1).sentence, "The scene shows several destroyed refugee camp in the center.");
  EXPECT_EQ(Render(q, 1).template_id, 1);
}

TEST(Render, AttributeOmission) {
  auto q = Quad(Quantity::kFew, "destroyed", "buildings", Direction::kNorth);
  AttributeSelection no_loc = AttributeSelection::Parse("quantity,type,category");
  EXPECT_EQ(Render(q, 1, no_loc).sentence, "The scene shows a few destroyed buildings.");
  EXPECT_EQ(Render(q, 4, no_loc).sentence, "a few destroyed buildings are visible.");
  EXPECT_EQ(Render(q, 5, no_loc).sentence, "There are a few destroyed buildings");
  AttributeSelection cat_loc = AttributeSelection::Parse("category,location");
  EXPECT_EQ(Render(q, 1, cat_loc).sentence, "The scene shows buildings in the north.");
  EXPECT_EQ(Render(q, 4, cat_loc).sentence, "In the north, buildings are visible.");
  AttributeSelection q_only = AttributeSelection::Parse("quantity");
  EXPECT_EQ(Render(q, 2, q_only).sentence, "Observing a few.");
}

TEST(Render, RejectsBadTemplateAndEmptySelection) {
  auto q = Quad(Quantity::kFew, "destroyed", "buildings", Direction::kNorth);
  EXPECT_THROW(Render(q, 0), Error);
  EXPECT_THROW(Render(q, 6), Error);
  EXPECT_THROW(Render(q, 1, AttributeSelection::Parse("none")), Error);
}

TEST(AttributeSelection, ParseAndBits) {
  EXPECT_EQ(AttributeSelection::Parse("all"), AttributeSelection{});
  auto s = AttributeSelection::Parse("location, quantity");
  EXPECT_TRUE(s.quantity && s.location && !s.type && !s.category);
  EXPECT_EQ(s.ToString(), "quantity,location");
  EXPECT_EQ(AttributeSelection::FromBits(s.bits()), s);
  EXPECT_EQ(AttributeSelection::Parse("none").ToString(), "none");
  EXPECT_THROW(AttributeSelection::Parse("colour"), Error);
}

TEST(Template, CompileRejectsMalformedPatterns) {
  EXPECT_THROW(Template::Compile(1, "[quantity] [quantity]"), Error);
  EXPECT_THROW(Template::Compile(1, "[size]"), Error);
  EXPECT_THROW(Template::Compile(1, "{ in the [location]"), Error);
  EXPECT_THROW(Template::Compile(1, "{no slot}"), Error);
  EXPECT_NO_THROW(Template::Compile(1, "[category]{ at [location]}."));
}

TEST(SelectTemplate, DeterministicAndInRange) {
  EXPECT_EQ(SelectTemplate(0, "img_0001", 1), SelectTemplate(0, "img_0001", 1));
  for (int i = 0; i < 1000; ++i) {
    const int t = SelectTemplate(i, "x" + std::to_string(i), i % 7);
    EXPECT_GE(t, 1);
    EXPECT_LE(t, 5);
  }
}

TEST(SelectTemplate, MatchesMixingDefinition) {
  // FNV-1a 64 and splitmix64 reference values.
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
  const std::uint64_t mixed = SplitMix64(42ULL ^ Fnv1a64("img_0007") ^ 3ULL);
  EXPECT_EQ(SelectTemplate(42, "img_0007", 3), static_cast<int>(mixed % 5) + 1);
}

TEST(SelectTemplate, UniformOverRandomIds) {
  std::mt19937_64 rng(99);
  std::array<int, 5> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::string id = "id_" + std::to_string(rng());
    ++counts[SelectTemplate(42, id, 1) - 1];
  }
  for (int c : counts) {
    EXPECT_GE(c / static_cast<double>(n), 0.19);
    EXPECT_LE(c / static_cast<double>(n), 0.21);
  }
}

TEST(SelectTemplate, SeedChangesSomeSelection) {
  bool changed = false;
  for (int i = 0; i < 100 && !changed; ++i) {
    const std::string id = "sample_" + std::to_string(i);
    changed = SelectTemplate(1, id, 1) != SelectTemplate(2, id, 1);
  }
  EXPECT_TRUE(changed);
}

TEST(Describe, JoinsSentencesAndHandlesEmpty) {
  auto empty = DescribeSample({}, "img", 0);
  EXPECT_EQ(empty.text, "The scene shows no change.");
  std::vector<SemanticQuadruple> qs = {
      Quad(Quantity::kFew, "destroyed", "buildings", Direction::kNorth),
      Quad(Quantity::kSingle, "newly built", "greenhouse", Direction::kEast)};
  qs[0].class_index = 1;
  qs[1].class_index = 5;
  auto d = DescribeSample(qs, "img_0003", 9);
  ASSERT_EQ(d.sentences.size(), 2u);
  EXPECT_EQ(d.sentences[0].template_id, SelectTemplate(9, "img_0003", 1));
  EXPECT_EQ(d.sentences[1].template_id, SelectTemplate(9, "img_0003", 5));
  EXPECT_EQ(d.text, d.sentences[0].sentence + " " + d.sentences[1].sentence);
}

TEST(Parse, KnownSentences) {
  auto p = ParseDescription("The scene shows several destroyed buildings in the northeast.");
  EXPECT_EQ(p.template_id, 1);
  EXPECT_EQ(*p.quantity, Quantity::kSeveral);
  EXPECT_EQ(*p.change_type, "destroyed");
  EXPECT_EQ(*p.category, "buildings");
  EXPECT_EQ(*p.location, Direction::kNortheast);

  auto o = ParseDescription("Observing a few newly built greenhouse towards the west.");
  EXPECT_EQ(o.template_id, 2);
  EXPECT_EQ(*o.quantity, Quantity::kFew);
  EXPECT_EQ(*o.change_type, "newly built");
  EXPECT_EQ(*o.category, "greenhouse");
  EXPECT_EQ(*o.location, Direction::kWest);

  EXPECT_TRUE(ParseDescription("The scene shows no change.").no_change);
}

TEST(Parse, MultiWordCategoriesResolve) {
  auto p = ParseDescription("a single destroyed greenhouse destroyed located in the south.");
  EXPECT_EQ(*p.category, "greenhouse destroyed");
  EXPECT_EQ(*p.change_type, "destroyed");
  auto r = ParseDescription("There are multiple newly established refugee camp in the east region");
  EXPECT_EQ(*r.category, "refugee camp");
  EXPECT_EQ(*r.change_type, "newly established");
}

TEST(Parse, FailureCarriesPosition) {
  try {
    ParseDescription("hello world");
    FAIL();
  } catch (const ParseFailure& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseFailure);
  }
  try {
    ParseDescription("The scene shows several destroyed castles in the north.");
    FAIL();
  } catch (const ParseFailure& e) {
    // Gets at least past "The scene shows several destroyed ".
    EXPECT_GE(e.position(), 34u);
  }
}

// Every non-empty attribute subset, not just the ones containing category.
TEST(Parse, ExhaustiveRoundTripAllSubsets) {
  const auto cats = TemplateSet::DefaultCategories();
  const auto types = TemplateSet::DefaultChangeTypes();
  const DescriptionParser parser;
  std::size_t checked = 0;
  for (unsigned bits = 1; bits < 16; ++bits) {
    const auto attrs = AttributeSelection::FromBits(bits);
    for (Direction d : kAllDirections)
      for (Quantity q : kAllQuantities)
        for (const auto& c : cats)
          for (const auto& t : types)
            for (int id = 1; id <= 5; ++id) {
              const auto quad = Quad(q, t, c, d);
              const std::string s = Render(quad, id, attrs).sentence;
              ParsedDescription p;
              try {
                p = parser.Parse(s);
              } catch (const Error& e) {
                ADD_FAILURE() << s << ": " << e.what();
                continue;
              }
              ++checked;
              ASSERT_EQ(p.template_id, id) << s;
              ASSERT_EQ(p.attrs, attrs) << s;
              ASSERT_EQ(p.quantity.has_value(), attrs.quantity) << s;
              ASSERT_EQ(p.change_type.has_value(), attrs.type) << s;
              ASSERT_EQ(p.category.has_value(), attrs.category) << s;
              ASSERT_EQ(p.location.has_value(), attrs.location) << s;
              if (attrs.quantity) {
                ASSERT_EQ(*p.quantity, q) << s;
              }
              if (attrs.type) {
                ASSERT_EQ(*p.change_type, t) << s;
              }
              if (attrs.category) {
                ASSERT_EQ(*p.category, c) << s;
              }
              if (attrs.location) {
                ASSERT_EQ(*p.location, d) << s;
              }
            }
  }
  EXPECT_EQ(checked, 15u * 9 * 4 * cats.size() * types.size() * 5);
}

TEST(Render, VocabularyClosure) {
  // Scaffolding words typed out from the five templates and the agreement pair.
  std::set<std::string> allowed = {"The", "scene", "shows", "in", "the", "Observing", "towards",
                                   "located", "In", "is", "are", "visible", "There", "region"};
  auto add_words = [&](const std::string& phrase) {
    std::istringstream ss(phrase);
    std::string w;
    while (ss >> w) allowed.insert(w);
  };
  for (const auto& c : TemplateSet::DefaultCategories()) add_words(c);
  for (const auto& t : TemplateSet::DefaultChangeTypes()) add_words(t);
  for (Direction d : kAllDirections) add_words(std::string(DirectionName(d)));
  for (Quantity q : kAllQuantities) add_words(std::string(QuantityName(q)));

  for (unsigned bits = 1; bits < 16; ++bits)
    for (Direction d : kAllDirections)
      for (Quantity q : kAllQuantities)
        for (int id = 1; id <= 5; ++id) {
          const auto s =
              Render(Quad(q, "newly established", "agricultural land", d), id,
                     AttributeSelection::FromBits(bits))
                  .sentence;
          std::string cleaned;
          for (char ch : s) cleaned += (ch == '.' || ch == ',') ? ' ' : ch;
          std::istringstream ss(cleaned);
          std::string w;
          while (ss >> w) EXPECT_TRUE(allowed.count(w)) << "'" << w << "' in " << s;
          EXPECT_EQ(s.find("  "), std::string::npos) << s;
          EXPECT_NE(s.front(), ' ');
          EXPECT_NE(s.back(), ' ');
        }
}

}  // namespace
}  // namespace masktext
