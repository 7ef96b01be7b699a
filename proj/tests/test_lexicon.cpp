// Copyright 2026 The reqx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "reqx/lexicon.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace reqx;

namespace {

constexpr const char* kOnto = "http://example.org/onto#";

Lexicon tiny_lexicon() {
  std::string csv_text =
      "uri,class,lang,label,preferred,parent_uri\n" +
      std::string(kOnto) + "gas,substance,en,gas,true,\n" +
      std::string(kOnto) + "gas_mixture,substance,en,gas mixture,true," +
      std::string(kOnto) + "gas\n" +
      std::string(kOnto) + "SF6,substance,en,SF6,true," + kOnto + "gas\n" +
      std::string(kOnto) + "SF6,substance,en,sulphur hexafluoride,false," +
      std::string(kOnto) + "gas\n" +
      std::string(kOnto) + "SF6,substance,fr,hexafluorure de soufre,true," +
      std::string(kOnto) + "gas\n";
  return Lexicon::load_glossary(csv::parse(csv_text));
}

std::string uri(const char* local) { return std::string(kOnto) + local; }

}  // namespace

TEST_CASE("glossary rows with one uri merge into one entry") {
  Lexicon lex = tiny_lexicon();
  REQUIRE(lex.entries().size() == 3);
  const ConceptEntry* sf6 = lex.find(uri("SF6"));
  REQUIRE(sf6 != nullptr);
  int english = 0;
  for (const auto& l : sf6->labels)
    if (l.lang == "en") ++english;
  CHECK(english == 2);
  CHECK(*sf6->preferred_label() == "SF6");
  CHECK(sf6->parent_uri == uri("gas"));
}

TEST_CASE("pipe-separated labels expand in one cell") {
  std::string csv_text =
      "uri,class,lang,label,preferred,parent_uri\n"
      "u:g,substance,en,gas,true,\n"
      "u:s,substance,en,SF6|sulphur hexafluoride,true,u:g\n";
  Lexicon lex = Lexicon::load_glossary(csv::parse(csv_text));
  const ConceptEntry* sf6 = lex.find("u:s");
  REQUIRE(sf6 != nullptr);
  CHECK(sf6->labels.size() == 2);
  CHECK(*lex.uri_for_label("sulphur hexafluoride") == "u:s");
}

TEST_CASE("glossary load errors") {
  SECTION("dangling parent") {
    std::string t =
        "uri,class,lang,label,preferred,parent_uri\n"
        "u:a,substance,en,alpha,true,u:absent\n";
    try {
      Lexicon::load_glossary(csv::parse(t));
      FAIL("expected DanglingParent");
    } catch (const LexiconError& e) {
      CHECK(e.kind() == LexiconErrorKind::dangling_parent);
      CHECK(e.uri() == "u:a");
    }
  }
  SECTION("conflicting rows for one uri") {
    std::string t =
        "uri,class,lang,label,preferred,parent_uri\n"
        "u:a,substance,en,alpha,true,\n"
        "u:a,property,en,alpha two,false,\n";
    try {
      Lexicon::load_glossary(csv::parse(t));
      FAIL("expected DuplicateUri");
    } catch (const LexiconError& e) {
      CHECK(e.kind() == LexiconErrorKind::duplicate_uri);
      CHECK(e.uri() == "u:a");
    }
  }
  SECTION("missing english label") {
    std::string t =
        "uri,class,lang,label,preferred,parent_uri\n"
        "u:a,substance,fr,gaz,true,\n";
    CHECK_THROWS_AS(Lexicon::load_glossary(csv::parse(t)), LexiconError);
  }
  SECTION("identical label on two entries") {
    std::string t =
        "uri,class,lang,label,preferred,parent_uri\n"
        "u:a,substance,en,gas,true,\n"
        "u:b,substance,en,Gas,true,\n";
    try {
      Lexicon::load_glossary(csv::parse(t));
      FAIL("expected DuplicateLabel");
    } catch (const LexiconError& e) {
      CHECK(e.kind() == LexiconErrorKind::duplicate_label);
    }
  }
  SECTION("hierarchy cycle") {
    std::string t =
        "uri,class,lang,label,preferred,parent_uri\n"
        "u:a,substance,en,alpha,true,u:b\n"
        "u:b,substance,en,beta,true,u:a\n";
    CHECK_THROWS_AS(Lexicon::load_glossary(csv::parse(t)), LexiconError);
  }
}

TEST_CASE("longest match wins and resumes after the match") {
  Lexicon lex = tiny_lexicon();
  auto doc = AnnotatedDocument::from_text(
      "ex1", "", "the delivered gas or gas mixture is non-toxic");
  auto anns = annotate_concepts(doc, lex);
  REQUIRE(anns.size() == 2);
  CHECK(doc.substring(anns[0].span) == "gas");
  CHECK(*anns[0].string_feature("URI") == uri("gas"));
  CHECK(*anns[0].string_feature("class") == "substance");
  CHECK(doc.substring(anns[1].span) == "gas mixture");
  CHECK(*anns[1].string_feature("URI") == uri("gas_mixture"));
}

TEST_CASE("subscript text matches an ASCII label") {
  Lexicon lex = tiny_lexicon();
  auto doc = AnnotatedDocument::from_text("s", "", "SF₆ is delivered");
  auto anns = annotate_concepts(doc, lex);
  REQUIRE(anns.size() == 1);
  CHECK(doc.substring(anns[0].span) == "SF₆");
  CHECK(*anns[0].string_feature("URI") == uri("SF6"));
}

TEST_CASE("no match inside a longer word") {
  Lexicon lex = tiny_lexicon();
  auto doc = AnnotatedDocument::from_text("g", "", "gaseous compounds");
  CHECK(annotate_concepts(doc, lex).empty());
}

TEST_CASE("empty lexicon annotates nothing") {
  Lexicon lex;
  auto doc = AnnotatedDocument::from_text("e", "", "gas mixture");
  CHECK(annotate_concepts(doc, lex).empty());
}

TEST_CASE("lookup output is a pure function of the inputs") {
  Lexicon lex = tiny_lexicon();
  auto doc = AnnotatedDocument::from_text(
      "p", "", "SF6 and the gas mixture with more gas");
  auto a = annotate_concepts(doc, lex);
  auto b = annotate_concepts(doc, lex);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].span == b[i].span);
    CHECK(a[i].features == b[i].features);
  }
  // non-overlap
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK(a[i - 1].span.end <= a[i].span.start);
  // every URI resolves
  for (const auto& ann : a)
    CHECK(lex.find(*ann.string_feature("URI")) != nullptr);
}

TEST_CASE("subsumes follows parent links") {
  Lexicon lex = tiny_lexicon();
  CHECK(subsumes(lex, uri("gas"), uri("SF6")));
  CHECK(subsumes(lex, uri("SF6"), uri("SF6")));
  CHECK_FALSE(subsumes(lex, uri("SF6"), uri("gas")));
  CHECK_THROWS_AS(subsumes(lex, uri("gas"), "u:nope"), LexiconError);
}
