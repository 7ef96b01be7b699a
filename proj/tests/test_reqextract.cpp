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

#include "reqx/reqextract.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

using namespace reqx;

namespace {

constexpr const char* kEx1 =
    "It is the responsibility of the supplier to guarantee that the "
    "delivered gas or gas mixture is non-toxic, in accordance with "
    "international and local regulations.";

constexpr const char* kEx2 =
    "Information concerning gas storage and transportation is provided in "
    "IEC 62271-4. Specific labelling of containers shall be implemented in "
    "accordance with the mode of transport and the local and international "
    "regulations.";

Lexicon corpus_lexicon() {
  std::string t =
      "uri,class,lang,label,preferred,parent_uri\n"
      "u:gas,substance,en,gas,true,\n"
      "u:gas_mixture,substance,en,gas mixture,true,u:gas\n"
      "u:supplier,agent,en,supplier,true,\n"
      "u:toxicity,property,en,toxicity|toxic|non-toxic,true,\n"
      "u:SF6,substance,en,SF6|sulphur hexafluoride,true,u:gas\n"
      "u:CF4,substance,en,CF4|carbon tetra-fluoride,true,u:gas\n"
      "u:N2,substance,en,N2|nitrogen,true,u:gas\n"
      "u:O2,substance,en,O2|oxygen,true,u:gas\n"
      "u:H2O,substance,en,H2O|water vapour,true,\n"
      "u:mineral_oil,substance,en,mineral oil,true,\n"
      "u:total_acidity,substance,en,total acidity,true,\n"
      "u:container,equipment,en,container|containers,true,\n"
      "u:container_labelling,process,en,container labelling|labelling of containers,true,\n"
      "u:mode_of_transport,process,en,mode of transport,true,\n"
      "u:transport,process,en,transport|transportation,true,\n"
      "u:storage,process,en,storage,true,\n"
      "u:atmosphere,substance,en,atmosphere,true,\n";
  return Lexicon::load_glossary(csv::parse(t));
}

AnnotatedDocument prepared(const std::string& id, const std::string& text,
                           const Lexicon& lex) {
  auto doc = AnnotatedDocument::from_text(id, "", text);
  doc.sentences = split_sentences(doc);
  doc.merge_annotations(annotate_concepts(doc, lex));
  return doc;
}

}  // namespace

TEST_CASE("classification follows the concept-and-verb rule") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();

  SECTION("shall sentence with concepts is a requirement") {
    auto doc = prepared("ex2", kEx2, lex);
    REQUIRE(doc.sentences.size() == 2);
    CHECK(classify_sentence(doc, doc.sentences[0], deontic) ==
          StatementClass::statement);
    CHECK(classify_sentence(doc, doc.sentences[1], deontic) ==
          StatementClass::requirement);
  }
  SECTION("guarantee counts as a requirement marker") {
    auto doc = prepared("ex1", kEx1, lex);
    REQUIRE(doc.sentences.size() == 1);
    CHECK(classify_sentence(doc, doc.sentences[0], deontic) ==
          StatementClass::requirement);
  }
  SECTION("concept without marker stays a statement") {
    auto doc = prepared("st", "SF6 is an excellent electrical insulator", lex);
    CHECK(classify_sentence(doc, doc.sentences[0], deontic) ==
          StatementClass::statement);
  }
  SECTION("marker without concept stays a statement") {
    auto doc = prepared("mk", "It shall be done promptly", lex);
    CHECK(classify_sentence(doc, doc.sentences[0], deontic) ==
          StatementClass::statement);
  }
  SECTION("weaker markers map to their classes") {
    auto doc = prepared("sh", "The gas should be dry", lex);
    CHECK(classify_sentence(doc, doc.sentences[0], deontic) ==
          StatementClass::recommendation);
    auto doc2 = prepared("mu", "The gas must be dry", lex);
    CHECK(classify_sentence(doc2, doc2.sentences[0], deontic) ==
          StatementClass::external_constraint);
    auto doc3 = prepared("ma", "The gas may be reused", lex);
    CHECK(classify_sentence(doc3, doc3.sentences[0], deontic) ==
          StatementClass::permission);
  }
}

TEST_CASE("structured extraction reproduces the responsibility row") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("ex1", kEx1, lex);
  auto req = extract_structured(doc, doc.sentences[0], deontic, lex);

  CHECK(req.classification == StatementClass::requirement);
  REQUIRE(req.distinguish_features.size() == 2);
  CHECK(req.distinguish_features[0] == "GUARANTEE");
  CHECK(req.distinguish_features[1] ==
        "in conformance with (international regulation and local regulation)");

  REQUIRE(req.concepts.size() == 4);
  CHECK(req.concepts[0].uri == "u:supplier");
  CHECK(req.concepts[1].uri == "u:gas");
  CHECK(req.concepts[2].uri == "u:gas_mixture");
  CHECK(req.concepts[3].uri == "u:toxicity");
  CHECK(req.concepts[3].surface == "non-toxic");

  REQUIRE(req.conditions.size() == 2);
  CHECK(req.conditions[0] == "in accordance with international regulation");
  CHECK(req.conditions[1] == "in accordance with local regulation");
}

TEST_CASE("storage sentence lists individual regulation references") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("ex2", kEx2, lex);
  auto req = extract_structured(doc, doc.sentences[1], deontic, lex);

  auto has = [&](const std::string& s) {
    for (const auto& d : req.distinguish_features)
      if (d == s) return true;
    return false;
  };
  CHECK(has("SHALL"));
  CHECK(has("local regulation"));
  CHECK(has("international regulation"));

  bool labelling = false, transport_mode = false;
  for (const auto& c : req.concepts) {
    if (c.uri == "u:container_labelling") labelling = true;
    if (c.uri == "u:mode_of_transport") transport_mode = true;
  }
  CHECK(labelling);
  CHECK(transport_mode);
}

TEST_CASE("extraction rejects sentences without both signals") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("mk", "It shall be done promptly", lex);
  try {
    extract_structured(doc, doc.sentences[0], deontic, lex);
    FAIL("expected NotARequirement");
  } catch (const ExtractError& e) {
    CHECK(e.kind() == ExtractErrorKind::not_a_requirement);
  }
}

TEST_CASE("coordination splitting produces one atom per branch") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("ex1", kEx1, lex);
  auto req = extract_structured(doc, doc.sentences[0], deontic, lex);
  auto atoms = split_coordination(req);

  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].req_id == req.req_id + ".1");
  CHECK(atoms[1].req_id == req.req_id + ".2");
  REQUIRE(atoms[0].concepts.size() == 3);
  CHECK(atoms[0].concepts[1].uri == "u:gas");
  CHECK(atoms[1].concepts[1].uri == "u:gas_mixture");
  // conditions distribute to every atom
  CHECK(atoms[0].conditions == req.conditions);
  CHECK(atoms[1].conditions == req.conditions);
  // union of atom concepts equals the parent concepts
  std::set<std::string> together;
  for (const auto& atom : atoms)
    for (const auto& c : atom.concepts) together.insert(c.uri.value_or(""));
  std::set<std::string> parent;
  for (const auto& c : req.concepts) parent.insert(c.uri.value_or(""));
  CHECK(together == parent);
}

TEST_CASE("requirement without coordination splits into itself") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("one", "The gas shall be dry", lex);
  auto req = extract_structured(doc, doc.sentences[0], deontic, lex);
  auto atoms = split_coordination(req);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].req_id == req.req_id);
}

TEST_CASE("quantity parsing") {
  auto q1 = parse_quantity("99,7 % volume");
  CHECK(q1.value.str() == "99.7");
  CHECK(q1.unit == Unit::percent_volume);

  auto q2 = parse_quantity("1 500 µl/l");
  CHECK(q2.value.str() == "1500");
  CHECK(q2.unit == Unit::microlitre_per_litre);

  auto q3 = parse_quantity("10 mg/kg");
  CHECK(q3.value.str() == "10");
  CHECK(q3.unit == Unit::mg_per_kg);

  CHECK(parse_quantity("500 ppmv").unit == Unit::ppmv);
  CHECK(parse_quantity("-40 °C").unit == Unit::celsius);
  CHECK(parse_quantity("-40 °C").value.str() == "-40");
  CHECK(parse_quantity("7").unit == Unit::dimensionless);

  CHECK_THROWS_AS(parse_quantity("no number"), ExtractError);
  try {
    parse_quantity("10 furlongs");
    FAIL("expected UnknownUnit");
  } catch (const ExtractError& e) {
    CHECK(e.kind() == ExtractErrorKind::unknown_unit);
  }
}

TEST_CASE("unit conversion is exact both ways") {
  Quantity ul{*Decimal::parse("500"), Unit::microlitre_per_litre};
  CHECK(convert_unit(ul, Unit::ppmv) ==
        Quantity{*Decimal::parse("500"), Unit::ppmv});

  Quantity pct{*Decimal::parse("99.7"), Unit::percent_volume};
  CHECK(convert_unit(pct, Unit::ppmv) ==
        Quantity{*Decimal::parse("997000"), Unit::ppmv});
  CHECK(convert_unit(convert_unit(pct, Unit::ppmv), Unit::percent_volume) ==
        pct);

  Quantity mg{*Decimal::parse("10"), Unit::mg_per_kg};
  CHECK(convert_unit(mg, Unit::ppmw) ==
        Quantity{*Decimal::parse("10"), Unit::ppmw});

  try {
    convert_unit(mg, Unit::celsius);
    FAIL("expected IncompatibleUnits");
  } catch (const ExtractError& e) {
    CHECK(e.kind() == ExtractErrorKind::incompatible_units);
  }
}

TEST_CASE("table one parses to six exact records") {
  Lexicon lex = corpus_lexicon();
  std::string csv_text =
      "substance,constraint\n"
      "CF4,\"> 99,7 % volume\"\n"
      "O2,< 500 µl/l (i.e. 500 ppmv)\n"
      "N2,< 1 500 µl/l (i.e. 1 500 ppmv)\n"
      "H2O,< 200 µl/l (i.e. 200 ppmv)\n"
      "Mineral oil,< 10 mg/kg (i.e. 10 ppmw)\n"
      "Total acidity,< 7 µl/l (i.e. 7 ppmv)\n"
      "Key ppmv = parts per million by volume ppmw = parts per million by weight,\n";
  auto records = parse_requirement_table(csv::parse(csv_text),
                                         "CF4 to be used in SF6 mixtures", lex);
  REQUIRE(records.size() == 6);

  CHECK(records[0].substance_uri == "u:CF4");
  CHECK(records[0].comparator == Comparator::GT);
  CHECK(records[0].quantity == Quantity{*Decimal::parse("99.7"),
                                        Unit::percent_volume});
  CHECK_FALSE(records[0].alt_quantity.has_value());

  CHECK(records[1].substance_uri == "u:O2");
  CHECK(records[1].comparator == Comparator::LT);
  CHECK(records[1].quantity == Quantity{*Decimal::parse("500"),
                                        Unit::microlitre_per_litre});
  CHECK(records[1].alt_quantity == Quantity{*Decimal::parse("500"), Unit::ppmv});

  CHECK(records[2].quantity.value.str() == "1500");
  CHECK(records[3].quantity.value.str() == "200");

  CHECK(records[4].substance_uri == "u:mineral_oil");
  CHECK(records[4].quantity == Quantity{*Decimal::parse("10"), Unit::mg_per_kg});
  CHECK(records[4].alt_quantity == Quantity{*Decimal::parse("10"), Unit::ppmw});

  CHECK(records[5].substance_uri == "u:total_acidity");
  CHECK(records[5].quantity.value.str() == "7");

  for (const auto& r : records) {
    CHECK(r.context == "CF4 to be used in SF6 mixtures");
    if (r.alt_quantity)
      CHECK(convert_unit(r.quantity, r.alt_quantity->unit) == *r.alt_quantity);
  }
}

TEST_CASE("word comparators from the expression block parse") {
  Lexicon lex = corpus_lexicon();
  std::string csv_text =
      "substance,constraint\n"
      "O₂,SMALLER THAN 3 000 µl/l (= 3 000 ppmv)\n";
  auto records = parse_requirement_table(csv::parse(csv_text), "ctx", lex);
  REQUIRE(records.size() == 1);
  CHECK(records[0].substance_uri == "u:O2");
  CHECK(records[0].comparator == Comparator::LT);
  CHECK(records[0].quantity.value.str() == "3000");
  CHECK(records[0].quantity.unit == Unit::microlitre_per_litre);
}

TEST_CASE("table errors") {
  Lexicon lex = corpus_lexicon();
  SECTION("fabricated parenthetical mismatch is caught") {
    std::string t = "substance,constraint\nO2,< 500 µl/l (i.e. 600 ppmv)\n";
    try {
      parse_requirement_table(csv::parse(t), "ctx", lex);
      FAIL("expected QuantityMismatch");
    } catch (const ExtractError& e) {
      CHECK(e.kind() == ExtractErrorKind::quantity_mismatch);
      CHECK(std::string(e.what()).find("600") != std::string::npos);
      CHECK(std::string(e.what()).find("500") != std::string::npos);
    }
  }
  SECTION("missing comparator") {
    std::string t = "substance,constraint\nO2,500 µl/l\n";
    try {
      parse_requirement_table(csv::parse(t), "ctx", lex);
      FAIL("expected ComparatorMissing");
    } catch (const ExtractError& e) {
      CHECK(e.kind() == ExtractErrorKind::comparator_missing);
    }
  }
  SECTION("unresolved substances survive with their surface") {
    std::string t = "substance,constraint\nXenon,< 5 µl/l\n";
    auto records = parse_requirement_table(csv::parse(t), "ctx", lex);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].substance_uri.has_value());
    CHECK(records[0].substance_surface == "Xenon");
  }
}

static const char* kEnvironmentalImpact =
    "SF6, CF4 and SF6 mixtures with N2 and/or CF4 have a certain "
    "environmental impact. Due to this impact, SF6, CF4 and their mixture "
    "gas shall be handled carefully to prevent deliberate release of SF6 "
    "and CF4 gas into the atmosphere.";

TEST_CASE("vague-term lint flags the environmental impact wording") {
  Lexicon lex = corpus_lexicon();
  auto doc = prepared("env", kEnvironmentalImpact, lex);
  REQUIRE(doc.sentences.size() == 2);
  std::set<std::string> flagged;
  for (const auto& sentence : doc.sentences)
    for (const auto& [term, reason] : flag_vague_terms(doc, sentence).flagged)
      flagged.insert(term);
  CHECK(flagged == std::set<std::string>{"certain", "carefully", "deliberate"});
}

TEST_CASE("vague-term lint flags specific in the labelling sentence") {
  Lexicon lex = corpus_lexicon();
  auto doc = prepared("ex2", kEx2, lex);
  auto report = flag_vague_terms(doc, doc.sentences[1]);
  REQUIRE(report.flagged.size() == 1);
  CHECK(report.flagged[0].first == "specific");
  CHECK(report.flagged[0].second ==
        std::string("ambiguous modifier — Directives conformance risk"));
}

TEST_CASE("vague-term lint stays quiet without vague terms") {
  Lexicon lex = corpus_lexicon();
  auto doc = prepared("ok", "The gas shall be dry", lex);
  CHECK(flag_vague_terms(doc, doc.sentences[0]).flagged.empty());
}

TEST_CASE("and/or yields three tokens and coordinates the splitter") {
  auto tokens = tokenize("N2 and/or CF4");
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[1].norm == "and");
  CHECK(tokens[2].norm == "/");
  CHECK(tokens[3].norm == "or");

  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  auto doc = prepared("ao", "The mixture shall contain N2 and/or CF4", lex);
  auto req = extract_structured(doc, doc.sentences[0], deontic, lex);
  auto atoms = split_coordination(req);
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].concepts.back().uri == "u:N2");
  CHECK(atoms[1].concepts.back().uri == "u:CF4");
}

TEST_CASE("classification mirrors the conjunction exactly") {
  Lexicon lex = corpus_lexicon();
  DeonticLexicon deontic = DeonticLexicon::defaults();
  std::mt19937 rng(1936);
  const char* fillers[] = {"the", "device", "regularly", "it", "today"};
  const char* concepts[] = {"gas", "SF6", "mineral oil"};
  const char* markers[] = {"shall", "must", "may", "should"};
  for (int round = 0; round < 300; ++round) {
    bool with_concept = rng() % 2 == 0;
    bool with_marker = rng() % 2 == 0;
    std::vector<std::string> words;
    for (int i = 0; i < 4; ++i) words.push_back(fillers[rng() % 5]);
    if (with_concept) words.insert(words.begin() + rng() % words.size(),
                                   concepts[rng() % 3]);
    if (with_marker) words.insert(words.begin() + rng() % words.size(),
                                  markers[rng() % 4]);
    std::string text;
    for (const auto& w : words) text += w + " ";
    auto doc = prepared("p", text, lex);
    REQUIRE(doc.sentences.size() == 1);
    bool requirementish =
        classify_sentence(doc, doc.sentences[0], deontic) !=
        StatementClass::statement;
    REQUIRE(requirementish == (with_concept && with_marker));
  }
}

TEST_CASE("deontic lexicon loads from csv") {
  std::string t = "marker,class\noblige,requirement\nmight,possibility\n";
  auto d = DeonticLexicon::load_csv(csv::parse(t));
  CHECK(d.entries().count("oblige") == 1);
  CHECK_THROWS_AS(DeonticLexicon::load_csv(csv::parse("marker,class\n")),
                  ExtractError);
}
