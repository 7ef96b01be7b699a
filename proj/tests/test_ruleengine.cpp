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

#include "reqx/ruleengine.hpp"

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "support/appelt_oracle.hpp"

using namespace reqx;

static const char* kRenameRule = R"(
// ontology lookups become matchOntology annotations, features carried over
Phase: LookupRename
Input: Lookup
Options: control = appelt

Rule: RenameLookup
(
  {Lookup}+
):matchOntology
-->
:matchOntology.matchOntology = { URI = :matchOntology.Lookup.URI, rule = "RenameLookup" }
)";

TEST_CASE("parse the lookup-rename rule file") {
  auto phases = parse_rule_file(kRenameRule);
  REQUIRE(phases.size() == 1);
  const RulePhase& phase = phases[0];
  CHECK(phase.name == "LookupRename");
  CHECK(phase.control == PhaseControl::appelt);
  CHECK(phase.input_types == std::set<std::string>{"Lookup"});
  REQUIRE(phase.rules.size() == 1);
  const Rule& rule = phase.rules[0];
  CHECK(rule.name == "RenameLookup");
  REQUIRE(rule.lhs.kind == PatternNode::Kind::binding);
  CHECK(rule.lhs.label == "matchOntology");
  REQUIRE(rule.rhs.size() == 1);
  CHECK(rule.rhs[0].out_type == "matchOntology");
  REQUIRE(rule.rhs[0].features.size() == 2);
  CHECK(rule.rhs[0].features[0].is_copy);
  CHECK(rule.rhs[0].features[0].copy_ann_type == "Lookup");
}

TEST_CASE("empty rule file parses to no phases") {
  CHECK(parse_rule_file("").empty());
  CHECK(parse_rule_file("// only a comment\n").empty());
}

TEST_CASE("rule parse errors carry positions and kinds") {
  SECTION("unbound label") {
    const char* text =
        "Phase: P\nInput: Lookup\nOptions: control = appelt\n"
        "Rule: R\n({Lookup}):a\n-->\n:b.Out = { }\n";
    try {
      parse_rule_file(text);
      FAIL("expected UnboundLabel");
    } catch (const RuleError& e) {
      CHECK(e.kind() == RuleErrorKind::unbound_label);
    }
  }
  SECTION("unknown control") {
    const char* text = "Phase: P\nInput: Lookup\nOptions: control = brill\n";
    try {
      parse_rule_file(text);
      FAIL("expected UnknownControl");
    } catch (const RuleError& e) {
      CHECK(e.kind() == RuleErrorKind::unknown_control);
    }
  }
  SECTION("duplicate rule name") {
    const char* text =
        "Phase: P\nInput: Lookup\nOptions: control = appelt\n"
        "Rule: R\n({Lookup}):a\n-->\n:a.Out = { }\n"
        "Rule: R\n({Lookup}):b\n-->\n:b.Out = { }\n";
    try {
      parse_rule_file(text);
      FAIL("expected DuplicateRuleName");
    } catch (const RuleError& e) {
      CHECK(e.kind() == RuleErrorKind::duplicate_rule_name);
    }
  }
  SECTION("syntax error reports line and column") {
    try {
      parse_rule_file("Phase P\n");
      FAIL("expected syntax error");
    } catch (const RuleError& e) {
      CHECK(e.kind() == RuleErrorKind::syntax);
      CHECK(e.line() == 1);
    }
  }
}

namespace {

AnnotatedDocument lookup_doc() {
  auto doc = AnnotatedDocument::from_text("d", "", "pure SF6 gas flows");
  // SF6 token is index 1
  doc.add_annotation("Lookup",
                     {doc.tokens[1].span.start, doc.tokens[1].span.end},
                     {{"URI", std::string("u:SF6")},
                      {"class", std::string("substance")}});
  return doc;
}

}  // namespace

TEST_CASE("run_phase rewrites a lookup into matchOntology with its URI") {
  auto phases = parse_rule_file(kRenameRule);
  auto doc = lookup_doc();
  auto out = run_phase(phases[0], doc);
  REQUIRE(out.size() == 1);
  CHECK(out[0].type_name == "matchOntology");
  CHECK(doc.substring(out[0].span) == "SF6");
  CHECK(*out[0].string_feature("URI") == "u:SF6");
  CHECK(*out[0].string_feature("rule") == "RenameLookup");
}

TEST_CASE("constraint on a feature value") {
  const char* text =
      "Phase: P\nInput: Lookup\nOptions: control = appelt\n"
      "Rule: Substances\n({Lookup.class == \"substance\"}):m\n-->\n"
      ":m.Substance = { }\n";
  auto phases = parse_rule_file(text);
  auto doc = AnnotatedDocument::from_text("d", "", "gas container");
  doc.add_annotation("Lookup", {doc.tokens[0].span.start, doc.tokens[0].span.end},
                     {{"class", std::string("substance")}});
  doc.add_annotation("Lookup", {doc.tokens[1].span.start, doc.tokens[1].span.end},
                     {{"class", std::string("equipment")}});
  auto out = run_phase(phases[0], doc);
  REQUIRE(out.size() == 1);
  CHECK(doc.substring(out[0].span) == "gas");
}

TEST_CASE("appelt prefers the longest match over priority") {
  const char* text =
      "Phase: P\nInput: Token\nOptions: control = appelt\n"
      "Rule: A\nPriority: 10\n({Token.norm == \"a\"} {Token.norm == \"b\"}):m\n"
      "-->\n:m.A = { }\n"
      "Rule: B\nPriority: 1\n"
      "({Token.norm == \"a\"} {Token.norm == \"b\"} {Token.norm == \"c\"}):m\n"
      "-->\n:m.B = { }\n";
  auto phases = parse_rule_file(text);
  auto doc = AnnotatedDocument::from_text("d", "", "a b c");
  auto out = run_phase(phases[0], doc);
  REQUIRE(out.size() == 1);
  CHECK(out[0].type_name == "B");
}

TEST_CASE("no input annotations means no matches") {
  auto phases = parse_rule_file(kRenameRule);
  auto doc = AnnotatedDocument::from_text("d", "", "nothing to see here");
  CHECK(run_phase(phases[0], doc).empty());
}

TEST_CASE("quantifier bounds match exactly n to m repetitions") {
  for (std::size_t n = 0; n <= 2; ++n) {
    for (std::size_t m = n; m <= 3; ++m) {
      PatternNode child;
      child.kind = PatternNode::Kind::constraint;
      child.constraints.push_back(
          {"Token", "norm", ConstraintOp::eq, std::string("a")});
      PatternNode q;
      q.kind = PatternNode::Kind::quantified;
      q.min = n;
      q.max = m;
      q.children.push_back(child);
      RulePhase phase;
      phase.input_types = {"Token"};
      auto doc = AnnotatedDocument::from_text("d", "", "a a a a a");
      auto ends = oracle::oracle_ends(phase, doc, q, 0);
      for (std::size_t k = 0; k <= 5; ++k)
        CHECK(ends.count(k) == (k >= n && k <= std::min<std::size_t>(m, 5)));
      // engine agrees
      ruleeval::PhaseRunner runner(phase, doc);
      auto engine_ends = runner.match(q, 0);
      std::set<std::size_t> got;
      for (const auto& e : engine_ends) got.insert(e.end);
      CHECK(got == ends);
    }
  }
}

TEST_CASE("control all fires every distinct match") {
  const char* text =
      "Phase: P\nInput: Token\nOptions: control = all\n"
      "Rule: A\n({Token.norm == \"a\"}+):m\n-->\n:m.A = { }\n";
  auto phases = parse_rule_file(text);
  auto doc = AnnotatedDocument::from_text("d", "", "a a");
  auto out = run_phase(phases[0], doc);
  // [0,1) [0,2) [1,2)
  CHECK(out.size() == 3);
}

TEST_CASE("control first fires the first rule with its shortest match") {
  const char* text =
      "Phase: P\nInput: Token\nOptions: control = first\n"
      "Rule: A\n({Token.norm == \"a\"}+):m\n-->\n:m.A = { }\n"
      "Rule: B\n({Token.norm == \"a\"}):m\n-->\n:m.B = { }\n";
  auto phases = parse_rule_file(text);
  auto doc = AnnotatedDocument::from_text("d", "", "a a");
  auto out = run_phase(phases[0], doc);
  REQUIRE(out.size() == 2);
  CHECK(out[0].type_name == "A");
  CHECK(out[0].span.length() == 1);
  CHECK(out[1].type_name == "A");
}

TEST_CASE("cascade accumulates phase outputs in order") {
  const char* text =
      "Phase: One\nInput: Lookup\nOptions: control = appelt\n"
      "Rule: R1\n({Lookup}):m\n-->\n:m.Stage1 = { }\n"
      "Phase: Two\nInput: Stage1\nOptions: control = appelt\n"
      "Rule: R2\n({Stage1}):m\n-->\n:m.Stage2 = { }\n";
  auto phases = parse_rule_file(text);
  auto doc = lookup_doc();
  std::size_t before = doc.annotations.size();
  auto result = run_cascade(phases, doc);
  CHECK(result.annotations.size() == before + 2);
  CHECK(result.annotations_of("Stage1").size() == 1);
  CHECK(result.annotations_of("Stage2").size() == 1);

  SECTION("empty cascade leaves the document unchanged") {
    auto same = run_cascade({}, doc);
    CHECK(same.annotations.size() == doc.annotations.size());
  }
  SECTION("single phase cascade equals run_phase plus merge") {
    auto one = run_phase(phases[0], doc);
    auto via_cascade = run_cascade({phases[0]}, doc);
    REQUIRE(via_cascade.annotations.size() == before + one.size());
  }
}

TEST_CASE("run_phase is pure") {
  auto phases = parse_rule_file(kRenameRule);
  auto doc = lookup_doc();
  auto a = run_phase(phases[0], doc);
  auto b = run_phase(phases[0], doc);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].type_name == b[i].type_name);
    CHECK(a[i].span == b[i].span);
    CHECK(a[i].features == b[i].features);
  }
}

TEST_CASE("appelt equals the brute-force oracle on random cases") {
  std::mt19937 rng(60376);
  for (int round = 0; round < 400; ++round) {
    oracle::RandomCase rc = oracle::random_case(rng);
    auto selected = oracle::appelt_oracle(rc.phase, rc.doc);
    auto fired = run_phase(rc.phase, rc.doc);
    REQUIRE(fired.size() == selected.size());
    for (std::size_t i = 0; i < fired.size(); ++i) {
      const auto& expect = selected[i];
      CHECK(fired[i].type_name == rc.phase.rules[expect.rule_index].name);
      CHECK(fired[i].span.start == rc.doc.tokens[expect.start].span.start);
      CHECK(fired[i].span.end == rc.doc.tokens[expect.end - 1].span.end);
    }
  }
}
