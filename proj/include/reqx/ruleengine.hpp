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

#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reqx/textmodel.hpp"

// A cascaded annotation-pattern engine in the JAPE tradition: phases of
// rules whose left-hand side is a regular pattern over the token stream,
// with covering annotations acting as predicates on token positions, and
// whose right-hand side creates new annotations from bound sub-matches.

namespace reqx {

enum class ConstraintOp { exists, eq, neq };

struct FeatureConstraint {
  std::string ann_type;
  std::string feature;       // empty for exists
  ConstraintOp op = ConstraintOp::exists;
  FeatureValue value;        // unused for exists
};

struct PatternNode {
  enum class Kind { constraint, sequence, alternation, quantified, binding };
  Kind kind = Kind::constraint;
  std::vector<FeatureConstraint> constraints;  // constraint
  std::vector<PatternNode> children;           // all composite kinds
  std::size_t min = 1;                         // quantified
  std::optional<std::size_t> max = 1;          // nullopt = unbounded
  std::string label;                           // binding
};

struct ActionFeature {
  std::string name;
  bool is_copy = false;
  FeatureValue literal;      // when !is_copy
  std::string copy_label;    // when is_copy: :label.Type.feature
  std::string copy_ann_type;
  std::string copy_feature;
};

struct Action {
  std::string binding;
  std::string out_type;
  std::vector<ActionFeature> features;
};

struct Rule {
  std::string name;
  int priority = 0;
  PatternNode lhs;
  std::vector<Action> rhs;
};

enum class PhaseControl { appelt, all, first };

struct RulePhase {
  std::string name;
  std::set<std::string> input_types;
  PhaseControl control = PhaseControl::appelt;
  std::vector<Rule> rules;
};

enum class RuleErrorKind {
  syntax,
  unknown_control,
  duplicate_rule_name,
  unbound_label,
};

class RuleError : public std::runtime_error {
 public:
  RuleError(RuleErrorKind kind, std::size_t line, std::size_t col,
            const std::string& expected)
      : std::runtime_error("rule file " + std::to_string(line) + ":" +
                           std::to_string(col) + ": expected " + expected),
        kind_(kind), line_(line), col_(col), expected_(expected) {}
  RuleErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  RuleErrorKind kind_;
  std::size_t line_, col_;
  std::string expected_;
};

namespace ruledsl {

struct Tok {
  enum class Type { ident, number, string, punct, eof };
  Type type = Type::eof;
  std::string text;
  std::size_t line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Tok& peek() const { return current_; }

  Tok next() {
    Tok t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws_and_comments();
    current_ = Tok{};
    current_.line = line_;
    current_.col = col_;
    if (pos_ >= src_.size()) {
      current_.type = Tok::Type::eof;
      return;
    }
    char c = src_[pos_];
    if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos_ < src_.size() &&
             (isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_'))
        text.push_back(take());
      current_.type = Tok::Type::ident;
      current_.text = std::move(text);
      return;
    }
    if (isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '-' &&
         isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::string text;
      text.push_back(take());
      while (pos_ < src_.size() &&
             (isdigit(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '.'))
        text.push_back(take());
      current_.type = Tok::Type::number;
      current_.text = std::move(text);
      return;
    }
    if (c == '"') {
      take();
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) take();
        text.push_back(take());
      }
      if (pos_ >= src_.size())
        throw RuleError(RuleErrorKind::syntax, current_.line, current_.col,
                        "closing quote");
      take();
      current_.type = Tok::Type::string;
      current_.text = std::move(text);
      return;
    }
    // multi-char operators first
    if (src_.compare(pos_, 3, "-->") == 0) {
      current_.type = Tok::Type::punct;
      current_.text = "-->";
      take(); take(); take();
      return;
    }
    if (src_.compare(pos_, 2, "==") == 0 || src_.compare(pos_, 2, "!=") == 0) {
      current_.type = Tok::Type::punct;
      current_.text = src_.substr(pos_, 2);
      take(); take();
      return;
    }
    current_.type = Tok::Type::punct;
    current_.text = std::string(1, take());
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
        take();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else {
        break;
      }
    }
  }

  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1, col_ = 1;
  Tok current_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  std::vector<RulePhase> parse_file() {
    std::vector<RulePhase> phases;
    while (lex_.peek().type != Tok::Type::eof) phases.push_back(parse_phase());
    return phases;
  }

 private:
  [[noreturn]] void fail(const Tok& at, const std::string& expected,
                         RuleErrorKind kind = RuleErrorKind::syntax) {
    throw RuleError(kind, at.line, at.col, expected);
  }

  Tok expect_ident(const std::string& what) {
    Tok t = lex_.next();
    if (t.type != Tok::Type::ident) fail(t, what);
    return t;
  }

  void expect_punct(const std::string& p) {
    Tok t = lex_.next();
    if (t.type != Tok::Type::punct || t.text != p) fail(t, "'" + p + "'");
  }

  void expect_keyword(const std::string& kw) {
    Tok t = lex_.next();
    if (t.type != Tok::Type::ident || t.text != kw) fail(t, "'" + kw + ":'");
    expect_punct(":");
  }

  bool peek_keyword(const std::string& kw) const {
    return lex_.peek().type == Tok::Type::ident && lex_.peek().text == kw;
  }

  RulePhase parse_phase() {
    RulePhase phase;
    expect_keyword("Phase");
    phase.name = expect_ident("phase name").text;
    expect_keyword("Input");
    std::size_t input_line = lex_.peek().line;
    if (lex_.peek().type != Tok::Type::ident)
      fail(lex_.peek(), "annotation type after Input:");
    while (lex_.peek().type == Tok::Type::ident &&
           lex_.peek().line == input_line &&
           lex_.peek().text != "Options" && lex_.peek().text != "Rule")
      phase.input_types.insert(lex_.next().text);
    expect_keyword("Options");
    Tok ctl = expect_ident("'control'");
    if (ctl.text != "control") fail(ctl, "'control'");
    expect_punct("=");
    Tok mode = expect_ident("appelt, all or first");
    if (mode.text == "appelt") phase.control = PhaseControl::appelt;
    else if (mode.text == "all") phase.control = PhaseControl::all;
    else if (mode.text == "first") phase.control = PhaseControl::first;
    else fail(mode, "appelt, all or first", RuleErrorKind::unknown_control);

    while (peek_keyword("Rule")) {
      Rule rule = parse_rule();
      for (const Rule& r : phase.rules)
        if (r.name == rule.name)
          fail(lex_.peek(), "unique rule name (" + rule.name + ")",
               RuleErrorKind::duplicate_rule_name);
      phase.rules.push_back(std::move(rule));
    }
    if (phase.rules.empty() && !peek_keyword("Phase") &&
        lex_.peek().type != Tok::Type::eof)
      fail(lex_.peek(), "'Rule:' or 'Phase:'");
    return phase;
  }

  Rule parse_rule() {
    Rule rule;
    expect_keyword("Rule");
    rule.name = expect_ident("rule name").text;
    if (peek_keyword("Priority")) {
      expect_keyword("Priority");
      Tok n = lex_.next();
      if (n.type != Tok::Type::number) fail(n, "integer priority");
      rule.priority = std::stoi(n.text);
    }
    labels_.clear();
    rule.lhs = parse_alternation();
    Tok arrow = lex_.next();
    if (arrow.type != Tok::Type::punct || arrow.text != "-->")
      fail(arrow, "'-->'");
    rule.rhs.push_back(parse_action());
    while (lex_.peek().type == Tok::Type::punct && lex_.peek().text == ",") {
      lex_.next();
      rule.rhs.push_back(parse_action());
    }
    for (const Action& action : rule.rhs) {
      if (!labels_.count(action.binding))
        fail(lex_.peek(), "bound label :" + action.binding,
             RuleErrorKind::unbound_label);
      for (const ActionFeature& f : action.features)
        if (f.is_copy && !labels_.count(f.copy_label))
          fail(lex_.peek(), "bound label :" + f.copy_label,
               RuleErrorKind::unbound_label);
    }
    return rule;
  }

  PatternNode parse_alternation() {
    PatternNode first = parse_sequence();
    if (!(lex_.peek().type == Tok::Type::punct && lex_.peek().text == "|"))
      return first;
    PatternNode alt;
    alt.kind = PatternNode::Kind::alternation;
    alt.children.push_back(std::move(first));
    while (lex_.peek().type == Tok::Type::punct && lex_.peek().text == "|") {
      lex_.next();
      alt.children.push_back(parse_sequence());
    }
    return alt;
  }

  PatternNode parse_sequence() {
    PatternNode seq;
    seq.kind = PatternNode::Kind::sequence;
    while (true) {
      const Tok& t = lex_.peek();
      if (t.type == Tok::Type::punct && (t.text == "{" || t.text == "("))
        seq.children.push_back(parse_quantified());
      else
        break;
    }
    if (seq.children.empty()) fail(lex_.peek(), "'{' or '('");
    if (seq.children.size() == 1) return std::move(seq.children.front());
    return seq;
  }

  PatternNode parse_quantified() {
    PatternNode inner = parse_primary();
    const Tok& t = lex_.peek();
    if (t.type != Tok::Type::punct) return inner;
    PatternNode q;
    q.kind = PatternNode::Kind::quantified;
    if (t.text == "*") {
      lex_.next();
      q.min = 0;
      q.max = std::nullopt;
    } else if (t.text == "+") {
      lex_.next();
      q.min = 1;
      q.max = std::nullopt;
    } else if (t.text == "?") {
      lex_.next();
      q.min = 0;
      q.max = 1;
    } else if (t.text == "[") {
      lex_.next();
      Tok lo = lex_.next();
      if (lo.type != Tok::Type::number) fail(lo, "lower bound");
      expect_punct(",");
      Tok hi = lex_.next();
      if (hi.type != Tok::Type::number) fail(hi, "upper bound");
      expect_punct("]");
      q.min = static_cast<std::size_t>(std::stoul(lo.text));
      q.max = static_cast<std::size_t>(std::stoul(hi.text));
      if (q.min > *q.max) fail(hi, "min <= max in quantifier bounds");
    } else {
      return inner;
    }
    q.children.push_back(std::move(inner));
    return q;
  }

  PatternNode parse_primary() {
    Tok t = lex_.next();
    if (t.type == Tok::Type::punct && t.text == "{") return parse_constraints();
    if (t.type == Tok::Type::punct && t.text == "(") {
      PatternNode inner = parse_alternation();
      expect_punct(")");
      if (lex_.peek().type == Tok::Type::punct && lex_.peek().text == ":") {
        lex_.next();
        Tok label = expect_ident("binding label");
        if (!labels_.insert(label.text).second)
          fail(label, "unique binding label (" + label.text + ")");
        PatternNode b;
        b.kind = PatternNode::Kind::binding;
        b.label = label.text;
        b.children.push_back(std::move(inner));
        return b;
      }
      return inner;
    }
    fail(t, "'{' or '('");
  }

  // inside braces: Type | Type.feature == value | Type.feature != value,
  // comma-separated, all required at one token position
  PatternNode parse_constraints() {
    PatternNode node;
    node.kind = PatternNode::Kind::constraint;
    while (true) {
      FeatureConstraint fc;
      fc.ann_type = expect_ident("annotation type").text;
      if (lex_.peek().type == Tok::Type::punct && lex_.peek().text == ".") {
        lex_.next();
        fc.feature = expect_ident("feature name").text;
        Tok op = lex_.next();
        if (op.type != Tok::Type::punct || (op.text != "==" && op.text != "!="))
          fail(op, "'==' or '!='");
        fc.op = op.text == "==" ? ConstraintOp::eq : ConstraintOp::neq;
        Tok v = lex_.next();
        if (v.type == Tok::Type::string)
          fc.value = v.text;
        else if (v.type == Tok::Type::number)
          fc.value = std::stod(v.text);
        else
          fail(v, "string or number value");
      }
      node.constraints.push_back(std::move(fc));
      Tok t = lex_.next();
      if (t.type == Tok::Type::punct && t.text == ",") continue;
      if (t.type == Tok::Type::punct && t.text == "}") break;
      fail(t, "',' or '}'");
    }
    return node;
  }

  Action parse_action() {
    Action action;
    expect_punct(":");
    action.binding = expect_ident("binding label").text;
    expect_punct(".");
    action.out_type = expect_ident("output annotation type").text;
    expect_punct("=");
    expect_punct("{");
    if (lex_.peek().type == Tok::Type::punct && lex_.peek().text == "}") {
      lex_.next();
      return action;
    }
    while (true) {
      ActionFeature f;
      f.name = expect_ident("feature name").text;
      expect_punct("=");
      Tok v = lex_.next();
      if (v.type == Tok::Type::string) {
        f.literal = v.text;
      } else if (v.type == Tok::Type::number) {
        f.literal = std::stod(v.text);
      } else if (v.type == Tok::Type::punct && v.text == ":") {
        f.is_copy = true;
        f.copy_label = expect_ident("binding label").text;
        expect_punct(".");
        f.copy_ann_type = expect_ident("annotation type").text;
        expect_punct(".");
        f.copy_feature = expect_ident("feature name").text;
      } else {
        fail(v, "literal or :label.Type.feature");
      }
      action.features.push_back(std::move(f));
      Tok t = lex_.next();
      if (t.type == Tok::Type::punct && t.text == ",") continue;
      if (t.type == Tok::Type::punct && t.text == "}") break;
      fail(t, "',' or '}'");
    }
    return action;
  }

  Lexer lex_;
  std::set<std::string> labels_;
};

}  // namespace ruledsl

inline std::vector<RulePhase> parse_rule_file(std::string_view text) {
  return ruledsl::Parser(text).parse_file();
}

namespace ruleeval {

// token-index range bound by a label, end exclusive
using Bindings = std::map<std::string, std::pair<std::size_t, std::size_t>>;

struct MatchEnd {
  std::size_t end = 0;
  Bindings bindings;
};

inline void merge_binding(Bindings& into, const std::string& label,
                          std::size_t begin, std::size_t end) {
  auto [it, inserted] = into.try_emplace(label, begin, end);
  if (!inserted) {
    it->second.first = std::min(it->second.first, begin);
    it->second.second = std::max(it->second.second, end);
  }
}

inline void merge_bindings(Bindings& into, const Bindings& from) {
  for (const auto& [label, range] : from)
    merge_binding(into, label, range.first, range.second);
}

// Evaluates phases over one document. Patterns traverse the token stream;
// annotations whose type is listed in Input act as predicates on the token
// positions they cover. "Token" is built in (features kind, text, norm)
// but must still be listed in Input to be visible, as in JAPE.
class PhaseRunner {
 public:
  PhaseRunner(const RulePhase& phase, const AnnotatedDocument& doc)
      : phase_(phase), doc_(doc) {
    covering_.resize(doc.tokens.size());
    for (const Annotation& a : doc.annotations) {
      if (!phase.input_types.count(a.type_name)) continue;
      for (std::size_t i = doc.token_index_at(a.span.start);
           i < doc.tokens.size() && doc.tokens[i].span.end <= a.span.end; ++i)
        covering_[i].push_back(&a);
    }
  }

  std::vector<Annotation> run() {
    switch (phase_.control) {
      case PhaseControl::appelt: return run_appelt();
      case PhaseControl::all: return run_all();
      case PhaseControl::first: return run_first();
    }
    return {};
  }

  // all ends (preference-ordered, deduped) for a node at a position
  const std::vector<MatchEnd>& match(const PatternNode& node,
                                     std::size_t pos) {
    auto key = std::make_pair(&node, pos);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<MatchEnd> results = compute(node, pos);
    return memo_.emplace(key, std::move(results)).first->second;
  }

 private:
  std::vector<MatchEnd> compute(const PatternNode& node, std::size_t pos) {
    std::vector<MatchEnd> out;
    switch (node.kind) {
      case PatternNode::Kind::constraint: {
        if (pos < doc_.tokens.size() && constraints_hold(node, pos))
          out.push_back({pos + 1, {}});
        break;
      }
      case PatternNode::Kind::sequence: {
        std::vector<MatchEnd> frontier = {{pos, {}}};
        for (const PatternNode& child : node.children) {
          std::vector<MatchEnd> next;
          for (const MatchEnd& m : frontier) {
            for (const MatchEnd& cm : match(child, m.end)) {
              MatchEnd combined = cm;
              merge_bindings(combined.bindings, m.bindings);
              next.push_back(std::move(combined));
            }
          }
          // per-end dedupe keeps the frontier linear in the token count;
          // the first (most preferred) parse per end survives
          frontier = dedupe(std::move(next));
          if (frontier.empty()) break;
        }
        out = std::move(frontier);
        break;
      }
      case PatternNode::Kind::alternation: {
        for (const PatternNode& child : node.children)
          for (const MatchEnd& m : match(child, pos)) out.push_back(m);
        out = dedupe(std::move(out));
        break;
      }
      case PatternNode::Kind::quantified: {
        const PatternNode& child = node.children.front();
        // levels[k] = states reachable after k repetitions
        std::vector<std::vector<MatchEnd>> levels;
        levels.push_back({{pos, {}}});
        std::size_t hard_cap = node.max ? *node.max
                                        : doc_.tokens.size() - pos + 1;
        while (levels.size() <= hard_cap) {
          std::vector<MatchEnd> next;
          for (const MatchEnd& m : levels.back()) {
            for (const MatchEnd& cm : match(child, m.end)) {
              if (cm.end == m.end) continue;  // no progress, no loop
              MatchEnd combined = cm;
              merge_bindings(combined.bindings, m.bindings);
              next.push_back(std::move(combined));
            }
          }
          next = dedupe(std::move(next));
          if (next.empty()) break;
          levels.push_back(std::move(next));
        }
        // greedy: more repetitions first
        for (std::size_t k = levels.size(); k-- > 0;) {
          if (k < node.min) break;
          for (const MatchEnd& m : levels[k]) out.push_back(m);
        }
        out = dedupe(std::move(out));
        break;
      }
      case PatternNode::Kind::binding: {
        for (const MatchEnd& m : match(node.children.front(), pos)) {
          MatchEnd bound = m;
          if (m.end > pos) merge_binding(bound.bindings, node.label, pos, m.end);
          out.push_back(std::move(bound));
        }
        break;
      }
    }
    return out;
  }

  // keep first occurrence per end offset (input is preference-ordered)
  static std::vector<MatchEnd> dedupe(std::vector<MatchEnd> in) {
    std::vector<MatchEnd> out;
    std::set<std::size_t> seen;
    for (MatchEnd& m : in)
      if (seen.insert(m.end).second) out.push_back(std::move(m));
    return out;
  }

  bool constraints_hold(const PatternNode& node, std::size_t i) const {
    for (const FeatureConstraint& fc : node.constraints)
      if (!constraint_holds(fc, i)) return false;
    return true;
  }

  bool constraint_holds(const FeatureConstraint& fc, std::size_t i) const {
    if (fc.ann_type == "Token" && phase_.input_types.count("Token")) {
      if (fc.op == ConstraintOp::exists) return true;
      const Token& t = doc_.tokens[i];
      std::string actual;
      if (fc.feature == "kind") actual = to_string(t.kind);
      else if (fc.feature == "text") actual = t.text;
      else if (fc.feature == "norm") actual = t.norm;
      else return fc.op == ConstraintOp::neq;
      bool equal = std::holds_alternative<std::string>(fc.value) &&
                   std::get<std::string>(fc.value) == actual;
      return fc.op == ConstraintOp::eq ? equal : !equal;
    }
    for (const Annotation* a : covering_[i]) {
      if (a->type_name != fc.ann_type) continue;
      if (fc.op == ConstraintOp::exists) return true;
      auto it = a->features.find(fc.feature);
      if (fc.op == ConstraintOp::eq) {
        if (it != a->features.end() && it->second == fc.value) return true;
      } else {
        if (it == a->features.end() || !(it->second == fc.value)) return true;
      }
    }
    return false;
  }

  struct Candidate {
    std::size_t start = 0, end = 0;
    const Rule* rule = nullptr;
    std::size_t rule_index = 0;
    Bindings bindings;
  };

  // longest match of a rule at a position, if any
  std::optional<Candidate> longest_at(const Rule& rule, std::size_t idx,
                                      std::size_t pos) {
    const auto& ends = match(rule.lhs, pos);
    std::optional<Candidate> best;
    for (const MatchEnd& m : ends) {
      if (m.end <= pos) continue;  // zero-length matches never fire
      if (!best || m.end > best->end)
        best = Candidate{pos, m.end, &rule, idx, m.bindings};
    }
    return best;
  }

  std::vector<Annotation> run_appelt() {
    std::vector<Annotation> out;
    std::size_t pos = 0;
    while (pos < doc_.tokens.size()) {
      std::optional<Candidate> best;
      for (std::size_t r = 0; r < phase_.rules.size(); ++r) {
        auto c = longest_at(phase_.rules[r], r, pos);
        if (!c) continue;
        if (!best || c->end > best->end ||
            (c->end == best->end &&
             (c->rule->priority > best->rule->priority ||
              (c->rule->priority == best->rule->priority &&
               c->rule_index < best->rule_index))))
          best = std::move(c);
      }
      if (!best) {
        ++pos;
        continue;
      }
      fire(*best, out);
      pos = best->end;
    }
    return out;
  }

  std::vector<Annotation> run_all() {
    std::vector<Annotation> out;
    for (std::size_t pos = 0; pos < doc_.tokens.size(); ++pos) {
      for (std::size_t r = 0; r < phase_.rules.size(); ++r) {
        for (const MatchEnd& m : match(phase_.rules[r].lhs, pos)) {
          if (m.end <= pos) continue;
          fire({pos, m.end, &phase_.rules[r], r, m.bindings}, out);
        }
      }
    }
    // set semantics: identical (type, span, features) collapse
    std::vector<Annotation> unique;
    for (Annotation& a : out) {
      bool dup = false;
      for (const Annotation& u : unique)
        if (u.type_name == a.type_name && u.span == a.span &&
            u.features == a.features)
          dup = true;
      if (!dup) unique.push_back(std::move(a));
    }
    return unique;
  }

  std::vector<Annotation> run_first() {
    std::vector<Annotation> out;
    std::size_t pos = 0;
    while (pos < doc_.tokens.size()) {
      std::optional<Candidate> chosen;
      for (std::size_t r = 0; r < phase_.rules.size() && !chosen; ++r) {
        const auto& ends = match(phase_.rules[r].lhs, pos);
        std::optional<MatchEnd> shortest;
        for (const MatchEnd& m : ends) {
          if (m.end <= pos) continue;
          if (!shortest || m.end < shortest->end) shortest = m;
        }
        if (shortest)
          chosen = Candidate{pos, shortest->end, &phase_.rules[r], r,
                             shortest->bindings};
      }
      if (!chosen) {
        ++pos;
        continue;
      }
      fire(*chosen, out);
      pos = chosen->end;
    }
    return out;
  }

  void fire(const Candidate& c, std::vector<Annotation>& out) {
    for (const Action& action : c.rule->rhs) {
      auto bound = c.bindings.find(action.binding);
      if (bound == c.bindings.end()) continue;  // label in unmatched branch
      Span span{doc_.tokens[bound->second.first].span.start,
                doc_.tokens[bound->second.second - 1].span.end};
      Annotation a;
      a.type_name = action.out_type;
      a.span = span;
      for (const ActionFeature& f : action.features) {
        if (!f.is_copy) {
          a.features[f.name] = f.literal;
          continue;
        }
        auto src_bound = c.bindings.find(f.copy_label);
        if (src_bound == c.bindings.end()) continue;
        Span src_span{doc_.tokens[src_bound->second.first].span.start,
                      doc_.tokens[src_bound->second.second - 1].span.end};
        const Annotation* source = find_copy_source(f.copy_ann_type, src_span);
        if (!source) continue;
        auto feat = source->features.find(f.copy_feature);
        if (feat != source->features.end()) a.features[f.name] = feat->second;
      }
      out.push_back(std::move(a));
    }
  }

  // the input annotation of the given type with the largest overlap with
  // the bound span; earliest start, then lowest id, breaks ties
  const Annotation* find_copy_source(const std::string& type,
                                     const Span& span) const {
    const Annotation* best = nullptr;
    std::size_t best_overlap = 0;
    for (const Annotation& a : doc_.annotations) {
      if (a.type_name != type || !phase_.input_types.count(type)) continue;
      if (!a.span.overlaps(span)) continue;
      std::size_t overlap = std::min(a.span.end, span.end) -
                            std::max(a.span.start, span.start);
      if (!best || overlap > best_overlap ||
          (overlap == best_overlap &&
           (a.span.start < best->span.start ||
            (a.span.start == best->span.start && a.id < best->id)))) {
        best = &a;
        best_overlap = overlap;
      }
    }
    return best;
  }

  const RulePhase& phase_;
  const AnnotatedDocument& doc_;
  std::vector<std::vector<const Annotation*>> covering_;
  std::map<std::pair<const PatternNode*, std::size_t>, std::vector<MatchEnd>>
      memo_;
};

}  // namespace ruleeval

// New annotations produced by one phase; not merged into the document and
// not visible to later rules of the same phase.
inline std::vector<Annotation> run_phase(const RulePhase& phase,
                                         const AnnotatedDocument& doc) {
  return ruleeval::PhaseRunner(phase, doc).run();
}

// Phases applied in order, each seeing everything the previous ones added.
inline AnnotatedDocument run_cascade(const std::vector<RulePhase>& phases,
                                     AnnotatedDocument doc) {
  for (const RulePhase& phase : phases)
    doc.merge_annotations(run_phase(phase, doc));
  return doc;
}

}  // namespace reqx
