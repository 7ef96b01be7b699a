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

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reqx/decimal.hpp"
#include "reqx/lexicon.hpp"
#include "reqx/reqextract.hpp"
#include "reqx/textmodel.hpp"

// Formal program in the RSML style: environment declarations plus context
// blocks of numbered statements, emitted both as the .rsml text document
// and as contract classes.

namespace reqx {

enum class FormalizeErrorKind {
  empty_identifier,
  unmangleable_subject,
  rsml_syntax,
  invalid_program,
};

class FormalizeError : public std::runtime_error {
 public:
  FormalizeError(FormalizeErrorKind kind, const std::string& what,
                 std::size_t line = 0)
      : std::runtime_error(what), kind_(kind), line_(line) {}
  FormalizeErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  FormalizeErrorKind kind_;
  std::size_t line_;
};

enum class BoundsKind { strict, inclusive };

struct EnvironmentDecl {
  std::string var;  // display form, "Toxicity of the gas"
  Decimal lower;
  Decimal upper;
  BoundsKind bounds = BoundsKind::strict;
  friend bool operator==(const EnvironmentDecl&,
                         const EnvironmentDecl&) = default;
};

enum class StatementKind { conditional_immediate, according_to, narrative };

struct FormalStatement {
  int number = 0;
  std::string context;  // owning block name
  StatementKind kind = StatementKind::narrative;
  std::string state_var;    // conditional_immediate
  std::string state_value;  // conditional_immediate
  std::string subject;
  Comparator comparator = Comparator::EQ;
  Decimal value;
  std::optional<std::string> unit_label;
  std::string authority;  // according_to
  std::string text;       // narrative
  friend bool operator==(const FormalStatement&,
                         const FormalStatement&) = default;
};

struct RsmlBlock {
  std::string name;
  std::vector<FormalStatement> statements;
  friend bool operator==(const RsmlBlock&, const RsmlBlock&) = default;
};

struct RsmlProgram {
  std::vector<EnvironmentDecl> environment;
  std::vector<RsmlBlock> blocks;
  friend bool operator==(const RsmlProgram&, const RsmlProgram&) = default;
};

// ---------------------------------------------------------------------------
// Identifier mangling

// Contract-level identifier: lowercase, articles dropped, digits spelled
// out against the preceding letter run (SF6 -> sfsix, H2O -> htwoo),
// separators become underscores. The result never contains a digit.
inline std::string mangle_identifier(std::string_view surface) {
  static const char* kDigitWords[] = {"zero", "one", "two",   "three", "four",
                                      "five", "six", "seven", "eight", "nine"};
  std::u32string in = utf8::decode(surface);
  std::vector<std::string> words;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (word != "the" && word != "a" && word != "an") words.push_back(word);
    word.clear();
  };
  for (char32_t raw : in) {
    char32_t c = chars::to_lower(chars::fold_subscript(raw));
    if (chars::is_ascii_digit(c)) {
      word += kDigitWords[c - U'0'];
    } else if (chars::is_letter(c)) {
      if (c < 0x80) {
        word.push_back(static_cast<char>(c));
      } else if (c == 0x00B5) {
        word.push_back('u');  // µl -> ul
      } else {
        utf8::append(word, c);
      }
    } else {
      flush();
    }
  }
  flush();
  std::string out;
  for (const std::string& w : words) {
    if (!out.empty()) out.push_back('_');
    out += w;
  }
  if (out.empty())
    throw FormalizeError(FormalizeErrorKind::empty_identifier,
                         "cannot mangle \"" + std::string(surface) +
                             "\" into an identifier");
  return out;
}

// RSML statement-text name: digits spelled in place, original letter case
// kept, first letter capitalized (SF6 -> SFsix, air -> Air).
inline std::string display_name(std::string_view surface) {
  static const char* kDigitWords[] = {"zero", "one", "two",   "three", "four",
                                      "five", "six", "seven", "eight", "nine"};
  std::u32string in = utf8::decode(surface);
  std::string out;
  for (char32_t raw : in) {
    char32_t c = chars::fold_subscript(raw);
    if (chars::is_ascii_digit(c))
      out += kDigitWords[c - U'0'];
    else
      utf8::append(out, c);
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] -= 32;
  return out;
}

inline std::string capitalize_first(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] -= 32;
  return out;
}

inline std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c -= 32;
  return out;
}

// ---------------------------------------------------------------------------
// Program construction

struct TableContextSpec {
  std::string context;    // matches TableRequirement.context
  std::string substance;  // surface name of the state variable, e.g. "CF4"
  std::string state;      // state label, e.g. "mixture" or "pure"
};

struct RsmlBuildConfig {
  BoundsKind bounds = BoundsKind::strict;
  std::vector<TableContextSpec> contexts;
  Decimal property_lower = Decimal::from_int(0);
  Decimal property_upper = Decimal::from_int(100);
  Decimal agent_lower = Decimal::from_int(0);
  Decimal agent_upper = Decimal::from_int(1);
};

namespace detail {

inline const char* rsml_unit_label(Unit u) {
  switch (u) {
    case Unit::percent_volume: return "percentage";
    case Unit::microlitre_per_litre: return "ul/l";
    case Unit::mg_per_kg: return "mg/kg";
    case Unit::ppmv: return "ppmv";
    case Unit::ppmw: return "ppmw";
    case Unit::celsius: return "celsius";
    case Unit::dimensionless: return nullptr;
  }
  return nullptr;
}

struct AtomView {
  const StructuredRequirement* atom = nullptr;
  std::string agent;     // preferred label, "supplier"
  std::string object;    // coordinated concept label, "gas" / "gas mixture"
  std::string property;  // property label, "toxicity"
  bool negated = false;  // surface carried a negation ("non-toxic")
  std::vector<std::string> authorities;
};

inline std::optional<AtomView> analyze_atom(const StructuredRequirement& atom,
                                            const Lexicon& lex) {
  AtomView view;
  view.atom = &atom;
  for (const ConceptSlot& slot : atom.concepts) {
    const ConceptEntry* entry = slot.uri ? lex.find(*slot.uri) : nullptr;
    if (!entry) continue;
    const std::string* label = entry->preferred_label();
    if (!label) continue;
    if (entry->class_name == "agent" && view.agent.empty()) {
      view.agent = *label;
    } else if (entry->class_name == "property" && view.property.empty()) {
      view.property = *label;
      std::string norm = Lexicon::normalize_label(slot.surface);
      view.negated = norm.rfind("non", 0) == 0;
    } else if (view.object.empty()) {
      view.object = *label;
    }
  }
  for (const std::string& condition : atom.conditions) {
    // "in accordance with international regulation" -> the authority
    const std::string prefix_a = "in accordance with ";
    const std::string prefix_c = "in conformance with ";
    if (condition.rfind(prefix_a, 0) == 0)
      view.authorities.push_back(condition.substr(prefix_a.size()));
    else if (condition.rfind(prefix_c, 0) == 0)
      view.authorities.push_back(condition.substr(prefix_c.size()));
  }
  if (view.object.empty() && view.property.empty()) return std::nullopt;
  return view;
}

}  // namespace detail

// Assembles the program: structured atoms first (narratives, the
// responsibility conditional, one according_to per authority per atom),
// then one conditional per table row under its context block.
inline RsmlProgram build_rsml(const std::vector<TableRequirement>& table_reqs,
                              const std::vector<StructuredRequirement>& atoms,
                              const Lexicon& lex,
                              const RsmlBuildConfig& config = {}) {
  RsmlProgram program;
  int number = 0;

  std::vector<detail::AtomView> views;
  for (const StructuredRequirement& atom : atoms) {
    auto view = detail::analyze_atom(atom, lex);
    if (view && !view->property.empty() && !view->object.empty())
      views.push_back(std::move(*view));
  }

  // environment: one property range per atom, one agent range per agent
  std::set<std::string> declared;
  for (const detail::AtomView& v : views) {
    std::string var = capitalize_first(v.property) + " of the " + v.object;
    if (declared.insert(var).second)
      program.environment.push_back(
          {var, config.property_lower, config.property_upper, config.bounds});
  }
  std::vector<std::string> agents;
  for (const detail::AtomView& v : views) {
    if (v.agent.empty()) continue;
    std::string var = "Responsibility of the " + v.agent;
    if (declared.insert(var).second) {
      program.environment.push_back(
          {var, config.agent_lower, config.agent_upper, config.bounds});
      agents.push_back(v.agent);
    }
  }

  // narrative block per agent: "The supplier provides the gas ."
  for (const std::string& agent : agents) {
    RsmlBlock block;
    block.name = upper_ascii(agent);
    for (const detail::AtomView& v : views) {
      if (v.agent != agent) continue;
      FormalStatement s;
      s.number = ++number;
      s.context = block.name;
      s.kind = StatementKind::narrative;
      s.text = "The " + agent + " provides the " + v.object + " .";
      block.statements.push_back(std::move(s));
    }
    program.blocks.push_back(std::move(block));
  }

  // responsibility conditional, tied to the first atom's property state
  for (const std::string& agent : agents) {
    const detail::AtomView* first = nullptr;
    for (const detail::AtomView& v : views)
      if (v.agent == agent && !first) first = &v;
    if (!first || !first->negated) continue;
    RsmlBlock block;
    block.name = "RESPONSIBILITY OF THE " + upper_ascii(agent);
    FormalStatement s;
    s.number = ++number;
    s.context = block.name;
    s.kind = StatementKind::conditional_immediate;
    s.state_var = first->property + " of the " + first->object;
    s.state_value = "0";
    s.subject = "the responsibility of the " + agent;
    s.comparator = Comparator::EQ;
    s.value = Decimal::from_int(0);
    block.statements.push_back(std::move(s));
    program.blocks.push_back(std::move(block));
  }

  // authority blocks, in order of first appearance
  std::vector<std::string> authorities;
  for (const detail::AtomView& v : views)
    for (const std::string& authority : v.authorities) {
      bool seen = false;
      for (const std::string& a : authorities)
        if (a == authority) seen = true;
      if (!seen) authorities.push_back(authority);
    }
  for (const std::string& authority : authorities) {
    RsmlBlock block;
    block.name = upper_ascii(authority);
    for (const detail::AtomView& v : views) {
      bool applies = false;
      for (const std::string& a : v.authorities)
        if (a == authority) applies = true;
      if (!applies || !v.negated) continue;
      FormalStatement s;
      s.number = ++number;
      s.context = block.name;
      s.kind = StatementKind::according_to;
      s.authority = authority;
      s.subject = v.property + " of the " + v.object;
      s.comparator = Comparator::EQ;
      s.value = Decimal::from_int(0);
      s.unit_label = "Percentage";
      block.statements.push_back(std::move(s));
    }
    if (!block.statements.empty()) program.blocks.push_back(std::move(block));
  }

  // table contexts, in first-appearance order
  std::vector<std::string> contexts;
  for (const TableRequirement& r : table_reqs) {
    bool seen = false;
    for (const std::string& c : contexts)
      if (c == r.context) seen = true;
    if (!seen) contexts.push_back(r.context);
  }
  for (const std::string& context : contexts) {
    const TableContextSpec* spec = nullptr;
    for (const TableContextSpec& s : config.contexts)
      if (s.context == context) spec = &s;
    std::string substance;
    std::string state = "mixture";
    if (spec) {
      substance = spec->substance;
      state = spec->state;
    } else {
      // first word of the context caption names the state variable
      auto tokens = tokenize(context);
      if (!tokens.empty()) substance = tokens.front().text;
    }
    if (substance.empty())
      throw FormalizeError(FormalizeErrorKind::unmangleable_subject,
                           "no state variable for table context \"" + context +
                               "\"");
    RsmlBlock block;
    block.name = display_name(substance) + "_" + upper_ascii(state);
    for (const TableRequirement& r : table_reqs) {
      if (r.context != context) continue;
      FormalStatement s;
      s.number = ++number;
      s.context = block.name;
      s.kind = StatementKind::conditional_immediate;
      s.state_var = display_name(substance);
      s.state_value = state;
      s.subject = display_name(r.substance_surface);
      s.comparator = r.comparator;
      s.value = r.quantity.value;
      if (const char* label = detail::rsml_unit_label(r.quantity.unit))
        s.unit_label = label;
      block.statements.push_back(std::move(s));
    }
    program.blocks.push_back(std::move(block));
  }
  return program;
}

// ---------------------------------------------------------------------------
// Emission

namespace detail {

inline const char* comparator_words(Comparator c) {
  switch (c) {
    case Comparator::GT: return "greater than";
    case Comparator::LT: return "less than";
    case Comparator::EQ: return "equal to";
    case Comparator::GE: return "at least";
    case Comparator::LE: return "at most";
  }
  return "?";
}

inline std::optional<Comparator> comparator_from_words(std::string_view w) {
  if (w == "greater than") return Comparator::GT;
  if (w == "less than") return Comparator::LT;
  if (w == "equal to") return Comparator::EQ;
  if (w == "at least") return Comparator::GE;
  if (w == "at most") return Comparator::LE;
  return std::nullopt;
}

inline std::string statement_tail(const FormalStatement& s) {
  std::string out = std::string("shall be ") + comparator_words(s.comparator) +
                    " " + s.value.str();
  if (s.unit_label) out += " [" + *s.unit_label + "]";
  out += " .";
  return out;
}

}  // namespace detail

inline std::string statement_line(const FormalStatement& s) {
  std::string head = "[" + std::to_string(s.number) + "]";
  switch (s.kind) {
    case StatementKind::narrative:
      return head + "\"" + s.text + "\"";
    case StatementKind::conditional_immediate:
      return head + " When the " + s.state_var + " is equal to " +
             s.state_value + " then immediately " + s.subject + " " +
             detail::statement_tail(s);
    case StatementKind::according_to:
      return head + " According to " + s.authority + " the " + s.subject +
             " " + detail::statement_tail(s);
  }
  return head;
}

// Deterministic text form. Inclusive bounds carry an explicit marker so
// that parsing the emitted text reconstructs the program exactly.
inline std::string emit_rsml(const RsmlProgram& program) {
  std::string out = "Environment:\n";
  for (const EnvironmentDecl& d : program.environment) {
    out += "- " + d.var + " is in " + d.lower.str() + " and " + d.upper.str();
    if (d.bounds == BoundsKind::inclusive) out += " inclusive";
    out += " .\n";
  }
  for (const RsmlBlock& block : program.blocks) {
    out += block.name + ":\n";
    for (const FormalStatement& s : block.statements)
      out += statement_line(s) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing (inverse of emit_rsml on its image)

namespace detail {

[[noreturn]] inline void rsml_fail(std::size_t line, const std::string& expected) {
  throw FormalizeError(FormalizeErrorKind::rsml_syntax,
                       "rsml line " + std::to_string(line) + ": expected " +
                           expected,
                       line);
}

inline Decimal parse_decimal_or_fail(std::string_view text, std::size_t line,
                                     const std::string& what) {
  auto d = Decimal::parse(text);
  if (!d) rsml_fail(line, what + " (got \"" + std::string(text) + "\")");
  return *d;
}

inline EnvironmentDecl parse_env_line(std::string_view body, std::size_t line) {
  EnvironmentDecl decl;
  std::string s(body);
  if (!s.ends_with(" .")) rsml_fail(line, "environment line ending in \" .\"");
  s.resize(s.size() - 2);
  if (s.ends_with(" inclusive")) {
    decl.bounds = BoundsKind::inclusive;
    s.resize(s.size() - 10);
  }
  std::size_t and_pos = s.rfind(" and ");
  if (and_pos == std::string::npos) rsml_fail(line, "\"and\" between bounds");
  std::string upper = s.substr(and_pos + 5);
  s.resize(and_pos);
  std::size_t isin_pos = s.rfind(" is in ");
  if (isin_pos == std::string::npos) rsml_fail(line, "\"is in\"");
  decl.var = s.substr(0, isin_pos);
  decl.lower = parse_decimal_or_fail(s.substr(isin_pos + 7), line, "lower bound");
  decl.upper = parse_decimal_or_fail(upper, line, "upper bound");
  if (!(decl.lower < decl.upper)) rsml_fail(line, "lower bound < upper bound");
  return decl;
}

// "<cmp words> <value>[ [<unit>]] ." after "shall be "
inline void parse_statement_tail(std::string_view tail, FormalStatement& s,
                                 std::size_t line) {
  std::string t(tail);
  if (!t.ends_with(" .")) rsml_fail(line, "statement ending in \" .\"");
  t.resize(t.size() - 2);
  if (t.ends_with("]")) {
    std::size_t open = t.rfind(" [");
    if (open == std::string::npos) rsml_fail(line, "unit label opening");
    s.unit_label = t.substr(open + 2, t.size() - open - 3);
    t.resize(open);
  }
  std::size_t value_pos = t.rfind(' ');
  if (value_pos == std::string::npos) rsml_fail(line, "comparator and value");
  std::string value = t.substr(value_pos + 1);
  std::string cmp = t.substr(0, value_pos);
  auto comparator = comparator_from_words(cmp);
  if (!comparator)
    rsml_fail(line, "comparator words (got \"" + cmp + "\")");
  s.comparator = *comparator;
  s.value = parse_decimal_or_fail(value, line, "numeric value");
}

inline FormalStatement parse_statement_line(std::string_view body,
                                            std::size_t line,
                                            const std::string& context) {
  FormalStatement s;
  s.context = context;
  std::string text(body);
  if (text.empty() || text[0] != '[') rsml_fail(line, "'[' statement number");
  std::size_t close = text.find(']');
  if (close == std::string::npos) rsml_fail(line, "']' after number");
  try {
    s.number = std::stoi(text.substr(1, close - 1));
  } catch (...) {
    rsml_fail(line, "integer statement number");
  }
  std::string rest = text.substr(close + 1);
  if (!rest.empty() && rest[0] == '"') {
    if (rest.size() < 2 || rest.back() != '"')
      rsml_fail(line, "closing quote for narrative");
    s.kind = StatementKind::narrative;
    s.text = rest.substr(1, rest.size() - 2);
    return s;
  }
  const std::string when_prefix = " When the ";
  const std::string according_prefix = " According to ";
  if (rest.rfind(when_prefix, 0) == 0) {
    s.kind = StatementKind::conditional_immediate;
    std::string tail = rest.substr(when_prefix.size());
    std::size_t eq = tail.find(" is equal to ");
    if (eq == std::string::npos) rsml_fail(line, "\"is equal to\"");
    s.state_var = tail.substr(0, eq);
    tail = tail.substr(eq + 13);
    std::size_t then_pos = tail.find(" then immediately ");
    if (then_pos == std::string::npos) rsml_fail(line, "\"then immediately\"");
    s.state_value = tail.substr(0, then_pos);
    tail = tail.substr(then_pos + 18);
    std::size_t shall = tail.find(" shall be ");
    if (shall == std::string::npos) rsml_fail(line, "\"shall be\"");
    s.subject = tail.substr(0, shall);
    parse_statement_tail(tail.substr(shall + 10), s, line);
    return s;
  }
  if (rest.rfind(according_prefix, 0) == 0) {
    s.kind = StatementKind::according_to;
    std::string tail = rest.substr(according_prefix.size());
    std::size_t the_pos = tail.find(" the ");
    if (the_pos == std::string::npos) rsml_fail(line, "\"the\" after authority");
    s.authority = tail.substr(0, the_pos);
    tail = tail.substr(the_pos + 5);
    std::size_t shall = tail.find(" shall be ");
    if (shall == std::string::npos) rsml_fail(line, "\"shall be\"");
    s.subject = tail.substr(0, shall);
    parse_statement_tail(tail.substr(shall + 10), s, line);
    return s;
  }
  rsml_fail(line, "narrative, \"When the\" or \"According to\"");
}

}  // namespace detail

inline RsmlProgram parse_rsml(std::string_view text) {
  RsmlProgram program;
  std::vector<std::string> lines;
  std::string current;
  for (char c : std::string(text)) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  if (lines.empty() || lines[0] != "Environment:")
    detail::rsml_fail(1, "\"Environment:\" header");

  RsmlBlock* block = nullptr;
  int expected_number = 1;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    std::size_t lineno = i + 1;
    if (line.empty()) continue;
    if (line.rfind("- ", 0) == 0) {
      if (block) detail::rsml_fail(lineno, "no declarations after blocks");
      program.environment.push_back(
          detail::parse_env_line(line.substr(2), lineno));
      continue;
    }
    if (line.back() == ':') {
      std::string name = line.substr(0, line.size() - 1);
      for (const RsmlBlock& b : program.blocks)
        if (b.name == name) detail::rsml_fail(lineno, "unique block name");
      program.blocks.push_back({name, {}});
      block = &program.blocks.back();
      continue;
    }
    if (!block) detail::rsml_fail(lineno, "block header before statements");
    FormalStatement s = detail::parse_statement_line(line, lineno, block->name);
    if (s.number != expected_number)
      detail::rsml_fail(lineno, "statement number " +
                                    std::to_string(expected_number));
    ++expected_number;
    block->statements.push_back(std::move(s));
  }
  return program;
}

// ---------------------------------------------------------------------------
// Validation warnings (source inconsistencies kept visible)

// A statement pinning a variable to a strict bound's endpoint is kept
// as-is and reported, never silently fixed.
inline std::vector<std::string> bound_warnings(const RsmlProgram& program) {
  std::vector<std::string> warnings;
  auto check = [&](const std::string& name, const Decimal& value,
                   const FormalStatement& s) {
    std::string mangled;
    try {
      mangled = mangle_identifier(name);
    } catch (const FormalizeError&) {
      return;
    }
    for (const EnvironmentDecl& d : program.environment) {
      if (mangle_identifier(d.var) != mangled) continue;
      if (d.bounds != BoundsKind::strict) continue;
      if (value <= d.lower || value >= d.upper)
        warnings.push_back(
            "statement [" + std::to_string(s.number) + "] sets " + mangled +
            " to " + value.str() + " but \"" + d.var + " is in " +
            d.lower.str() + " and " + d.upper.str() +
            "\" is strict and excludes it");
    }
  };
  for (const RsmlBlock& block : program.blocks) {
    for (const FormalStatement& s : block.statements) {
      if (s.kind == StatementKind::narrative) continue;
      if (s.comparator == Comparator::EQ) check(s.subject, s.value, s);
    }
  }
  return warnings;
}

// ---------------------------------------------------------------------------
// Contract emission

namespace detail {

inline std::string sanitize_number(const Decimal& d) {
  std::string out;
  for (char c : d.str()) {
    if (c == '.') out.push_back('_');
    else if (c == '-') out += "neg";
    else out.push_back(c);
  }
  return out;
}

// feature-name fragment: lowercase, separators to underscores, digits kept
inline std::string sanitize_phrase(std::string_view s) {
  std::string folded = normalize_text(s);
  std::string out;
  for (char c : folded) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out.push_back(c);
    else if (out.empty() || out.back() != '_') out.push_back('_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

inline std::string comparator_snake(Comparator c) {
  std::string words = comparator_words(c);
  for (char& ch : words)
    if (ch == ' ') ch = '_';
  return words;
}

inline const char* comparator_op(Comparator c) {
  switch (c) {
    case Comparator::GT: return ">";
    case Comparator::LT: return "<";
    case Comparator::GE: return ">=";
    case Comparator::LE: return "<=";
    case Comparator::EQ: return "=";
  }
  return "?";
}

// documentation feature label, '.' already sanitized to '_'
inline std::string statement_label(const FormalStatement& s) {
  switch (s.kind) {
    case StatementKind::narrative:
      return "requirement_" + std::to_string(s.number);
    case StatementKind::conditional_immediate:
      return "when_" + sanitize_phrase(s.state_var) + "_is_" +
             sanitize_phrase(s.state_value) + "_then_immediately_" +
             sanitize_phrase(s.subject) + "_should_be_" +
             comparator_snake(s.comparator) + "_" + sanitize_number(s.value);
    case StatementKind::according_to:
      return "according_to_" + sanitize_phrase(s.authority) + "_the_" +
             sanitize_phrase(s.subject) + "_should_be_" +
             comparator_snake(s.comparator) + "_" + sanitize_number(s.value);
  }
  return "requirement_" + std::to_string(s.number);
}

}  // namespace detail

// Three deterministic artifacts: domain_knowledge.e with one attribute and
// one invariant per environment declaration, requirements_documentation.e
// with one STRING feature per statement, and one deferred requirements
// class per block. Feature names sanitize '.' to '_': the generated
// sources stay within common identifier grammars.
inline std::map<std::string, std::string> emit_contracts(
    const RsmlProgram& program) {
  std::map<std::string, std::string> files;

  // domain_knowledge.e
  {
    std::string out;
    out += "note\n";
    out += "    description: \"[\n";
    out += "        This class contains the domain knowledge that will be "
           "used by requirements.\n";
    out += "    ]\"\n";
    out += "class DOMAIN_KNOWLEDGE\n";
    out += "feature\n";
    for (const EnvironmentDecl& d : program.environment)
      out += "    " + mangle_identifier(d.var) + " : DOUBLE\n";
    if (!program.environment.empty()) {
      out += "invariant\n";
      for (const EnvironmentDecl& d : program.environment) {
        std::string var = mangle_identifier(d.var);
        const char* lo_op = d.bounds == BoundsKind::strict ? ">" : ">=";
        const char* hi_op = d.bounds == BoundsKind::strict ? "<" : "<=";
        out += "    " + var + "_is_in_" + detail::sanitize_number(d.lower) +
               "_and_" + detail::sanitize_number(d.upper) + ": " + var + " " +
               lo_op + " " + d.lower.str() + " and " + var + " " + hi_op +
               " " + d.upper.str() + "\n";
      }
    }
    out += "end\n";
    files["domain_knowledge.e"] = out;
  }

  // stable, collision-free feature labels
  std::map<const FormalStatement*, std::string> labels;
  {
    std::set<std::string> used;
    for (const RsmlBlock& block : program.blocks) {
      for (const FormalStatement& s : block.statements) {
        std::string label = detail::statement_label(s);
        if (!used.insert(label).second) {
          label += "_" + std::to_string(s.number);
          used.insert(label);
        }
        labels[&s] = label;
      }
    }
  }

  // requirements_documentation.e
  {
    std::string out;
    out += "note\n";
    out += "  description: \"[\n";
    out += "    This class contains the documentation of all requirements.\n";
    out += "  ]\"\n";
    out += "class REQUIREMENTS_DOCUMENTATION\n";
    out += "feature -- Requirements\n";
    for (const RsmlBlock& block : program.blocks) {
      for (const FormalStatement& s : block.statements) {
        out += "  " + labels[&s] + "_doc: STRING\n";
        out += "  note\n";
        out += "    doc: \"true\"\n";
        out += "  do\n";
        out += "    Result := \"[\n";
        out += "      " + statement_line(s) + "\n";
        out += "    ]\"\n";
        out += "  end\n";
        out += "\n";
      }
    }
    out += "end\n";
    files["requirements_documentation.e"] = out;
  }

  // one requirements class per block
  std::set<std::string> env_vars;
  for (const EnvironmentDecl& d : program.environment)
    env_vars.insert(mangle_identifier(d.var));

  for (const RsmlBlock& block : program.blocks) {
    std::string mangled_block = mangle_identifier(block.name);
    std::string out;
    out += "note\n";
    out += "  description: \"[\n";
    out += "    This class contains requirements in the context of: " +
           block.name + ".\n";
    out += "  ]\"\n";
    out += "class " + upper_ascii(mangled_block) + "_REQUIREMENTS\n";
    out += "inherit\n";
    out += "  DOMAIN_KNOWLEDGE\n";
    out += "feature\n";
    out += "  -- For temporal requirements\n";
    out += "  duration: DOUBLE\n";

    // symbolic states, enumerated in order of first use
    std::vector<std::string> states;
    for (const FormalStatement& s : block.statements) {
      if (s.kind != StatementKind::conditional_immediate) continue;
      if (Decimal::parse(s.state_value)) continue;  // numeric states inline
      bool seen = false;
      for (const std::string& st : states)
        if (st == s.state_value) seen = true;
      if (!seen) states.push_back(s.state_value);
    }
    out += "\n  -- States range\n";
    for (std::size_t i = 0; i < states.size(); ++i)
      out += "  " + mangle_identifier(states[i]) + " : DOUBLE = " +
             std::to_string(i + 1) + "\n";

    // block-local variables not covered by the environment
    std::vector<std::string> locals;
    auto add_local = [&](const std::string& phrase) {
      std::string mangled;
      try {
        mangled = mangle_identifier(phrase);
      } catch (const FormalizeError&) {
        return;
      }
      if (env_vars.count(mangled)) return;
      for (const std::string& l : locals)
        if (l == mangled) return;
      locals.push_back(mangled);
    };
    for (const FormalStatement& s : block.statements) {
      if (s.kind == StatementKind::narrative) continue;
      if (s.kind == StatementKind::conditional_immediate)
        add_local(s.state_var);
      add_local(s.subject);
    }
    out += "\n  -- States\n";
    for (const std::string& local : locals)
      out += "  " + local + " : DOUBLE\n";

    out += "\nfeature -- Requirements\n";
    for (const FormalStatement& s : block.statements) {
      const std::string& label = labels[&s];
      out += "\n  " + label + "\n";
      out += "  note\n";
      out += "    doc:\n";
      out += "      \"{REQUIREMENTS_DOCUMENTATION}." + label + "_doc\"\n";
      if (s.kind == StatementKind::conditional_immediate) {
        std::string state_expr = Decimal::parse(s.state_value)
                                     ? s.state_value
                                     : mangle_identifier(s.state_value);
        out += "  require\n";
        out += "    when_" + detail::sanitize_phrase(s.state_var) +
               "_is_equal_to_" + detail::sanitize_phrase(s.state_value) +
               ": (" + mangle_identifier(s.state_var) + " = " + state_expr +
               ")\n";
      }
      out += "  deferred\n";
      if (s.kind != StatementKind::narrative) {
        std::string check = "check_" + mangle_identifier(s.subject) +
                            "_shall_be_" + detail::comparator_snake(s.comparator) +
                            "_" + detail::sanitize_number(s.value);
        if (s.unit_label)
          check += "_" + detail::sanitize_phrase(*s.unit_label);
        out += "  ensure\n";
        out += "    " + check + ": (" + mangle_identifier(s.subject) + " " +
               detail::comparator_op(s.comparator) + " " + s.value.str() +
               ")\n";
      }
      out += "  end\n";
    }
    out += "\nend\n";
    files[mangled_block + "_requirements.e"] = out;
  }
  return files;
}

}  // namespace reqx
