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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reqx/csv.hpp"
#include "reqx/decimal.hpp"
#include "reqx/lexicon.hpp"
#include "reqx/textmodel.hpp"

// Requirement sentence detection and decomposition. A sentence counts as a
// requirement exactly when it carries at least one glossary concept and at
// least one deontic marker; sentences that are requirements but lack both
// signals are missed by construction, and false positives with both
// signals are kept.

namespace reqx {

enum class StatementClass {
  requirement,
  external_constraint,
  recommendation,
  permission,
  possibility,
  statement,
};

// detection strength; requirement outranks everything
inline int strength(StatementClass c) {
  switch (c) {
    case StatementClass::requirement: return 5;
    case StatementClass::external_constraint: return 4;
    case StatementClass::recommendation: return 3;
    case StatementClass::permission: return 2;
    case StatementClass::possibility: return 1;
    case StatementClass::statement: return 0;
  }
  return 0;
}

inline const char* to_string(StatementClass c) {
  switch (c) {
    case StatementClass::requirement: return "requirement";
    case StatementClass::external_constraint: return "external_constraint";
    case StatementClass::recommendation: return "recommendation";
    case StatementClass::permission: return "permission";
    case StatementClass::possibility: return "possibility";
    case StatementClass::statement: return "statement";
  }
  return "?";
}

inline std::optional<StatementClass> statement_class_from(std::string_view s) {
  if (s == "requirement") return StatementClass::requirement;
  if (s == "external_constraint") return StatementClass::external_constraint;
  if (s == "recommendation") return StatementClass::recommendation;
  if (s == "permission") return StatementClass::permission;
  if (s == "possibility") return StatementClass::possibility;
  if (s == "statement") return StatementClass::statement;
  return std::nullopt;
}

enum class ExtractErrorKind {
  not_a_requirement,
  unparsable_quantity,
  unknown_unit,
  incompatible_units,
  comparator_missing,
  quantity_mismatch,
  invalid_value,
  bad_row,
};

class ExtractError : public std::runtime_error {
 public:
  ExtractError(ExtractErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ExtractErrorKind kind() const { return kind_; }

 private:
  ExtractErrorKind kind_;
};

// Marker phrases ("shall", "shall not", "guarantee") to statement class,
// keyed by normalized token sequence. "must" is Directives-speak for an
// external constraint but still requirement-strength for detection.
class DeonticLexicon {
 public:
  static DeonticLexicon defaults() {
    DeonticLexicon d;
    d.add("shall", StatementClass::requirement);
    d.add("shall not", StatementClass::requirement);
    d.add("should", StatementClass::recommendation);
    d.add("should not", StatementClass::recommendation);
    d.add("may", StatementClass::permission);
    d.add("can", StatementClass::possibility);
    d.add("cannot", StatementClass::possibility);
    d.add("must", StatementClass::external_constraint);
    d.add("guarantee", StatementClass::requirement);
    return d;
  }

  // CSV: header marker,class
  static DeonticLexicon load_csv(const std::vector<csv::Record>& rows) {
    DeonticLexicon d;
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"marker", "class"})
      throw ExtractError(ExtractErrorKind::bad_row,
                         "deontic lexicon: header must be marker,class");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].fields.size() != 2)
        throw ExtractError(ExtractErrorKind::bad_row,
                           "deontic lexicon line " +
                               std::to_string(rows[i].line) +
                               ": expected marker,class");
      auto cls = statement_class_from(rows[i].fields[1]);
      if (!cls || *cls == StatementClass::statement)
        throw ExtractError(ExtractErrorKind::bad_row,
                           "deontic lexicon line " +
                               std::to_string(rows[i].line) +
                               ": unknown class " + rows[i].fields[1]);
      d.add(rows[i].fields[0], *cls);
    }
    if (d.entries_.empty())
      throw ExtractError(ExtractErrorKind::bad_row, "deontic lexicon: empty");
    return d;
  }

  void add(std::string_view phrase, StatementClass cls) {
    std::string norm = Lexicon::normalize_label(phrase);
    std::size_t tokens = 1 + std::count(norm.begin(), norm.end(), ' ');
    entries_[norm] = cls;
    max_tokens_ = std::max(max_tokens_, tokens);
  }

  const std::map<std::string, StatementClass>& entries() const {
    return entries_;
  }
  std::size_t max_tokens() const { return max_tokens_; }

 private:
  std::map<std::string, StatementClass> entries_;
  std::size_t max_tokens_ = 1;
};

struct DeonticMatch {
  Span span;
  std::string surface;
  std::string phrase;  // normalized
  StatementClass cls = StatementClass::statement;
  bool negative = false;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> sentence_token_range(
    const AnnotatedDocument& doc, const SentenceSpan& sentence) {
  std::size_t first = doc.token_index_at(sentence.span.start);
  std::size_t last = first;
  while (last < doc.tokens.size() &&
         doc.tokens[last].span.end <= sentence.span.end)
    ++last;
  return {first, last};
}

}  // namespace detail

// Longest-match scan for deontic markers inside one sentence.
inline std::vector<DeonticMatch> find_deontic_markers(
    const AnnotatedDocument& doc, const SentenceSpan& sentence,
    const DeonticLexicon& deontic) {
  std::vector<DeonticMatch> out;
  auto [first, last] = detail::sentence_token_range(doc, sentence);
  std::size_t i = first;
  while (i < last) {
    std::size_t best_len = 0;
    const StatementClass* best_cls = nullptr;
    std::string best_phrase;
    std::string key;
    for (std::size_t len = 1; len <= deontic.max_tokens() && i + len <= last;
         ++len) {
      if (len == 1) {
        key = doc.tokens[i].norm;
      } else {
        key.push_back(' ');
        key += doc.tokens[i + len - 1].norm;
      }
      auto it = deontic.entries().find(key);
      if (it != deontic.entries().end()) {
        best_len = len;
        best_cls = &it->second;
        best_phrase = key;
      }
    }
    if (best_cls) {
      DeonticMatch m;
      m.span = {doc.tokens[i].span.start, doc.tokens[i + best_len - 1].span.end};
      m.surface = doc.substring(m.span);
      m.phrase = best_phrase;
      m.cls = *best_cls;
      m.negative = best_phrase.size() >= 4 &&
                   (best_phrase.ends_with(" not") || best_phrase == "cannot");
      out.push_back(std::move(m));
      i += best_len;
    } else {
      ++i;
    }
  }
  return out;
}

inline std::vector<const Annotation*> lookups_in_sentence(
    const AnnotatedDocument& doc, const SentenceSpan& sentence) {
  std::vector<const Annotation*> out;
  for (const Annotation& a : doc.annotations)
    if (a.type_name == "Lookup" && sentence.span.contains(a.span))
      out.push_back(&a);
  std::sort(out.begin(), out.end(), [](const Annotation* a, const Annotation* b) {
    return a->span < b->span;
  });
  return out;
}

// Detection rule: concept AND deontic marker, else statement.
// With both present the strongest marker decides the class.
inline StatementClass classify_sentence(const AnnotatedDocument& doc,
                                        const SentenceSpan& sentence,
                                        const DeonticLexicon& deontic) {
  if (lookups_in_sentence(doc, sentence).empty())
    return StatementClass::statement;
  auto markers = find_deontic_markers(doc, sentence, deontic);
  StatementClass best = StatementClass::statement;
  for (const DeonticMatch& m : markers)
    if (strength(m.cls) > strength(best)) best = m.cls;
  return best;
}

struct ConceptSlot {
  std::optional<std::string> uri;
  std::string surface;
  Span span;  // document offsets
};

struct StructuredRequirement {
  std::string req_id;
  std::string doc_id;
  Span sentence_span;
  std::string sentence_text;
  StatementClass classification = StatementClass::statement;
  std::vector<std::string> distinguish_features;
  std::vector<ConceptSlot> concepts;
  std::vector<std::string> conditions;
};

namespace detail {

// References like "international regulation" inside an "in accordance
// with ..." clause. "international and local regulations" names two.
struct RegulationClause {
  std::vector<std::string> references;  // singular form, source order
  bool pure = false;  // clause is nothing but the regulation coordination
};

inline RegulationClause parse_regulation_clause(
    const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  RegulationClause clause;
  for (std::size_t i = begin; i < end; ++i) {
    if (tokens[i].norm != "regulation" && tokens[i].norm != "regulations")
      continue;
    // walk back over "adjA and adjB" directly before the noun
    std::vector<std::string> adjs;
    std::size_t j = i;
    while (j > begin && tokens[j - 1].kind == TokenKind::word &&
           tokens[j - 1].norm != "and" && tokens[j - 1].norm != "the") {
      adjs.push_back(tokens[j - 1].norm);
      --j;
      if (j > begin + 1 && tokens[j - 1].norm == "and" &&
          tokens[j - 2].kind == TokenKind::word && tokens[j - 2].norm != "the")
        --j;  // step over the "and" to the next conjunct
      else
        break;
    }
    std::reverse(adjs.begin(), adjs.end());
    if (adjs.empty())
      clause.references.push_back("regulation");
    for (const std::string& a : adjs)
      clause.references.push_back(a + " regulation");
  }
  // purity: every clause token is part of the coordination pattern
  bool pure = !clause.references.empty();
  for (std::size_t i = begin; i < end && pure; ++i) {
    const std::string& n = tokens[i].norm;
    bool coordinate = n == "and" || n == "the" || n == "regulation" ||
                      n == "regulations" || n == ",";
    if (coordinate) continue;
    bool is_adjective = false;
    for (const std::string& r : clause.references)
      if (r.substr(0, r.find(' ')) == n) is_adjective = true;
    if (!is_adjective) pure = false;
  }
  clause.pure = pure;
  return clause;
}

inline std::string to_upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'a' && c <= 'z') c -= 32;
  return out;
}

}  // namespace detail

// Decomposes one requirement sentence into the row model: distinguish
// features (markers + regulation references), concept slots in surface
// order, and "in accordance/conformance with" conditions.
inline StructuredRequirement extract_structured(
    const AnnotatedDocument& doc, const SentenceSpan& sentence,
    const DeonticLexicon& deontic, [[maybe_unused]] const Lexicon& lex) {
  StructuredRequirement req;
  req.classification = classify_sentence(doc, sentence, deontic);
  if (req.classification == StatementClass::statement)
    throw ExtractError(ExtractErrorKind::not_a_requirement,
                       "sentence " + std::to_string(sentence.index) +
                           " lacks a concept or a deontic marker");
  req.req_id = "R" + std::to_string(sentence.index + 1);
  req.doc_id = doc.doc_id;
  req.sentence_span = sentence.span;
  req.sentence_text = doc.substring(sentence.span);

  auto markers = find_deontic_markers(doc, sentence, deontic);
  for (const DeonticMatch& m : markers)
    req.distinguish_features.push_back(detail::to_upper_ascii(m.surface));

  // regulation-reference patterns over the sentence tokens
  auto [first, last] = detail::sentence_token_range(doc, sentence);
  const auto& tokens = doc.tokens;
  for (std::size_t i = first; i + 2 < last; ++i) {
    if (tokens[i].norm != "in") continue;
    const std::string& link = tokens[i + 1].norm;
    if (link != "accordance" && link != "conformance") continue;
    if (tokens[i + 2].norm != "with") continue;
    std::size_t clause_begin = i + 3;
    std::size_t clause_end = clause_begin;
    while (clause_end < last && tokens[clause_end].kind != TokenKind::punctuation)
      ++clause_end;
    auto clause = detail::parse_regulation_clause(tokens, clause_begin,
                                                  clause_end);
    if (clause.references.empty()) continue;
    if (clause.pure) {
      std::string joined;
      for (std::size_t r = 0; r < clause.references.size(); ++r) {
        if (r) joined += " and ";
        joined += clause.references[r];
      }
      req.distinguish_features.push_back("in conformance with (" + joined +
                                         ")");
    } else {
      for (const std::string& r : clause.references)
        req.distinguish_features.push_back(r);
    }
    for (const std::string& r : clause.references)
      req.conditions.push_back("in accordance with " + r);
  }

  for (const Annotation* a : lookups_in_sentence(doc, sentence)) {
    ConceptSlot slot;
    if (const std::string* uri = a->string_feature("URI")) slot.uri = *uri;
    slot.surface = doc.substring(a->span);
    slot.span = a->span;
    req.concepts.push_back(std::move(slot));
  }
  if (req.concepts.empty() && req.distinguish_features.empty())
    throw ExtractError(ExtractErrorKind::not_a_requirement,
                       "no concepts and no distinguish features");
  return req;
}

// Coordinated concepts ("gas or gas mixture") expand into one atomic
// requirement per branch; atom count is the product of the branch counts
// and every atom keeps all conditions.
inline std::vector<StructuredRequirement> split_coordination(
    const StructuredRequirement& req) {
  if (req.concepts.size() < 2) return {req};
  auto tokens = tokenize(req.sentence_text);
  std::size_t base = req.sentence_span.start;

  auto gap_is_coordination = [&](const ConceptSlot& a, const ConceptSlot& b) {
    bool any = false;
    for (const Token& t : tokens) {
      std::size_t abs_start = base + t.span.start;
      std::size_t abs_end = base + t.span.end;
      if (abs_start < a.span.end || abs_end > b.span.start) continue;
      if (t.norm != "or" && t.norm != "and" && t.norm != "," && t.norm != "/")
        return false;
      if (t.norm == "or" || t.norm == "and") any = true;
    }
    return any;
  };

  // group adjacent coordinated concepts
  std::vector<std::vector<ConceptSlot>> groups;
  for (const ConceptSlot& slot : req.concepts) {
    if (!groups.empty() &&
        gap_is_coordination(groups.back().back(), slot))
      groups.back().push_back(slot);
    else
      groups.push_back({slot});
  }
  bool split_needed = false;
  for (const auto& g : groups)
    if (g.size() > 1) split_needed = true;
  if (!split_needed) return {req};

  std::vector<StructuredRequirement> atoms;
  std::vector<std::size_t> choice(groups.size(), 0);
  while (true) {
    StructuredRequirement atom = req;
    atom.concepts.clear();
    for (std::size_t g = 0; g < groups.size(); ++g)
      atom.concepts.push_back(groups[g][choice[g]]);
    atom.req_id = req.req_id + "." + std::to_string(atoms.size() + 1);
    atoms.push_back(std::move(atom));
    // advance the counter, last group fastest
    std::size_t g = groups.size();
    while (g-- > 0) {
      if (++choice[g] < groups[g].size()) break;
      choice[g] = 0;
      if (g == 0) return atoms;
    }
  }
}

// ---------------------------------------------------------------------------
// Quantities and requirement tables

enum class Unit {
  percent_volume,
  microlitre_per_litre,
  ppmv,
  mg_per_kg,
  ppmw,
  celsius,
  dimensionless,
};

inline const char* to_string(Unit u) {
  switch (u) {
    case Unit::percent_volume: return "percent_volume";
    case Unit::microlitre_per_litre: return "microlitre_per_litre";
    case Unit::ppmv: return "ppmv";
    case Unit::mg_per_kg: return "mg_per_kg";
    case Unit::ppmw: return "ppmw";
    case Unit::celsius: return "celsius";
    case Unit::dimensionless: return "dimensionless";
  }
  return "?";
}

inline std::optional<Unit> unit_from(std::string_view s) {
  if (s == "percent_volume") return Unit::percent_volume;
  if (s == "microlitre_per_litre") return Unit::microlitre_per_litre;
  if (s == "ppmv") return Unit::ppmv;
  if (s == "mg_per_kg") return Unit::mg_per_kg;
  if (s == "ppmw") return Unit::ppmw;
  if (s == "celsius") return Unit::celsius;
  if (s == "dimensionless") return Unit::dimensionless;
  return std::nullopt;
}

struct Quantity {
  Decimal value;
  Unit unit = Unit::dimensionless;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

// "99,7 % volume" -> 99.7 percent_volume; "1 500 µl/l" -> 1500 µl/l.
// Parentheticals belong to the table parser, not here.
inline Quantity parse_quantity(std::string_view text) {
  auto tokens = tokenize(text);
  std::size_t i = 0;
  bool negative = false;
  if (i < tokens.size() && tokens[i].kind == TokenKind::symbol &&
      tokens[i].text == "-") {
    negative = true;
    ++i;
  }
  if (i >= tokens.size() || tokens[i].kind != TokenKind::number)
    throw ExtractError(ExtractErrorKind::unparsable_quantity,
                       "no numeric value in \"" + std::string(text) + "\"");
  auto value = Decimal::parse(tokens[i].norm);
  if (!value)
    throw ExtractError(ExtractErrorKind::unparsable_quantity,
                       "bad number \"" + tokens[i].text + "\"");
  ++i;

  std::vector<std::string> unit_norms;
  for (; i < tokens.size(); ++i) unit_norms.push_back(tokens[i].norm);

  auto is = [&](std::initializer_list<const char*> pattern) {
    if (unit_norms.size() != pattern.size()) return false;
    std::size_t k = 0;
    for (const char* p : pattern)
      if (unit_norms[k++] != p) return false;
    return true;
  };

  Quantity q;
  q.value = negative ? Decimal::from_parts(-value->mantissa(), value->scale())
                     : *value;
  if (unit_norms.empty())
    q.unit = Unit::dimensionless;
  else if (is({"%"}) || is({"%", "volume"}) || is({"%", "by", "volume"}) ||
           is({"%", "vol"}))
    q.unit = Unit::percent_volume;
  else if (is({"µl", "/", "l"}) || is({"ul", "/", "l"}))
    q.unit = Unit::microlitre_per_litre;
  else if (is({"ppmv"}))
    q.unit = Unit::ppmv;
  else if (is({"mg", "/", "kg"}))
    q.unit = Unit::mg_per_kg;
  else if (is({"ppmw"}))
    q.unit = Unit::ppmw;
  else if (is({"°", "c"}) || is({"°c"}))
    q.unit = Unit::celsius;
  else {
    std::string got;
    for (const auto& n : unit_norms) got += n + " ";
    throw ExtractError(ExtractErrorKind::unknown_unit,
                       "unknown unit \"" + got + "\" in \"" +
                           std::string(text) + "\"");
  }
  return q;
}

// Exact conversion: µl/l <-> ppmv and mg/kg <-> ppmw are identities,
// percent by volume <-> ppm shifts four decimal digits.
inline Quantity convert_unit(const Quantity& q, Unit target) {
  if (q.unit == target) return q;
  auto family = [](Unit u) {
    switch (u) {
      case Unit::percent_volume:
      case Unit::microlitre_per_litre:
      case Unit::ppmv: return 1;
      case Unit::mg_per_kg:
      case Unit::ppmw: return 2;
      case Unit::celsius: return 3;
      case Unit::dimensionless: return 4;
    }
    return 0;
  };
  if (family(q.unit) != family(target) || family(q.unit) == 3 ||
      family(q.unit) == 4)
    throw ExtractError(ExtractErrorKind::incompatible_units,
                       std::string("cannot convert ") + to_string(q.unit) +
                           " to " + to_string(target));
  int shift = 0;
  if (q.unit == Unit::percent_volume) shift += 4;   // % -> ppm
  if (target == Unit::percent_volume) shift -= 4;   // ppm -> %
  return Quantity{q.value.shifted(shift), target};
}

enum class Comparator { GT, LT, GE, LE, EQ };

inline const char* to_string(Comparator c) {
  switch (c) {
    case Comparator::GT: return "GT";
    case Comparator::LT: return "LT";
    case Comparator::GE: return "GE";
    case Comparator::LE: return "LE";
    case Comparator::EQ: return "EQ";
  }
  return "?";
}

inline std::optional<Comparator> comparator_from(std::string_view s) {
  if (s == "GT") return Comparator::GT;
  if (s == "LT") return Comparator::LT;
  if (s == "GE") return Comparator::GE;
  if (s == "LE") return Comparator::LE;
  if (s == "EQ") return Comparator::EQ;
  return std::nullopt;
}

struct TableRequirement {
  std::string context;
  std::optional<std::string> substance_uri;
  std::string substance_surface;
  Comparator comparator = Comparator::LT;
  Quantity quantity;
  std::optional<Quantity> alt_quantity;  // the "(i.e. ...)" equivalent
};

namespace detail {

// leading comparator of a constraint cell; symbols or the standard's
// word forms (GREATER THAN, SMALLER THAN, ...)
inline std::optional<std::pair<Comparator, std::size_t>> scan_comparator(
    const std::vector<Token>& tokens) {
  if (tokens.empty()) return std::nullopt;
  const std::string& t0 = tokens[0].norm;
  if (t0 == ">") {
    if (tokens.size() > 1 && tokens[1].norm == "=")
      return std::make_pair(Comparator::GE, std::size_t{2});
    return std::make_pair(Comparator::GT, std::size_t{1});
  }
  if (t0 == "<") {
    if (tokens.size() > 1 && tokens[1].norm == "=")
      return std::make_pair(Comparator::LE, std::size_t{2});
    return std::make_pair(Comparator::LT, std::size_t{1});
  }
  if (t0 == "≥") return std::make_pair(Comparator::GE, std::size_t{1});
  if (t0 == "≤") return std::make_pair(Comparator::LE, std::size_t{1});
  if (t0 == "=") return std::make_pair(Comparator::EQ, std::size_t{1});
  if (tokens.size() > 1) {
    const std::string& t1 = tokens[1].norm;
    if (t0 == "greater" && t1 == "than")
      return std::make_pair(Comparator::GT, std::size_t{2});
    if ((t0 == "smaller" || t0 == "less") && t1 == "than")
      return std::make_pair(Comparator::LT, std::size_t{2});
    if (t0 == "at" && t1 == "least")
      return std::make_pair(Comparator::GE, std::size_t{2});
    if (t0 == "at" && t1 == "most")
      return std::make_pair(Comparator::LE, std::size_t{2});
    if (t0 == "equal" && t1 == "to")
      return std::make_pair(Comparator::EQ, std::size_t{2});
  }
  return std::nullopt;
}

}  // namespace detail

// One record per substance row of a requirement table. The constraint
// cell reads like "< 1 500 µl/l (i.e. 1 500 ppmv)"; the parenthetical is
// kept as alt_quantity and must agree exactly after unit conversion.
inline std::vector<TableRequirement> parse_requirement_table(
    const std::vector<csv::Record>& rows, const std::string& context,
    const Lexicon& lex) {
  if (rows.empty() ||
      rows.front().fields != std::vector<std::string>{"substance", "constraint"})
    throw ExtractError(ExtractErrorKind::bad_row,
                       "table: header must be substance,constraint");
  std::vector<TableRequirement> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.empty()) continue;
    std::string substance_norm = Lexicon::normalize_label(f[0]);
    if (substance_norm.empty() || substance_norm.rfind("key", 0) == 0)
      continue;  // the "Key ppmv = ..." footer row
    if (f.size() != 2)
      throw ExtractError(ExtractErrorKind::bad_row,
                         "table line " + std::to_string(rows[r].line) +
                             ": expected substance,constraint");

    TableRequirement record;
    record.context = context;
    record.substance_surface = f[0];
    if (const std::string* uri = lex.uri_for_label(f[0]))
      record.substance_uri = *uri;

    const std::string& cell = f[1];
    std::string main_part = cell;
    std::string paren_part;
    std::size_t open = cell.find('(');
    if (open != std::string::npos) {
      main_part = cell.substr(0, open);
      std::size_t close = cell.find(')', open);
      paren_part = cell.substr(
          open + 1, close == std::string::npos ? std::string::npos
                                               : close - open - 1);
    }

    auto tokens = tokenize(main_part);
    auto comparator = detail::scan_comparator(tokens);
    if (!comparator)
      throw ExtractError(ExtractErrorKind::comparator_missing,
                         "table line " + std::to_string(rows[r].line) +
                             ": no comparator in \"" + cell + "\"");
    record.comparator = comparator->first;
    std::string value_text;
    for (std::size_t t = comparator->second; t < tokens.size(); ++t) {
      if (!value_text.empty()) value_text.push_back(' ');
      value_text += tokens[t].text;
    }
    record.quantity = parse_quantity(value_text);
    if (record.quantity.unit != Unit::celsius &&
        record.quantity.unit != Unit::dimensionless &&
        !(record.quantity.value > Decimal::from_int(0)))
      throw ExtractError(ExtractErrorKind::invalid_value,
                         "table line " + std::to_string(rows[r].line) +
                             ": concentration must be positive");

    if (!paren_part.empty()) {
      auto ptokens = tokenize(paren_part);
      // strip "i.e." or "=" markers
      std::size_t skip = 0;
      while (skip < ptokens.size() &&
             (ptokens[skip].norm == "i" || ptokens[skip].norm == "e" ||
              ptokens[skip].norm == "." || ptokens[skip].norm == "=" ||
              ptokens[skip].norm == "ie"))
        ++skip;
      std::string alt_text;
      for (std::size_t t = skip; t < ptokens.size(); ++t) {
        if (!alt_text.empty()) alt_text.push_back(' ');
        alt_text += ptokens[t].text;
      }
      if (!alt_text.empty()) {
        Quantity alt = parse_quantity(alt_text);
        Quantity converted = convert_unit(record.quantity, alt.unit);
        if (!(converted == alt))
          throw ExtractError(
              ExtractErrorKind::quantity_mismatch,
              "table line " + std::to_string(rows[r].line) +
                  ": parenthetical " + alt.value.str() + " " +
                  to_string(alt.unit) + " disagrees with " +
                  converted.value.str() + " " + to_string(converted.unit));
        record.alt_quantity = alt;
      }
    }
    out.push_back(std::move(record));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vague wording lint

struct VagueTermReport {
  Span sentence_span;
  std::vector<std::pair<std::string, std::string>> flagged;  // term, reason
};

inline std::vector<std::string> default_vague_terms() {
  return {"certain",   "carefully", "deliberate", "specific",
          "proper",    "typically", "mainly",     "wherever possible"};
}

inline constexpr const char* kVagueReason =
    "ambiguous modifier — Directives conformance risk";

inline VagueTermReport flag_vague_terms(
    const AnnotatedDocument& doc, const SentenceSpan& sentence,
    const std::vector<std::string>& vague_terms = default_vague_terms()) {
  VagueTermReport report;
  report.sentence_span = sentence.span;
  std::map<std::string, std::size_t> phrases;  // normalized -> token count
  std::size_t max_len = 1;
  for (const std::string& term : vague_terms) {
    std::string norm = Lexicon::normalize_label(term);
    std::size_t len = 1 + std::count(norm.begin(), norm.end(), ' ');
    phrases[norm] = len;
    max_len = std::max(max_len, len);
  }
  auto [first, last] = detail::sentence_token_range(doc, sentence);
  std::size_t i = first;
  while (i < last) {
    std::size_t matched = 0;
    std::string matched_phrase;
    std::string key;
    for (std::size_t len = 1; len <= max_len && i + len <= last; ++len) {
      if (len == 1) {
        key = doc.tokens[i].norm;
      } else {
        key.push_back(' ');
        key += doc.tokens[i + len - 1].norm;
      }
      if (phrases.count(key)) {
        matched = len;
        matched_phrase = key;
      }
    }
    if (matched) {
      report.flagged.emplace_back(matched_phrase, kVagueReason);
      i += matched;
    } else {
      ++i;
    }
  }
  return report;
}

}  // namespace reqx
