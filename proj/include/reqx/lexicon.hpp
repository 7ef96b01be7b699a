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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reqx/csv.hpp"
#include "reqx/textmodel.hpp"

namespace reqx {

enum class LexiconErrorKind {
  bad_row,
  duplicate_uri,
  duplicate_label,
  missing_english_label,
  dangling_parent,
  cyclic_hierarchy,
  unknown_uri,
};

class LexiconError : public std::runtime_error {
 public:
  LexiconError(LexiconErrorKind kind, std::string uri, const std::string& what)
      : std::runtime_error(what), kind_(kind), uri_(std::move(uri)) {}
  LexiconErrorKind kind() const { return kind_; }
  const std::string& uri() const { return uri_; }

 private:
  LexiconErrorKind kind_;
  std::string uri_;
};

struct ConceptLabel {
  std::string lang;  // "en" or "fr"
  std::string text;
  bool preferred = false;
};

struct ConceptEntry {
  std::string uri;
  std::string class_name;  // substance, property, equipment, regulation, ...
  std::vector<ConceptLabel> labels;
  std::optional<std::string> parent_uri;

  const std::string* preferred_label(std::string_view lang = "en") const {
    const std::string* any = nullptr;
    for (const auto& l : labels) {
      if (l.lang != lang) continue;
      if (l.preferred) return &l.text;
      if (!any) any = &l.text;
    }
    return any;
  }
};

// Bilingual glossary plus subclass hierarchy. Immutable after load; lookup
// runs over token norm sequences, so "gas" never fires inside "gaseous".
class Lexicon {
 public:
  const std::map<std::string, ConceptEntry>& entries() const {
    return entries_;
  }

  const ConceptEntry* find(const std::string& uri) const {
    auto it = entries_.find(uri);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::string* uri_for_label(std::string_view label) const {
    auto it = label_index_.find(normalize_label(label));
    return it == label_index_.end() ? nullptr : &it->second;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t max_label_tokens() const { return max_label_tokens_; }

  // Space-joined token norms; the same normal form the tokenizer produces.
  static std::string normalize_label(std::string_view label) {
    std::string out;
    for (const Token& t : tokenize(label)) {
      if (!out.empty()) out.push_back(' ');
      out += t.norm;
    }
    return out;
  }

  static Lexicon load_glossary(const std::vector<csv::Record>& rows);

  friend std::vector<Annotation> annotate_concepts(const AnnotatedDocument&,
                                                   const Lexicon&);
  friend bool subsumes(const Lexicon&, const std::string&, const std::string&);

 private:
  std::map<std::string, ConceptEntry> entries_;
  // normalized label -> uri, plus token count for the longest label
  std::unordered_map<std::string, std::string> label_index_;
  std::size_t max_label_tokens_ = 0;
};

namespace detail {

inline bool parse_bool_cell(std::string_view s) {
  return s == "true" || s == "1" || s == "yes";
}

inline std::vector<std::string> split_pipe(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = s.find('|', start);
    if (bar == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, bar - start));
    start = bar + 1;
  }
}

}  // namespace detail

// Columns: uri,class,lang,label,preferred,parent_uri. One row per label;
// rows sharing a uri merge into one entry as long as class and parent
// agree (a disagreement means two entries claim the uri). A label cell may
// carry several "|"-separated labels; the preferred flag applies to the
// first of them.
inline Lexicon Lexicon::load_glossary(const std::vector<csv::Record>& rows) {
  Lexicon lex;
  if (rows.empty())
    throw LexiconError(LexiconErrorKind::bad_row, "", "glossary: missing header row");
  const auto& header = rows.front().fields;
  const std::vector<std::string> expected = {"uri",       "class", "lang",
                                             "label",     "preferred",
                                             "parent_uri"};
  if (header != expected)
    throw LexiconError(LexiconErrorKind::bad_row, "",
                       "glossary: header must be uri,class,lang,label,preferred,parent_uri");

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 6)
      throw LexiconError(LexiconErrorKind::bad_row, "",
                         "glossary line " + std::to_string(rows[r].line) +
                             ": expected 6 fields, got " +
                             std::to_string(f.size()));
    const std::string& uri = f[0];
    if (uri.empty())
      throw LexiconError(LexiconErrorKind::bad_row, "",
                         "glossary line " + std::to_string(rows[r].line) +
                             ": empty uri");
    if (f[2] != "en" && f[2] != "fr")
      throw LexiconError(LexiconErrorKind::bad_row, uri,
                         "glossary line " + std::to_string(rows[r].line) +
                             ": lang must be en or fr");

    auto [it, inserted] = lex.entries_.try_emplace(uri);
    ConceptEntry& entry = it->second;
    if (inserted) {
      entry.uri = uri;
      entry.class_name = f[1];
      if (!f[5].empty()) entry.parent_uri = f[5];
    } else {
      bool class_conflict = !f[1].empty() && f[1] != entry.class_name;
      std::string parent = entry.parent_uri.value_or("");
      bool parent_conflict = !f[5].empty() && f[5] != parent;
      if (class_conflict || parent_conflict)
        throw LexiconError(LexiconErrorKind::duplicate_uri, uri,
                           "glossary: uri declared twice with conflicting " +
                               std::string(class_conflict ? "class" : "parent") +
                               ": " + uri);
    }
    bool preferred = detail::parse_bool_cell(f[4]);
    for (const std::string& label : detail::split_pipe(f[3])) {
      if (label.empty()) continue;
      bool already = false;
      for (const auto& l : entry.labels)
        if (l.lang == f[2] && l.text == label) already = true;
      if (!already) entry.labels.push_back({f[2], label, preferred});
      preferred = false;
    }
  }

  for (auto& [uri, entry] : lex.entries_) {
    bool has_en = false;
    for (const auto& l : entry.labels)
      if (l.lang == "en") has_en = true;
    if (!has_en)
      throw LexiconError(LexiconErrorKind::missing_english_label, uri,
                         "glossary: no English label for " + uri);
    if (entry.parent_uri && !lex.entries_.count(*entry.parent_uri))
      throw LexiconError(LexiconErrorKind::dangling_parent, uri,
                         "glossary: parent of " + uri + " not found: " +
                             *entry.parent_uri);
  }

  // cycle check by chasing parents with a step budget
  for (const auto& [uri, entry] : lex.entries_) {
    const ConceptEntry* cur = &entry;
    std::size_t steps = 0;
    while (cur->parent_uri) {
      cur = &lex.entries_.at(*cur->parent_uri);
      if (++steps > lex.entries_.size())
        throw LexiconError(LexiconErrorKind::cyclic_hierarchy, uri,
                           "glossary: hierarchy cycle through " + uri);
    }
  }

  for (const auto& [uri, entry] : lex.entries_) {
    for (const auto& label : entry.labels) {
      std::string norm = normalize_label(label.text);
      if (norm.empty()) continue;
      auto [it, inserted] = lex.label_index_.try_emplace(norm, uri);
      if (!inserted && it->second != uri)
        throw LexiconError(LexiconErrorKind::duplicate_label, uri,
                           "glossary: label \"" + label.text +
                               "\" maps to both " + it->second + " and " + uri);
      std::size_t tokens = 1 + std::count(norm.begin(), norm.end(), ' ');
      lex.max_label_tokens_ = std::max(lex.max_label_tokens_, tokens);
    }
  }
  return lex;
}

// Left-to-right longest match over token norms; a match consumes its
// tokens, so shorter matches inside it are suppressed. Pure function of
// (token norms, lexicon).
inline std::vector<Annotation> annotate_concepts(const AnnotatedDocument& doc,
                                                 const Lexicon& lex) {
  std::vector<Annotation> out;
  if (lex.label_index_.empty()) return out;
  const auto& tokens = doc.tokens;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t longest = 0;
    const std::string* uri = nullptr;
    std::string key;
    for (std::size_t len = 1;
         len <= lex.max_label_tokens_ && i + len <= tokens.size(); ++len) {
      if (len == 1) {
        key = tokens[i].norm;
      } else {
        key.push_back(' ');
        key += tokens[i + len - 1].norm;
      }
      auto it = lex.label_index_.find(key);
      if (it != lex.label_index_.end()) {
        longest = len;
        uri = &it->second;
      }
    }
    if (uri) {
      const ConceptEntry& entry = lex.entries_.at(*uri);
      Annotation a;
      a.type_name = "Lookup";
      a.span = {tokens[i].span.start, tokens[i + longest - 1].span.end};
      a.features["URI"] = *uri;
      a.features["class"] = entry.class_name;
      out.push_back(std::move(a));
      i += longest;
    } else {
      ++i;
    }
  }
  return out;
}

// True iff descendant reaches ancestor via parent links; reflexive.
inline bool subsumes(const Lexicon& lex, const std::string& ancestor_uri,
                     const std::string& descendant_uri) {
  if (!lex.entries_.count(ancestor_uri))
    throw LexiconError(LexiconErrorKind::unknown_uri, ancestor_uri,
                       "subsumes: unknown uri " + ancestor_uri);
  auto it = lex.entries_.find(descendant_uri);
  if (it == lex.entries_.end())
    throw LexiconError(LexiconErrorKind::unknown_uri, descendant_uri,
                       "subsumes: unknown uri " + descendant_uri);
  const ConceptEntry* cur = &it->second;
  while (true) {
    if (cur->uri == ancestor_uri) return true;
    if (!cur->parent_uri) return false;
    cur = &lex.entries_.at(*cur->parent_uri);
  }
}

}  // namespace reqx
