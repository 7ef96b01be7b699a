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
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reqx/utf8.hpp"

namespace reqx {

// Character offsets count Unicode scalar values, never bytes; the corpus
// carries µ, ° and subscript digits.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  std::size_t length() const { return end - start; }
  bool contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return start < other.end && other.start < end;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend bool operator<(const Span& a, const Span& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  }
};

enum class TokenKind { word, number, punctuation, symbol };

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::word: return "word";
    case TokenKind::number: return "number";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::symbol: return "symbol";
  }
  return "?";
}

struct Token {
  Span span;
  TokenKind kind = TokenKind::word;
  std::string text;
  std::string norm;  // lowercased, subscripts folded, numbers canonicalized
};

struct SentenceSpan {
  Span span;
  std::size_t index = 0;
};

using FeatureValue = std::variant<std::string, double>;
using FeatureMap = std::map<std::string, FeatureValue>;

inline std::string feature_to_string(const FeatureValue& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  double d = std::get<double>(v);
  std::string s = std::to_string(d);
  // strip trailing zeros from the fixed representation
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    auto last = s.find_last_not_of('0');
    s.erase(last == dot ? dot : last + 1);
  }
  return s;
}

struct Annotation {
  int id = 0;
  std::string type_name;
  Span span;
  FeatureMap features;

  const std::string* string_feature(const std::string& name) const {
    auto it = features.find(name);
    if (it == features.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
  }
};

namespace chars {

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0x00A0;  // NBSP shows up in extracted standards
}

inline bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_subscript_digit(char32_t c) { return c >= 0x2080 && c <= 0x2089; }

inline char32_t fold_subscript(char32_t c) {
  return is_subscript_digit(c) ? U'0' + (c - 0x2080) : c;
}

inline bool is_letter(char32_t c) {
  if ((c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z')) return true;
  if (c == 0x00B5) return true;  // µ MICRO SIGN
  if (c >= 0x00C0 && c <= 0x00FF && c != 0x00D7 && c != 0x00F7) return true;
  if (c >= 0x0100 && c <= 0x024F) return true;  // Latin Extended-A/B
  return false;
}

inline bool is_upper(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return true;
  return false;
}

inline char32_t to_lower(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + 32;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 32;
  if (c >= 0x0100 && c <= 0x0177 && (c % 2 == 0)) return c + 1;  // Āā pairs
  return c;
}

inline bool is_punctuation(char32_t c) {
  switch (c) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U'(': case U')': case U'[': case U']': case U'{': case U'}':
    case U'"': case U'\'':
    case 0x00AB: case 0x00BB:  // « »
    case 0x2018: case 0x2019: case 0x201C: case 0x201D:
    case 0x2026:  // …
      return true;
    default:
      return false;
  }
}

}  // namespace chars

// Lowercases and folds subscript digits; whitespace runs collapse to one
// space. Idempotent. This is the shared normal form for token norms,
// gazetteer labels and deontic markers.
inline std::string normalize_text(std::string_view text) {
  std::u32string in = utf8::decode(text);
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t c : in) {
    if (chars::is_space(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(chars::to_lower(chars::fold_subscript(c)));
  }
  return utf8::encode(out);
}

namespace detail {

// Number lexing: digits, then space-grouped thousands ("1 500 000", each
// group exactly three digits), then one decimal separator (comma or dot).
// Returns scalar count consumed, or 0 when no number starts at `i`.
inline std::size_t scan_number(const std::u32string& s, std::size_t i,
                               std::string* norm) {
  if (i >= s.size() || !chars::is_ascii_digit(s[i])) return 0;
  std::string digits;
  std::size_t j = i;
  while (j < s.size() && chars::is_ascii_digit(s[j])) digits.push_back(static_cast<char>(s[j++]));
  // absorb " ddd" groups; the standard's typography may use NBSP
  auto digit_at = [&](std::size_t k) {
    return k < s.size() && chars::is_ascii_digit(s[k]);
  };
  while (j < s.size() && (s[j] == U' ' || s[j] == 0x00A0) && digit_at(j + 1) &&
         digit_at(j + 2) && digit_at(j + 3) && !digit_at(j + 4)) {
    digits.push_back(static_cast<char>(s[j + 1]));
    digits.push_back(static_cast<char>(s[j + 2]));
    digits.push_back(static_cast<char>(s[j + 3]));
    j += 4;
  }
  // decimal part, comma or dot
  if (j + 1 < s.size() && (s[j] == U',' || s[j] == U'.') &&
      chars::is_ascii_digit(s[j + 1])) {
    digits.push_back('.');
    ++j;
    while (j < s.size() && chars::is_ascii_digit(s[j]))
      digits.push_back(static_cast<char>(s[j++]));
  }
  if (norm) *norm = digits;
  return j - i;
}

}  // namespace detail

// Total function: any Unicode text in, ordered non-overlapping tokens out.
// Words may carry trailing ASCII digits and subscripts ("SF6", "CF₄");
// "99,7" and "1 500" each come back as a single number token.
inline std::vector<Token> tokenize(std::string_view text) {
  std::u32string s = utf8::decode(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto make = [&](std::size_t start, std::size_t end, TokenKind kind,
                  std::string norm) {
    Token t;
    t.span = {start, end};
    t.kind = kind;
    t.text = utf8::encode(std::u32string_view(s).substr(start, end - start));
    t.norm = std::move(norm);
    tokens.push_back(std::move(t));
  };
  while (i < s.size()) {
    char32_t c = s[i];
    if (chars::is_space(c)) {
      ++i;
      continue;
    }
    if (chars::is_ascii_digit(c)) {
      std::string norm;
      std::size_t len = detail::scan_number(s, i, &norm);
      make(i, i + len, TokenKind::number, std::move(norm));
      i += len;
      continue;
    }
    if (chars::is_letter(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && (chars::is_letter(s[j]) ||
                              chars::is_ascii_digit(s[j]) ||
                              chars::is_subscript_digit(s[j])))
        ++j;
      std::u32string norm32;
      for (std::size_t k = i; k < j; ++k)
        norm32.push_back(chars::to_lower(chars::fold_subscript(s[k])));
      make(i, j, TokenKind::word, utf8::encode(norm32));
      i = j;
      continue;
    }
    if (chars::is_subscript_digit(c)) {
      // stray subscript with no preceding letter, e.g. a table artifact
      std::size_t j = i;
      std::string norm;
      while (j < s.size() && chars::is_subscript_digit(s[j])) {
        norm.push_back(static_cast<char>(chars::fold_subscript(s[j])));
        ++j;
      }
      make(i, j, TokenKind::number, std::move(norm));
      i = j;
      continue;
    }
    TokenKind kind = chars::is_punctuation(c) ? TokenKind::punctuation
                                              : TokenKind::symbol;
    std::u32string one(1, c);
    make(i, i + 1, kind, utf8::encode(one));
    ++i;
  }
  return tokens;
}

struct AnnotatedDocument {
  std::string doc_id;
  std::string title;
  std::string text;
  std::u32string scalars;  // decoded text; all spans index into this
  std::vector<Token> tokens;
  std::vector<SentenceSpan> sentences;
  std::vector<Annotation> annotations;

  static AnnotatedDocument from_text(std::string doc_id, std::string title,
                                     std::string text) {
    AnnotatedDocument doc;
    doc.doc_id = std::move(doc_id);
    doc.title = std::move(title);
    doc.text = std::move(text);
    doc.scalars = utf8::decode(doc.text);
    doc.tokens = tokenize(doc.text);
    return doc;
  }

  std::string substring(const Span& span) const {
    return utf8::encode(
        std::u32string_view(scalars).substr(span.start, span.length()));
  }

  int add_annotation(std::string type_name, Span span, FeatureMap features) {
    Annotation a;
    a.id = next_id_++;
    a.type_name = std::move(type_name);
    a.span = span;
    a.features = std::move(features);
    annotations.push_back(std::move(a));
    return annotations.back().id;
  }

  void merge_annotations(std::vector<Annotation> more) {
    for (Annotation& a : more) {
      a.id = next_id_++;
      annotations.push_back(std::move(a));
    }
  }

  std::vector<const Annotation*> annotations_of(std::string_view type) const {
    std::vector<const Annotation*> out;
    for (const Annotation& a : annotations)
      if (a.type_name == type) out.push_back(&a);
    return out;
  }

  // index of first token with span.start >= pos
  std::size_t token_index_at(std::size_t pos) const {
    auto it = std::lower_bound(
        tokens.begin(), tokens.end(), pos,
        [](const Token& t, std::size_t p) { return t.span.start < p; });
    return static_cast<std::size_t>(it - tokens.begin());
  }

 private:
  int next_id_ = 1;
};

// Sentence-final ., ! or ? followed by whitespace and a capital (or end of
// text) ends a sentence. Abbreviations from the list never split, and a
// decimal point never reaches here because the tokenizer absorbed it.
inline std::vector<SentenceSpan> split_sentences(
    const AnnotatedDocument& doc,
    const std::vector<std::string>& abbreviations = {"e.g.", "i.e.", "etc.",
                                                     "Fig.", "No."}) {
  std::vector<SentenceSpan> sentences;
  const auto& tokens = doc.tokens;
  if (tokens.empty()) return sentences;

  std::vector<std::u32string> abbrevs32;
  for (const auto& a : abbreviations) abbrevs32.push_back(utf8::decode(a));

  auto is_abbreviation_end = [&](std::size_t scalar_end) {
    for (const auto& abbr : abbrevs32) {
      if (abbr.size() > scalar_end) continue;
      std::size_t from = scalar_end - abbr.size();
      if (std::u32string_view(doc.scalars).substr(from, abbr.size()) != abbr)
        continue;
      if (from == 0) return true;
      char32_t before = doc.scalars[from - 1];
      if (!chars::is_letter(before) && !chars::is_ascii_digit(before))
        return true;
    }
    return false;
  };

  std::size_t first = 0;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const Token& t = tokens[k];
    bool boundary = false;
    if (t.kind == TokenKind::punctuation &&
        (t.text == "." || t.text == "!" || t.text == "?")) {
      std::size_t after = t.span.end;
      if (after >= doc.scalars.size()) {
        boundary = true;
      } else if (chars::is_space(doc.scalars[after])) {
        std::size_t p = after;
        while (p < doc.scalars.size() && chars::is_space(doc.scalars[p])) ++p;
        if (p >= doc.scalars.size() || chars::is_upper(doc.scalars[p]))
          boundary = true;
      }
      if (boundary && t.text == "." && is_abbreviation_end(t.span.end))
        boundary = false;
    }
    if (boundary) {
      sentences.push_back({{tokens[first].span.start, t.span.end},
                           sentences.size()});
      first = k + 1;
    }
  }
  if (first < tokens.size())
    sentences.push_back(
        {{tokens[first].span.start, tokens.back().span.end}, sentences.size()});
  return sentences;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string cdata(std::string_view s) {
  std::string out = "<![CDATA[";
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = s.find("]]>", pos);
    if (hit == std::string_view::npos) {
      out.append(s.substr(pos));
      break;
    }
    out.append(s.substr(pos, hit + 2 - pos));
    out += "]]><![CDATA[";
    pos = hit + 2;
  }
  out += "]]>";
  return out;
}

}  // namespace detail

// Deterministic: annotations ordered by (start, end, type, id), features
// by name, byte-identical across exports of the same document.
inline std::string export_annotations_xml(const AnnotatedDocument& doc) {
  std::vector<const Annotation*> anns;
  anns.reserve(doc.annotations.size());
  for (const Annotation& a : doc.annotations) anns.push_back(&a);
  std::sort(anns.begin(), anns.end(),
            [](const Annotation* a, const Annotation* b) {
              if (a->span.start != b->span.start)
                return a->span.start < b->span.start;
              if (a->span.end != b->span.end) return a->span.end < b->span.end;
              if (a->type_name != b->type_name)
                return a->type_name < b->type_name;
              return a->id < b->id;
            });

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<document id=\"" + detail::xml_escape(doc.doc_id) + "\" title=\"" +
         detail::xml_escape(doc.title) + "\">\n";
  out += "  <text>" + detail::cdata(doc.text) + "</text>\n";
  out += "  <annotations>\n";
  for (const Annotation* a : anns) {
    out += "    <annotation id=\"" + std::to_string(a->id) + "\" type=\"" +
           detail::xml_escape(a->type_name) + "\" start=\"" +
           std::to_string(a->span.start) + "\" end=\"" +
           std::to_string(a->span.end) + "\"";
    if (a->features.empty()) {
      out += "/>\n";
    } else {
      out += ">\n";
      for (const auto& [name, value] : a->features) {
        out += "      <feature name=\"" + detail::xml_escape(name) +
               "\" value=\"" + detail::xml_escape(feature_to_string(value)) +
               "\"/>\n";
      }
      out += "    </annotation>\n";
    }
  }
  out += "  </annotations>\n";
  out += "</document>\n";
  return out;
}

}  // namespace reqx
