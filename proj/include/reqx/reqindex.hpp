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

#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "reqx/lexicon.hpp"
#include "reqx/textmodel.hpp"

// In-process replacement for the external search server: a faceted
// inverted index over extracted requirement sentences with BM25 ranking.
// Sentences are indexed one by one, each (sentence, concept) pair as its
// own record carrying a single concept facet value.

namespace reqx {

struct IndexedSentence {
  std::string id;
  std::string type_facet = "requirement";
  std::string title;
  std::string sentence;
  std::string concept_facet;
  std::string date;  // ISO-8601, set at indexing time
  friend bool operator==(const IndexedSentence&,
                         const IndexedSentence&) = default;
};

// what the pipeline hands over per sentence
struct IndexCandidate {
  std::string title;
  std::string sentence;
  std::vector<std::string> concepts;  // display values, e.g. "SF6"
  std::vector<std::string> markers;   // deontic markers found
};

struct IndexResult {
  std::vector<std::string> ids;      // accepted records
  std::vector<std::string> rejected; // reasons, one per rejected record
};

struct ScoredRecord {
  double score = 0.0;
  IndexedSentence record;
};

class IndexError : public std::runtime_error {
 public:
  explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

class ReqIndex {
 public:
  struct Options {
    std::string type_facet = "requirement";  // "exigence" for legacy exports
    bool allow_duplicates = false;
    std::function<std::string()> clock;  // injectable for determinism
  };

  ReqIndex() : ReqIndex(Options{}) {}
  explicit ReqIndex(Options options) : options_(std::move(options)) {}

  static constexpr double kBm25K1 = 1.2;
  static constexpr double kBm25B = 0.75;
  static constexpr int kFormatVersion = 1;

  // Indexed iff the candidate has at least one concept and one marker;
  // everything else comes back as a rejection, never a failure.
  IndexResult index_sentence(const IndexCandidate& candidate) {
    IndexResult result;
    if (candidate.sentence.empty()) {
      result.rejected.push_back("empty sentence");
      return result;
    }
    if (candidate.concepts.empty()) {
      result.rejected.push_back("no concept");
      return result;
    }
    if (candidate.markers.empty()) {
      result.rejected.push_back("no deontic marker");
      return result;
    }
    // one record per distinct non-empty concept, first-occurrence order
    std::vector<std::string> concepts;
    for (const std::string& c : candidate.concepts) {
      if (c.empty()) continue;
      bool seen = false;
      for (const std::string& s : concepts)
        if (s == c) seen = true;
      if (!seen) concepts.push_back(c);
    }
    if (concepts.empty()) {
      result.rejected.push_back("no concept");
      return result;
    }
    for (const std::string& concept_value : concepts) {
      if (!options_.allow_duplicates &&
          duplicate_keys_.count(dup_key(candidate.sentence, concept_value,
                                        candidate.title))) {
        result.rejected.push_back("duplicate of an indexed record: " +
                                  concept_value);
        continue;
      }
      IndexedSentence record;
      record.id = format_id(next_id_++);
      record.type_facet = options_.type_facet;
      record.title = candidate.title;
      record.sentence = candidate.sentence;
      record.concept_facet = concept_value;
      record.date = now();
      add_postings(record);
      duplicate_keys_.insert(dup_key(record.sentence, record.concept_facet,
                                     record.title));
      result.ids.push_back(record.id);
      records_.emplace(record.id, std::move(record));
    }
    return result;
  }

  std::vector<IndexedSentence> search_all() const {
    std::vector<IndexedSentence> out;
    out.reserve(records_.size());
    for (const auto& [id, record] : records_) out.push_back(record);
    return out;  // map order == id order
  }

  const IndexedSentence* get_by_id(const std::string& id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
  }

  // BM25 over sentence terms against the query (defaults to the concept
  // string). Only strictly positive scores are returned; ties break by id.
  std::vector<ScoredRecord> search_by_concept(
      const std::string& concept_query,
      const std::optional<std::string>& query_text = std::nullopt) const {
    std::string facet = Lexicon::normalize_label(concept_query);
    std::vector<const IndexedSentence*> matching;
    for (const auto& [id, record] : records_)
      if (Lexicon::normalize_label(record.concept_facet) == facet)
        matching.push_back(&record);

    std::vector<std::string> query_terms =
        terms(query_text ? *query_text : concept_query);
    std::vector<ScoredRecord> out;
    for (const IndexedSentence* record : matching) {
      double score = bm25(*record, query_terms);
      if (score > 0.0) out.push_back({score, *record});
    }
    std::sort(out.begin(), out.end(),
              [](const ScoredRecord& a, const ScoredRecord& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.record.id < b.record.id;
              });
    return out;
  }

  std::size_t size() const { return records_.size(); }

  // ------------------------------------------------------------------
  // Persistence: one versioned JSON snapshot with records and postings.

  nlohmann::json to_snapshot() const {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["type_facet"] = options_.type_facet;
    j["allow_duplicates"] = options_.allow_duplicates;
    j["next_id"] = next_id_;
    nlohmann::json records = nlohmann::json::array();
    for (const auto& [id, r] : records_) {
      records.push_back({{"id", r.id},
                         {"type", r.type_facet},
                         {"title", r.title},
                         {"sentence", r.sentence},
                         {"concept", r.concept_facet},
                         {"date", r.date}});
    }
    j["records"] = std::move(records);
    nlohmann::json postings = nlohmann::json::object();
    for (const auto& [term, list] : postings_) {
      nlohmann::json entries = nlohmann::json::array();
      for (const auto& [id, tf] : list) entries.push_back({id, tf});
      postings[term] = std::move(entries);
    }
    j["postings"] = std::move(postings);
    nlohmann::json lengths = nlohmann::json::object();
    for (const auto& [id, len] : doc_length_) lengths[id] = len;
    j["doc_lengths"] = std::move(lengths);
    return j;
  }

  static ReqIndex from_snapshot(const nlohmann::json& j) {
    return from_snapshot(j, Options{});
  }

  static ReqIndex from_snapshot(const nlohmann::json& j, Options options) {
    if (!j.contains("format_version"))
      throw IndexError("snapshot: missing format_version");
    if (j["format_version"].get<int>() != kFormatVersion)
      throw IndexError("snapshot: unsupported format_version " +
                       j["format_version"].dump());
    options.type_facet = j.value("type_facet", options.type_facet);
    options.allow_duplicates =
        j.value("allow_duplicates", options.allow_duplicates);
    ReqIndex index(std::move(options));
    index.next_id_ = j.value("next_id", 1);
    for (const auto& r : j.at("records")) {
      IndexedSentence record;
      record.id = r.at("id").get<std::string>();
      record.type_facet = r.at("type").get<std::string>();
      record.title = r.at("title").get<std::string>();
      record.sentence = r.at("sentence").get<std::string>();
      record.concept_facet = r.at("concept").get<std::string>();
      record.date = r.at("date").get<std::string>();
      index.duplicate_keys_.insert(
          dup_key(record.sentence, record.concept_facet, record.title));
      index.records_.emplace(record.id, std::move(record));
    }
    for (const auto& [term, entries] : j.at("postings").items()) {
      auto& list = index.postings_[term];
      for (const auto& e : entries)
        list.emplace_back(e.at(0).get<std::string>(), e.at(1).get<int>());
    }
    for (const auto& [id, len] : j.at("doc_lengths").items()) {
      index.doc_length_[id] = len.get<std::size_t>();
      index.total_length_ += len.get<std::size_t>();
    }
    return index;
  }

  const Options& options() const { return options_; }

 private:
  static std::string format_id(int n) {
    std::string digits = std::to_string(n);
    return "r" + std::string(6 - std::min<std::size_t>(6, digits.size()), '0') +
           digits;
  }

  static std::string dup_key(const std::string& sentence,
                             const std::string& concept_value,
                             const std::string& title) {
    return sentence + "\x1f" + concept_value + "\x1f" + title;
  }

  std::string now() const {
    if (options_.clock) return options_.clock();
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    return buf;
  }

  static std::vector<std::string> terms(std::string_view text) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text))
      if (t.kind == TokenKind::word || t.kind == TokenKind::number)
        out.push_back(t.norm);
    return out;
  }

  void add_postings(const IndexedSentence& record) {
    std::map<std::string, int> tf;
    std::size_t length = 0;
    for (const std::string& term : terms(record.sentence)) {
      ++tf[term];
      ++length;
    }
    for (const auto& [term, count] : tf)
      postings_[term].emplace_back(record.id, count);
    doc_length_[record.id] = length;
    total_length_ += length;
  }

  double bm25(const IndexedSentence& record,
              const std::vector<std::string>& query_terms) const {
    if (records_.empty() || doc_length_.empty()) return 0.0;
    double n = static_cast<double>(records_.size());
    double avgdl = static_cast<double>(total_length_) /
                   static_cast<double>(doc_length_.size());
    auto len_it = doc_length_.find(record.id);
    double len = len_it == doc_length_.end()
                     ? avgdl
                     : static_cast<double>(len_it->second);
    double score = 0.0;
    std::set<std::string> seen;  // repeated query terms count once
    for (const std::string& term : query_terms) {
      if (!seen.insert(term).second) continue;
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      int tf = 0;
      for (const auto& [id, count] : it->second)
        if (id == record.id) tf = count;
      if (tf == 0) continue;
      double df = static_cast<double>(it->second.size());
      double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      double tf_part = (tf * (kBm25K1 + 1.0)) /
                       (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * len / avgdl));
      score += idf * tf_part;
    }
    return score;
  }

  Options options_;
  int next_id_ = 1;
  std::map<std::string, IndexedSentence> records_;  // id -> record
  std::map<std::string, std::vector<std::pair<std::string, int>>> postings_;
  std::map<std::string, std::size_t> doc_length_;
  std::size_t total_length_ = 0;
  std::set<std::string> duplicate_keys_;
};

}  // namespace reqx
