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

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reqx/formalize.hpp"
#include "reqx/lexicon.hpp"
#include "reqx/reqextract.hpp"
#include "reqx/reqindex.hpp"
#include "reqx/ruleengine.hpp"
#include "reqx/textmodel.hpp"

// End-to-end flow: ingest plain text, annotate concepts, run the rule
// cascade, classify and decompose requirement sentences, parse the
// requirement tables, emit the RSML and contract artifacts, and populate
// the search index.

namespace reqx {

class PipelineError : public std::runtime_error {
 public:
  explicit PipelineError(const std::string& what) : std::runtime_error(what) {}
};

struct DocumentSpec {
  std::string path;
  std::string id;     // defaults to the file stem
  std::string title;  // defaults to the id
};

struct TableSpec {
  std::string csv_path;
  std::string context;    // caption, e.g. "CF4 to be used in SF6 mixtures"
  std::string state;      // state label, e.g. "mixture"
  std::string substance;  // state variable; first word of context if empty
};

struct PipelineConfig {
  std::string glossary_path;
  std::vector<std::string> rule_file_paths;
  std::optional<std::string> deontic_lexicon_path;
  std::optional<std::string> vague_lexicon_path;
  std::vector<TableSpec> table_specs;
  std::vector<DocumentSpec> documents;
  std::string output_dir = "out";
  std::string index_path = "out/index.json";
  // compatibility flags
  std::string facet_literal = "requirement";  // "exigence" for legacy exports
  bool inclusive_bounds = false;
  bool allow_duplicate_records = false;
};

struct VagueFinding {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::string term;
  std::string reason;
};

struct PipelineReport {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t requirement_sentences = 0;
  std::size_t atoms = 0;
  std::size_t table_rows = 0;
  std::size_t indexed = 0;
  std::size_t rejected = 0;
  std::vector<VagueFinding> vague_terms;
  std::vector<std::string> validation_warnings;
};

// ---------------------------------------------------------------------------
// Small file and JSON helpers shared by the pipeline and the CLI.

namespace io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path);
  out << content;
}

inline nlohmann::json concept_to_json(const ConceptSlot& slot) {
  nlohmann::json j;
  if (slot.uri) j["uri"] = *slot.uri;
  else j["uri"] = nullptr;
  j["surface"] = slot.surface;
  return j;
}

inline nlohmann::json requirement_to_json(const StructuredRequirement& r) {
  nlohmann::json j;
  j["req_id"] = r.req_id;
  j["doc_id"] = r.doc_id;
  j["sentence_span"] = {{"start", r.sentence_span.start},
                        {"end", r.sentence_span.end}};
  j["sentence_text"] = r.sentence_text;
  j["classification"] = to_string(r.classification);
  j["distinguish_features"] = r.distinguish_features;
  nlohmann::json concepts = nlohmann::json::array();
  for (const ConceptSlot& slot : r.concepts)
    concepts.push_back(concept_to_json(slot));
  j["concepts"] = std::move(concepts);
  j["conditions"] = r.conditions;
  return j;
}

inline StructuredRequirement requirement_from_json(const nlohmann::json& j) {
  StructuredRequirement r;
  r.req_id = j.at("req_id").get<std::string>();
  r.doc_id = j.at("doc_id").get<std::string>();
  r.sentence_span.start = j.at("sentence_span").at("start").get<std::size_t>();
  r.sentence_span.end = j.at("sentence_span").at("end").get<std::size_t>();
  r.sentence_text = j.at("sentence_text").get<std::string>();
  auto cls = statement_class_from(j.at("classification").get<std::string>());
  if (!cls) throw PipelineError("bad classification in requirements JSON");
  r.classification = *cls;
  for (const auto& d : j.at("distinguish_features"))
    r.distinguish_features.push_back(d.get<std::string>());
  for (const auto& c : j.at("concepts")) {
    ConceptSlot slot;
    if (!c.at("uri").is_null()) slot.uri = c.at("uri").get<std::string>();
    slot.surface = c.at("surface").get<std::string>();
    r.concepts.push_back(std::move(slot));
  }
  for (const auto& c : j.at("conditions"))
    r.conditions.push_back(c.get<std::string>());
  return r;
}

inline nlohmann::json quantity_to_json(const Quantity& q) {
  return {{"value", q.value.str()}, {"unit", to_string(q.unit)}};
}

inline Quantity quantity_from_json(const nlohmann::json& j) {
  Quantity q;
  auto value = Decimal::parse(j.at("value").get<std::string>());
  if (!value) throw PipelineError("bad quantity value in JSON");
  q.value = *value;
  auto unit = unit_from(j.at("unit").get<std::string>());
  if (!unit) throw PipelineError("bad quantity unit in JSON");
  q.unit = *unit;
  return q;
}

inline nlohmann::json table_requirement_to_json(const TableRequirement& r) {
  nlohmann::json j;
  j["context"] = r.context;
  j["substance"] = {{"uri", r.substance_uri ? nlohmann::json(*r.substance_uri)
                                            : nlohmann::json(nullptr)},
                    {"surface", r.substance_surface}};
  j["comparator"] = to_string(r.comparator);
  j["quantity"] = quantity_to_json(r.quantity);
  j["alt_quantity"] =
      r.alt_quantity ? quantity_to_json(*r.alt_quantity) : nlohmann::json(nullptr);
  return j;
}

inline TableRequirement table_requirement_from_json(const nlohmann::json& j) {
  TableRequirement r;
  r.context = j.at("context").get<std::string>();
  if (!j.at("substance").at("uri").is_null())
    r.substance_uri = j.at("substance").at("uri").get<std::string>();
  r.substance_surface = j.at("substance").at("surface").get<std::string>();
  auto cmp = comparator_from(j.at("comparator").get<std::string>());
  if (!cmp) throw PipelineError("bad comparator in tables JSON");
  r.comparator = *cmp;
  r.quantity = quantity_from_json(j.at("quantity"));
  if (!j.at("alt_quantity").is_null())
    r.alt_quantity = quantity_from_json(j.at("alt_quantity"));
  return r;
}

inline nlohmann::json record_to_json(const IndexedSentence& r,
                                     std::optional<double> score = {}) {
  nlohmann::json j;
  j["id"] = r.id;
  if (score) j["score"] = *score;
  j["type"] = r.type_facet;
  j["title"] = r.title;
  j["sentence"] = r.sentence;
  j["concept"] = r.concept_facet;
  j["date"] = r.date;
  return j;
}

inline nlohmann::json report_to_json(const PipelineReport& r) {
  nlohmann::json j;
  j["counts"] = {{"documents", r.documents},
                 {"sentences", r.sentences},
                 {"requirement_sentences", r.requirement_sentences},
                 {"atoms", r.atoms},
                 {"table_rows", r.table_rows},
                 {"indexed", r.indexed},
                 {"rejected", r.rejected}};
  nlohmann::json vague = nlohmann::json::array();
  for (const VagueFinding& v : r.vague_terms)
    vague.push_back({{"doc_id", v.doc_id},
                     {"sentence_index", v.sentence_index},
                     {"term", v.term},
                     {"reason", v.reason}});
  j["vague_terms"] = std::move(vague);
  j["validation_warnings"] = r.validation_warnings;
  return j;
}

}  // namespace io

// Config file: JSON, all paths relative to the config file's directory.
inline PipelineConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError("config " + path + ": " + e.what());
  }
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return (base / p).lexically_normal().string();
  };
  PipelineConfig config;
  try {
    config.glossary_path = resolve(j.at("glossary").get<std::string>());
    for (const auto& r : j.value("rules", nlohmann::json::array()))
      config.rule_file_paths.push_back(resolve(r.get<std::string>()));
    if (j.contains("deontic_lexicon"))
      config.deontic_lexicon_path =
          resolve(j["deontic_lexicon"].get<std::string>());
    if (j.contains("vague_lexicon"))
      config.vague_lexicon_path = resolve(j["vague_lexicon"].get<std::string>());
    for (const auto& t : j.value("tables", nlohmann::json::array())) {
      TableSpec spec;
      spec.csv_path = resolve(t.at("csv").get<std::string>());
      spec.context = t.at("context").get<std::string>();
      spec.state = t.value("state", "mixture");
      spec.substance = t.value("substance", "");
      config.table_specs.push_back(std::move(spec));
    }
    for (const auto& d : j.value("documents", nlohmann::json::array())) {
      DocumentSpec spec;
      spec.path = resolve(d.at("path").get<std::string>());
      spec.id = d.value("id",
                        std::filesystem::path(spec.path).stem().string());
      spec.title = d.value("title", spec.id);
      config.documents.push_back(std::move(spec));
    }
    config.output_dir = resolve(j.value("output_dir", "out"));
    config.index_path =
        resolve(j.value("index_path", j.value("output_dir", "out") +
                                          "/index.json"));
    config.facet_literal = j.value("facet_literal", "requirement");
    config.inclusive_bounds = j.value("inclusive_bounds", false);
    config.allow_duplicate_records = j.value("allow_duplicate_records", false);
  } catch (const nlohmann::json::exception& e) {
    throw PipelineError("config " + path + ": " + e.what());
  }
  // contexts must be unique: they name the RSML blocks
  for (std::size_t i = 0; i < config.table_specs.size(); ++i)
    for (std::size_t k = i + 1; k < config.table_specs.size(); ++k)
      if (config.table_specs[i].context == config.table_specs[k].context)
        throw PipelineError("config: duplicate table context \"" +
                            config.table_specs[i].context + "\"");
  return config;
}

// one fully annotated document plus its extraction results
struct ProcessedDocument {
  AnnotatedDocument doc;
  std::vector<StructuredRequirement> requirements;  // one per sentence
  std::vector<StructuredRequirement> atoms;         // after coordination split
  std::vector<IndexCandidate> candidates;           // one per sentence
  std::vector<VagueFinding> vague;
};

// Annotate, cascade, classify, decompose and lint one document.
inline ProcessedDocument process_document(
    const DocumentSpec& spec, const std::string& text, const Lexicon& lex,
    const std::vector<RulePhase>& phases, const DeonticLexicon& deontic,
    const std::vector<std::string>& vague_terms) {
  ProcessedDocument out;
  out.doc = AnnotatedDocument::from_text(spec.id, spec.title, text);
  out.doc.sentences = split_sentences(out.doc);
  out.doc.merge_annotations(annotate_concepts(out.doc, lex));
  out.doc = run_cascade(phases, std::move(out.doc));

  for (const SentenceSpan& sentence : out.doc.sentences) {
    StatementClass cls = classify_sentence(out.doc, sentence, deontic);
    if (cls != StatementClass::statement) {
      StructuredRequirement req =
          extract_structured(out.doc, sentence, deontic, lex);
      req.req_id = out.doc.doc_id + "-" + req.req_id;
      for (const StructuredRequirement& atom : split_coordination(req))
        out.atoms.push_back(atom);
      out.requirements.push_back(std::move(req));
    }

    IndexCandidate candidate;
    candidate.title = out.doc.title;
    candidate.sentence = out.doc.substring(sentence.span);
    for (const Annotation* a : lookups_in_sentence(out.doc, sentence)) {
      const std::string* uri = a->string_feature("URI");
      const ConceptEntry* entry = uri ? lex.find(*uri) : nullptr;
      const std::string* label = entry ? entry->preferred_label() : nullptr;
      candidate.concepts.push_back(label ? *label
                                         : out.doc.substring(a->span));
    }
    for (const DeonticMatch& m :
         find_deontic_markers(out.doc, sentence, deontic))
      candidate.markers.push_back(m.surface);
    out.candidates.push_back(std::move(candidate));

    VagueTermReport report = flag_vague_terms(out.doc, sentence, vague_terms);
    for (const auto& [term, reason] : report.flagged)
      out.vague.push_back({out.doc.doc_id, sentence.index, term, reason});
  }
  return out;
}

inline std::vector<std::string> load_vague_terms(const std::string& path) {
  std::vector<std::string> terms;
  std::istringstream in(io::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (!line.empty() && line[0] != '#') terms.push_back(line);
  }
  return terms;
}

// Runs the whole flow and writes every artifact under the output
// directory. The clock only feeds the index records' date field, so two
// runs with the same clock are byte-identical everywhere.
inline PipelineReport run_pipeline(
    const PipelineConfig& config,
    std::function<std::string()> clock = nullptr) {
  PipelineReport report;

  Lexicon lex;
  try {
    lex = Lexicon::load_glossary(csv::parse(io::read_file(config.glossary_path)));
  } catch (const LexiconError& e) {
    throw PipelineError("glossary " + config.glossary_path + ": " + e.what());
  }
  std::vector<RulePhase> phases;
  for (const std::string& path : config.rule_file_paths) {
    try {
      for (RulePhase& phase : parse_rule_file(io::read_file(path)))
        phases.push_back(std::move(phase));
    } catch (const RuleError& e) {
      throw PipelineError("rule file " + path + ": " + e.what());
    }
  }
  DeonticLexicon deontic =
      config.deontic_lexicon_path
          ? DeonticLexicon::load_csv(
                csv::parse(io::read_file(*config.deontic_lexicon_path)))
          : DeonticLexicon::defaults();
  std::vector<std::string> vague_terms =
      config.vague_lexicon_path ? load_vague_terms(*config.vague_lexicon_path)
                                : default_vague_terms();

  ReqIndex::Options index_options;
  index_options.type_facet = config.facet_literal;
  index_options.allow_duplicates = config.allow_duplicate_records;
  index_options.clock = std::move(clock);
  ReqIndex index(std::move(index_options));

  std::vector<StructuredRequirement> all_atoms;
  nlohmann::json requirements_json = nlohmann::json::array();
  for (const DocumentSpec& spec : config.documents) {
    ProcessedDocument processed =
        process_document(spec, io::read_file(spec.path), lex, phases, deontic,
                         vague_terms);
    ++report.documents;
    report.sentences += processed.doc.sentences.size();
    report.requirement_sentences += processed.requirements.size();
    report.atoms += processed.atoms.size();
    for (const VagueFinding& v : processed.vague)
      report.vague_terms.push_back(v);
    for (const StructuredRequirement& atom : processed.atoms) {
      requirements_json.push_back(io::requirement_to_json(atom));
      all_atoms.push_back(atom);
    }
    for (const IndexCandidate& candidate : processed.candidates) {
      IndexResult result = index.index_sentence(candidate);
      report.indexed += result.ids.size();
      report.rejected += result.rejected.size();
    }
    io::write_file(config.output_dir + "/" + processed.doc.doc_id + ".xml",
                   export_annotations_xml(processed.doc));
  }
  io::write_file(config.output_dir + "/requirements.json",
                 requirements_json.dump(2) + "\n");

  std::vector<TableRequirement> table_reqs;
  RsmlBuildConfig rsml_config;
  rsml_config.bounds =
      config.inclusive_bounds ? BoundsKind::inclusive : BoundsKind::strict;
  nlohmann::json tables_json = nlohmann::json::array();
  for (const TableSpec& spec : config.table_specs) {
    auto rows = csv::parse(io::read_file(spec.csv_path));
    std::vector<TableRequirement> records =
        parse_requirement_table(rows, spec.context, lex);
    report.table_rows += records.size();
    std::string substance = spec.substance;
    if (substance.empty()) {
      auto tokens = tokenize(spec.context);
      if (!tokens.empty()) substance = tokens.front().text;
    }
    rsml_config.contexts.push_back({spec.context, substance, spec.state});
    for (TableRequirement& record : records) {
      tables_json.push_back(io::table_requirement_to_json(record));
      table_reqs.push_back(std::move(record));
    }
  }
  io::write_file(config.output_dir + "/tables.json", tables_json.dump(2) + "\n");

  RsmlProgram program = build_rsml(table_reqs, all_atoms, lex, rsml_config);
  io::write_file(config.output_dir + "/requirements.rsml", emit_rsml(program));
  for (const auto& [name, text] : emit_contracts(program))
    io::write_file(config.output_dir + "/contracts/" + name, text);
  report.validation_warnings = bound_warnings(program);

  io::write_file(config.index_path, index.to_snapshot().dump(2) + "\n");
  return report;
}

}  // namespace reqx
