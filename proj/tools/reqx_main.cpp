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

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reqx/pipeline.hpp"
#include "reqx/service.hpp"

namespace {

using namespace reqx;

void emit_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    io::write_file(out_path, content);
}

Lexicon load_lexicon(const std::string& path) {
  return Lexicon::load_glossary(csv::parse(io::read_file(path)));
}

DeonticLexicon load_deontic(const std::string& path) {
  if (path.empty()) return DeonticLexicon::defaults();
  return DeonticLexicon::load_csv(csv::parse(io::read_file(path)));
}

DocumentSpec doc_spec(const std::string& input, const std::string& id,
                      const std::string& title) {
  DocumentSpec spec;
  spec.path = input;
  spec.id = id.empty() ? std::filesystem::path(input).stem().string() : id;
  spec.title = title.empty() ? spec.id : title;
  return spec;
}

// "CONTEXT|SUBSTANCE|STATE" -> TableContextSpec
TableContextSpec parse_context_spec(const std::string& raw) {
  std::size_t first = raw.find('|');
  std::size_t second = first == std::string::npos ? std::string::npos
                                                  : raw.find('|', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw PipelineError("context spec must be CONTEXT|SUBSTANCE|STATE: " + raw);
  return {raw.substr(0, first), raw.substr(first + 1, second - first - 1),
          raw.substr(second + 1)};
}

struct CommonDocOptions {
  std::string input;
  std::string glossary;
  std::string deontic;
  std::string id;
  std::string title;
  std::string out;
};

void add_doc_options(CLI::App* cmd, CommonDocOptions& opt, bool with_deontic) {
  cmd->add_option("input", opt.input, "plain-text input file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--glossary", opt.glossary, "glossary CSV")
      ->required()
      ->check(CLI::ExistingFile);
  if (with_deontic)
    cmd->add_option("--deontic", opt.deontic, "deontic lexicon CSV")
        ->check(CLI::ExistingFile);
  cmd->add_option("--id", opt.id, "document id (default: file stem)");
  cmd->add_option("--title", opt.title, "document title (default: id)");
  cmd->add_option("-o,--out", opt.out, "output file (default: stdout)");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"requirement extraction and indexing for normative standards"};
  app.require_subcommand(1);

  // ---- annotate -----------------------------------------------------
  auto annotate_opt = std::make_shared<CommonDocOptions>();
  auto annotate_rules = std::make_shared<std::vector<std::string>>();
  CLI::App* annotate =
      app.add_subcommand("annotate", "annotate a document, emit XML");
  add_doc_options(annotate, *annotate_opt, false);
  annotate->add_option("--rules", *annotate_rules, "rule files, in order")
      ->check(CLI::ExistingFile);
  annotate->callback([annotate_opt, annotate_rules] {
    Lexicon lex = load_lexicon(annotate_opt->glossary);
    std::vector<RulePhase> phases;
    for (const std::string& path : *annotate_rules)
      for (RulePhase& phase : parse_rule_file(io::read_file(path)))
        phases.push_back(std::move(phase));
    DocumentSpec spec =
        doc_spec(annotate_opt->input, annotate_opt->id, annotate_opt->title);
    ProcessedDocument processed =
        process_document(spec, io::read_file(spec.path), lex, phases,
                         DeonticLexicon::defaults(), default_vague_terms());
    emit_output(annotate_opt->out, export_annotations_xml(processed.doc));
  });

  // ---- extract ------------------------------------------------------
  auto extract_opt = std::make_shared<CommonDocOptions>();
  auto no_split = std::make_shared<bool>(false);
  CLI::App* extract = app.add_subcommand(
      "extract", "extract structured requirements as JSON");
  add_doc_options(extract, *extract_opt, true);
  extract->add_flag("--no-split", *no_split,
                    "keep coordinated sentences whole");
  extract->callback([extract_opt, no_split] {
    Lexicon lex = load_lexicon(extract_opt->glossary);
    DeonticLexicon deontic = load_deontic(extract_opt->deontic);
    DocumentSpec spec =
        doc_spec(extract_opt->input, extract_opt->id, extract_opt->title);
    ProcessedDocument processed =
        process_document(spec, io::read_file(spec.path), lex, {}, deontic,
                         default_vague_terms());
    nlohmann::json out = nlohmann::json::array();
    const auto& list = *no_split ? processed.requirements : processed.atoms;
    for (const StructuredRequirement& r : list)
      out.push_back(io::requirement_to_json(r));
    emit_output(extract_opt->out, out.dump(2) + "\n");
  });

  // ---- tables -------------------------------------------------------
  auto tables_csv = std::make_shared<std::string>();
  auto tables_glossary = std::make_shared<std::string>();
  auto tables_context = std::make_shared<std::string>();
  auto tables_out = std::make_shared<std::string>();
  CLI::App* tables = app.add_subcommand(
      "tables", "parse a requirement table CSV into records");
  tables->add_option("csv", *tables_csv, "table CSV (substance,constraint)")
      ->required()
      ->check(CLI::ExistingFile);
  tables->add_option("--glossary", *tables_glossary,
                     "glossary CSV for substance resolution")
      ->check(CLI::ExistingFile);
  tables->add_option("--context", *tables_context, "table caption/context")
      ->required();
  tables->add_option("-o,--out", *tables_out, "output file (default: stdout)");
  tables->callback([tables_csv, tables_glossary, tables_context, tables_out] {
    Lexicon lex;
    if (!tables_glossary->empty()) lex = load_lexicon(*tables_glossary);
    auto records = parse_requirement_table(
        csv::parse(io::read_file(*tables_csv)), *tables_context, lex);
    nlohmann::json out = nlohmann::json::array();
    for (const TableRequirement& r : records)
      out.push_back(io::table_requirement_to_json(r));
    emit_output(*tables_out, out.dump(2) + "\n");
  });

  // ---- emit-rsml ----------------------------------------------------
  auto rsml_glossary = std::make_shared<std::string>();
  auto rsml_structured = std::make_shared<std::string>();
  auto rsml_tables = std::make_shared<std::vector<std::string>>();
  auto rsml_contexts = std::make_shared<std::vector<std::string>>();
  auto rsml_inclusive = std::make_shared<bool>(false);
  auto rsml_out = std::make_shared<std::string>();
  CLI::App* emit_rsml_cmd = app.add_subcommand(
      "emit-rsml", "build the formal program from extracted JSON");
  emit_rsml_cmd
      ->add_option("--glossary", *rsml_glossary, "glossary CSV")
      ->required()
      ->check(CLI::ExistingFile);
  emit_rsml_cmd->add_option("--structured", *rsml_structured,
                            "structured requirements JSON (atoms)")
      ->check(CLI::ExistingFile);
  emit_rsml_cmd->add_option("--tables", *rsml_tables,
                            "table requirement JSON files")
      ->check(CLI::ExistingFile);
  emit_rsml_cmd->add_option(
      "--context-spec", *rsml_contexts,
      "per-table CONTEXT|SUBSTANCE|STATE (default: first word, mixture)");
  emit_rsml_cmd->add_flag("--inclusive-bounds", *rsml_inclusive,
                          "emit inclusive environment bounds");
  emit_rsml_cmd->add_option("-o,--out", *rsml_out,
                            "output file (default: stdout)");
  emit_rsml_cmd->callback([rsml_glossary, rsml_structured, rsml_tables,
                           rsml_contexts, rsml_inclusive, rsml_out] {
    Lexicon lex = load_lexicon(*rsml_glossary);
    std::vector<StructuredRequirement> atoms;
    if (!rsml_structured->empty())
      for (const auto& j :
           nlohmann::json::parse(io::read_file(*rsml_structured)))
        atoms.push_back(io::requirement_from_json(j));
    std::vector<TableRequirement> table_reqs;
    for (const std::string& path : *rsml_tables)
      for (const auto& j : nlohmann::json::parse(io::read_file(path)))
        table_reqs.push_back(io::table_requirement_from_json(j));
    RsmlBuildConfig config;
    config.bounds =
        *rsml_inclusive ? BoundsKind::inclusive : BoundsKind::strict;
    for (const std::string& raw : *rsml_contexts)
      config.contexts.push_back(parse_context_spec(raw));
    RsmlProgram program = build_rsml(table_reqs, atoms, lex, config);
    emit_output(*rsml_out, emit_rsml(program));
  });

  // ---- emit-contracts -----------------------------------------------
  auto contracts_rsml = std::make_shared<std::string>();
  auto contracts_dir = std::make_shared<std::string>();
  CLI::App* contracts = app.add_subcommand(
      "emit-contracts", "generate contract classes from an RSML file");
  contracts->add_option("rsml", *contracts_rsml, "RSML text file")
      ->required()
      ->check(CLI::ExistingFile);
  contracts->add_option("-o,--out-dir", *contracts_dir, "output directory")
      ->required();
  contracts->callback([contracts_rsml, contracts_dir] {
    RsmlProgram program = parse_rsml(io::read_file(*contracts_rsml));
    for (const auto& [name, text] : emit_contracts(program)) {
      io::write_file(*contracts_dir + "/" + name, text);
      std::cout << *contracts_dir + "/" + name << "\n";
    }
  });

  // ---- index --------------------------------------------------------
  auto index_inputs = std::make_shared<std::vector<std::string>>();
  auto index_glossary = std::make_shared<std::string>();
  auto index_deontic = std::make_shared<std::string>();
  auto index_title = std::make_shared<std::string>();
  auto index_date = std::make_shared<std::string>();
  auto index_facet = std::make_shared<std::string>("requirement");
  auto index_dupes = std::make_shared<bool>(false);
  auto index_out = std::make_shared<std::string>();
  CLI::App* index_cmd =
      app.add_subcommand("index", "index documents into a snapshot");
  index_cmd->add_option("inputs", *index_inputs, "plain-text input files")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--glossary", *index_glossary, "glossary CSV")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--deontic", *index_deontic, "deontic lexicon CSV")
      ->check(CLI::ExistingFile);
  index_cmd->add_option("--title", *index_title,
                        "title facet for every document");
  index_cmd->add_option("--date", *index_date,
                        "fixed ISO-8601 date for the date field");
  index_cmd->add_option("--facet-literal", *index_facet,
                        "type facet literal (default: requirement)");
  index_cmd->add_flag("--allow-duplicates", *index_dupes,
                      "keep exact (sentence, concept, title) repeats");
  index_cmd->add_option("-o,--out", *index_out, "snapshot file")->required();
  index_cmd->callback([index_inputs, index_glossary, index_deontic,
                       index_title, index_date, index_facet, index_dupes,
                       index_out] {
    Lexicon lex = load_lexicon(*index_glossary);
    DeonticLexicon deontic = load_deontic(*index_deontic);
    ReqIndex::Options options;
    options.type_facet = *index_facet;
    options.allow_duplicates = *index_dupes;
    if (!index_date->empty()) {
      std::string date = *index_date;
      options.clock = [date] { return date; };
    }
    ReqIndex index(std::move(options));
    std::size_t indexed = 0, rejected = 0;
    for (const std::string& input : *index_inputs) {
      DocumentSpec spec = doc_spec(input, "", *index_title);
      ProcessedDocument processed =
          process_document(spec, io::read_file(input), lex, {}, deontic,
                           default_vague_terms());
      for (const IndexCandidate& candidate : processed.candidates) {
        IndexResult result = index.index_sentence(candidate);
        indexed += result.ids.size();
        rejected += result.rejected.size();
      }
    }
    io::write_file(*index_out, index.to_snapshot().dump(2) + "\n");
    std::cerr << "indexed " << indexed << " records (" << rejected
              << " rejected) into " << *index_out << "\n";
  });

  // ---- query --------------------------------------------------------
  auto query_index = std::make_shared<std::string>();
  auto query_concept = std::make_shared<std::string>();
  auto query_text = std::make_shared<std::string>();
  auto query_id = std::make_shared<std::string>();
  auto query_all = std::make_shared<bool>(false);
  CLI::App* query =
      app.add_subcommand("query", "search a snapshot offline");
  query->add_option("--index", *query_index, "index snapshot file")
      ->required()
      ->check(CLI::ExistingFile);
  query->add_option("--concept", *query_concept, "concept facet to search");
  query->add_option("--q", *query_text, "query text (default: the concept)");
  query->add_option("--id", *query_id, "fetch one record by id");
  query->add_flag("--all", *query_all, "list every record");
  query->callback([query_index, query_concept, query_text, query_id,
                   query_all] {
    ReqIndex index = ReqIndex::from_snapshot(
        nlohmann::json::parse(io::read_file(*query_index)));
    if (*query_all) {
      nlohmann::json out = nlohmann::json::array();
      for (const IndexedSentence& r : index.search_all())
        out.push_back(io::record_to_json(r));
      std::cout << out.dump(2) << "\n";
      return;
    }
    if (!query_id->empty()) {
      const IndexedSentence* record = index.get_by_id(*query_id);
      if (!record) throw PipelineError("no record with id " + *query_id);
      std::cout << io::record_to_json(*record).dump(2) << "\n";
      return;
    }
    if (query_concept->empty())
      throw PipelineError("one of --concept, --id or --all is required");
    std::optional<std::string> q;
    if (!query_text->empty()) q = *query_text;
    nlohmann::json out = nlohmann::json::array();
    for (const ScoredRecord& scored :
         index.search_by_concept(*query_concept, q))
      out.push_back(io::record_to_json(scored.record, scored.score));
    std::cout << out.dump(2) << "\n";
  });

  // ---- serve ----------------------------------------------------------
  auto serve_index = std::make_shared<std::string>();
  auto serve_host = std::make_shared<std::string>("127.0.0.1");
  auto serve_port = std::make_shared<int>(8080);
  CLI::App* serve =
      app.add_subcommand("serve", "serve the three query endpoints");
  serve->add_option("--index", *serve_index, "index snapshot file")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--host", *serve_host, "bind address");
  serve->add_option("--port", *serve_port, "port");
  serve->callback([serve_index, serve_host, serve_port] {
    ReqIndex index = ReqIndex::from_snapshot(
        nlohmann::json::parse(io::read_file(*serve_index)));
    QueryService service(std::move(index));
    std::cerr << "serving " << service.index().size() << " records on "
              << *serve_host << ":" << *serve_port << "\n";
    if (!service.listen(*serve_host, *serve_port))
      throw PipelineError("cannot bind " + *serve_host + ":" +
                          std::to_string(*serve_port));
  });

  // ---- report ---------------------------------------------------------
  auto report_config = std::make_shared<std::string>();
  auto report_strict = std::make_shared<bool>(false);
  auto report_date = std::make_shared<std::string>();
  auto report_exit = std::make_shared<int>(0);
  CLI::App* report = app.add_subcommand(
      "report", "run the full pipeline and print the report");
  report->add_option("--config", *report_config, "pipeline config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_flag("--strict", *report_strict,
                   "exit 1 when validation warnings are present");
  report->add_option("--date", *report_date,
                     "fixed ISO-8601 date for index records");
  report->callback([report_config, report_strict, report_date, report_exit] {
    PipelineConfig config = load_config(*report_config);
    std::function<std::string()> clock;
    if (!report_date->empty()) {
      std::string date = *report_date;
      clock = [date] { return date; };
    }
    PipelineReport result = run_pipeline(config, clock);
    std::cout << io::report_to_json(result).dump(2) << "\n";
    if (*report_strict && !result.validation_warnings.empty())
      *report_exit = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }
  return *report_exit;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
