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

#include <cstdlib>
#include <filesystem>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "reqx/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = REQX_CLI_PATH;
const std::string kDataDir = REQX_DATA_DIR;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run(const std::string& args) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "reqx_cli_io";
  fs::create_directories(dir);
  fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = kCli + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = reqx::io::read_file(out.string());
  result.err = reqx::io::read_file(err.string());
  return result;
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "reqx_cli_work";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli requires a subcommand") {
  CliResult r = run("");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
}

TEST_CASE("cli rejects unknown options with exit 2") {
  CliResult r = run("tables --nonsense");
  CHECK(r.exit_code == 2);
}

TEST_CASE("tables subcommand emits six records for the bundled table") {
  CliResult r = run("tables " + kDataDir + "/tables/table1_cf4.csv" +
                    " --glossary " + kDataDir + "/glossary.csv" +
                    " --context \"CF4 to be used in SF6 mixtures\"");
  REQUIRE(r.exit_code == 0);
  auto records = nlohmann::json::parse(r.out);
  REQUIRE(records.size() == 6);
  CHECK(records[0].at("comparator") == "GT");
  CHECK(records[0].at("quantity").at("value") == "99.7");
  CHECK(records[5].at("quantity").at("value") == "7");
}

TEST_CASE("extract, emit-rsml and emit-contracts chain together") {
  fs::path dir = work_dir();
  std::string atoms_path = (dir / "ex1.json").string();
  CliResult extract =
      run("extract " + kDataDir + "/corpus/ex1_responsibility.txt" +
          " --glossary " + kDataDir + "/glossary.csv -o " + atoms_path);
  REQUIRE(extract.exit_code == 0);
  auto atoms = nlohmann::json::parse(reqx::io::read_file(atoms_path));
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].at("distinguish_features")[0] == "GUARANTEE");

  std::string rsml_path = (dir / "ex1.rsml").string();
  CliResult rsml = run("emit-rsml --glossary " + kDataDir +
                       "/glossary.csv --structured " + atoms_path + " -o " +
                       rsml_path);
  REQUIRE(rsml.exit_code == 0);
  std::string text = reqx::io::read_file(rsml_path);
  CHECK(text.find("[3] When the toxicity of the gas is equal to 0") !=
        std::string::npos);
  CHECK(text.find("[7] According to local regulation the toxicity of the "
                  "gas mixture shall be equal to 0 [Percentage] .") !=
        std::string::npos);

  CliResult contracts = run("emit-contracts " + rsml_path + " -o " +
                            (dir / "contracts").string());
  REQUIRE(contracts.exit_code == 0);
  CHECK(fs::exists(dir / "contracts" / "domain_knowledge.e"));
  CHECK(fs::exists(dir / "contracts" / "requirements_documentation.e"));
  std::string dk =
      reqx::io::read_file((dir / "contracts" / "domain_knowledge.e").string());
  CHECK(dk.find("toxicity_of_gas_is_in_0_and_100") != std::string::npos);
}

TEST_CASE("index then query offline") {
  fs::path dir = work_dir();
  std::string snapshot = (dir / "snap.json").string();
  CliResult index =
      run("index " + kDataDir + "/corpus/environmental_impact.txt" +
          " --glossary " + kDataDir + "/glossary.csv" +
          " --title \"IEC 60376 ED3\" --date 2020-12-28T17:09:49 -o " +
          snapshot);
  REQUIRE(index.exit_code == 0);

  CliResult query = run("query --index " + snapshot + " --concept SF6");
  REQUIRE(query.exit_code == 0);
  auto results = nlohmann::json::parse(query.out);
  REQUIRE(!results.empty());
  for (const auto& record : results) {
    CHECK(record.at("score").get<double>() > 0.0);
    CHECK(record.at("concept") == "SF6");
    CHECK(record.at("date") == "2020-12-28T17:09:49");
  }

  CliResult all = run("query --index " + snapshot + " --all");
  REQUIRE(all.exit_code == 0);
  auto records = nlohmann::json::parse(all.out);
  CHECK(records.size() >= results.size());

  std::string id = records[0].at("id").get<std::string>();
  CliResult by_id = run("query --index " + snapshot + " --id " + id);
  REQUIRE(by_id.exit_code == 0);
  CHECK(nlohmann::json::parse(by_id.out).at("id") == id);

  CliResult missing = run("query --index " + snapshot + " --id r999999");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("annotate emits the annotation XML") {
  CliResult r = run("annotate " + kDataDir + "/corpus/ex2_storage.txt" +
                    " --glossary " + kDataDir + "/glossary.csv --rules " +
                    kDataDir + "/rules/lookup_rename.rules");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("<?xml version=\"1.0\" encoding=\"UTF-8\"?>") == 0);
  CHECK(r.out.find("type=\"Lookup\"") != std::string::npos);
  CHECK(r.out.find("type=\"matchOntology\"") != std::string::npos);
}

TEST_CASE("report runs the pipeline and honors --strict") {
  fs::path dir = work_dir();
  nlohmann::json config = {
      {"glossary", kDataDir + "/glossary.csv"},
      {"rules", {kDataDir + "/rules/lookup_rename.rules"}},
      {"deontic_lexicon", kDataDir + "/deontic.csv"},
      {"vague_lexicon", kDataDir + "/vague.txt"},
      {"documents",
       {{{"path", kDataDir + "/corpus/ex1_responsibility.txt"},
         {"id", "ex1"},
         {"title", "IEC 60376 ED3"}}}},
      {"tables",
       {{{"csv", kDataDir + "/tables/table1_cf4.csv"},
         {"context", "CF4 to be used in SF6 mixtures"},
         {"substance", "CF4"},
         {"state", "mixture"}}}},
      {"output_dir", (dir / "out").string()},
      {"index_path", (dir / "out" / "index.json").string()}};
  std::string config_path = (dir / "config.json").string();
  reqx::io::write_file(config_path, config.dump(2));

  CliResult r = run("report --config " + config_path +
                    " --date 2020-12-28T17:09:49");
  REQUIRE(r.exit_code == 0);
  auto report = nlohmann::json::parse(r.out);
  CHECK(report.at("counts").at("documents") == 1);
  CHECK(report.at("counts").at("table_rows") == 6);
  CHECK(!report.at("validation_warnings").empty());
  CHECK(fs::exists(dir / "out" / "requirements.rsml"));

  CliResult strict = run("report --config " + config_path +
                         " --date 2020-12-28T17:09:49 --strict");
  CHECK(strict.exit_code == 1);
}
