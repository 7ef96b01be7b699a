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

#include <memory>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "reqx/pipeline.hpp"
#include "reqx/reqindex.hpp"

// The three query endpoints over a loaded snapshot:
//   GET /documents            every indexed record
//   GET /documents/{id}       one record, 404 when unknown
//   GET /search?concept=C[&q=...]  ranked concept query
// Responses are UTF-8 application/json; the loaded index is immutable, so
// concurrent GETs need no locking.

namespace reqx {

class QueryService {
 public:
  explicit QueryService(ReqIndex index) : index_(std::move(index)) {
    install_routes();
  }

  httplib::Server& server() { return server_; }
  const ReqIndex& index() const { return index_; }

  // Blocks until the server stops.
  bool listen(const std::string& host, int port) {
    return server_.listen(host, port);
  }

 private:
  static void send_json(httplib::Response& res, const nlohmann::json& body,
                        int status = 200) {
    res.status = status;
    res.set_content(body.dump(2), "application/json");
  }

  void install_routes() {
    server_.Get("/documents",
                [this](const httplib::Request&, httplib::Response& res) {
                  nlohmann::json out = nlohmann::json::array();
                  for (const IndexedSentence& r : index_.search_all())
                    out.push_back(io::record_to_json(r));
                  send_json(res, out);
                });

    server_.Get("/documents/:id",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const std::string& id = req.path_params.at("id");
                  const IndexedSentence* record = index_.get_by_id(id);
                  if (!record) {
                    send_json(res, {{"error", "no record with id " + id}}, 404);
                    return;
                  }
                  send_json(res, io::record_to_json(*record));
                });

    server_.Get("/search",
                [this](const httplib::Request& req, httplib::Response& res) {
                  if (!req.has_param("concept")) {
                    send_json(res, {{"error", "missing concept parameter"}},
                              400);
                    return;
                  }
                  std::optional<std::string> query;
                  if (req.has_param("q")) query = req.get_param_value("q");
                  nlohmann::json out = nlohmann::json::array();
                  for (const ScoredRecord& scored : index_.search_by_concept(
                           req.get_param_value("concept"), query))
                    out.push_back(
                        io::record_to_json(scored.record, scored.score));
                  send_json(res, out);
                });
  }

  ReqIndex index_;
  httplib::Server server_;
};

}  // namespace reqx
