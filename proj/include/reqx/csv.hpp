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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reqx {
namespace csv {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line of the record's first character
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("csv line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// RFC 4180 with LF or CRLF row ends. Empty lines are skipped.
inline std::vector<Record> parse(std::string_view text) {
  std::vector<Record> records;
  std::size_t i = 0, line = 1;
  while (i < text.size()) {
    if (text[i] == '\n') {
      ++i;
      ++line;
      continue;
    }
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      i += 2;
      ++line;
      continue;
    }
    Record rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      field.clear();
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw ParseError(line, "unterminated quote");
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              break;
            }
          } else {
            if (text[i] == '\n') ++line;
            field.push_back(text[i++]);
          }
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               text[i] != '\r')
          field.push_back(text[i++]);
      }
      rec.fields.push_back(field);
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else if (text[i] == '\n') {
        ++i;
        ++line;
        done = true;
      } else if (text[i] == '\r') {
        i += (i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
        ++line;
        done = true;
      } else {
        throw ParseError(line, "unexpected character after quoted field");
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace csv
}  // namespace reqx
