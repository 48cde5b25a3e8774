// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ULFSYNTH_UTIL_CSV_H_
#define ULFSYNTH_UTIL_CSV_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ulfsynth::csv {

using Row = std::vector<std::string>;

// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
// wrapped in double quotes with embedded quotes doubled.
std::string EscapeField(std::string_view field);
std::string FormatRow(const Row& row);

// Streaming reader. Quoted fields may span lines; `line()` reports the
// 1-based physical line on which the last returned record started.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input. Throws ParseError on an unterminated
  // quoted field.
  bool Next(Row& row);
  int line() const { return record_line_; }

 private:
  std::istream& in_;
  int next_line_ = 1;
  int record_line_ = 0;
};

// Reads a whole file; throws IoError when it cannot be opened.
std::vector<Row> ReadFile(const std::string& path);

}  // namespace ulfsynth::csv

#endif  // ULFSYNTH_UTIL_CSV_H_
