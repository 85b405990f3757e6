// Copyright 2026 The ADFAR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "adfar/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "adfar/error.h"

namespace adfar {

Dataset ParseDataset(std::istream& in, const std::string& source) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("label\t", 0) != 0) {
        throw ParseError(source, line_no, "expected 'label<TAB>text' header");
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "missing tab");
    std::size_t label = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + tab, label);
    if (ec != std::errc() || ptr != line.data() + tab) {
      throw ParseError(source, line_no, "bad label");
    }
    data.push_back({Tokenize(line.substr(tab + 1)), label});
  }
  return data;
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFoundError(path);
  return ParseDataset(in, path);
}

void WriteDataset(std::ostream& out, const Dataset& data) {
  out << "label\ttext\n";
  for (const auto& ex : data) out << ex.label << '\t' << ex.sentence.raw << '\n';
}

void SaveDataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw WriteError(path);
  WriteDataset(out, data);
  if (!out) throw WriteError(path);
}

std::size_t NumClasses(const Dataset& data) {
  std::size_t max_label = 0;
  for (const auto& ex : data) max_label = std::max(max_label, ex.label);
  return data.empty() ? 0 : max_label + 1;
}

}  // namespace adfar
