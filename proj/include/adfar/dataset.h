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

#ifndef ADFAR_DATASET_H_
#define ADFAR_DATASET_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "adfar/text.h"

namespace adfar {

struct LabeledSentence {
  Sentence sentence;
  std::size_t label = 0;

  bool operator==(const LabeledSentence&) const = default;
};

using Dataset = std::vector<LabeledSentence>;

// TSV with a `label<TAB>text` header line; labels are non-negative integers.
Dataset ParseDataset(std::istream& in, const std::string& source);
Dataset LoadDataset(const std::string& path);
void WriteDataset(std::ostream& out, const Dataset& data);
void SaveDataset(const std::string& path, const Dataset& data);

std::size_t NumClasses(const Dataset& data);

}  // namespace adfar

#endif  // ADFAR_DATASET_H_
