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

#ifndef ADFAR_ERROR_H_
#define ADFAR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adfar {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (lexicon files, datasets, records). Carries the
// 1-based line number when one is known, 0 otherwise.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
              what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class FileNotFoundError : public Error {
 public:
  explicit FileNotFoundError(const std::string& path)
      : Error("cannot open " + path) {}
};

class WriteError : public Error {
 public:
  explicit WriteError(const std::string& path)
      : Error("cannot write " + path) {}
};

// A word was looked up that the lexicon does not contain.
class AbsentWordError : public Error {
 public:
  explicit AbsentWordError(const std::string& word)
      : Error("word not in lexicon: " + word) {}
};

// Zero-norm vector passed where a direction is required.
class DegenerateVectorError : public Error {
 public:
  DegenerateVectorError() : Error("zero-norm vector has no direction") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Checkpoint or report written by an incompatible format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace adfar

#endif  // ADFAR_ERROR_H_
