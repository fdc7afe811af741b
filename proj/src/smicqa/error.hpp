// Copyright 2026 The smicqa Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace smicqa {

// Base of every error the library raises. The C API maps each subclass to a
// distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's documented precondition (shape mismatch,
// malformed grid, bad argument).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// exact_mic was asked to enumerate more samples than its guard allows.
class SearchTooLargeError : public Error {
 public:
  using Error::Error;
};

// A feature stage is spatially smaller than the patch size.
class StageTooSmallError : public Error {
 public:
  StageTooSmallError(int stage, const std::string& detail)
      : Error("stage " + std::to_string(stage) + " too small: " + detail),
        stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class BackboneError : public Error {
 public:
  enum class Kind { missing_file, load_failed, missing_tap, probe_failed, inference };

  BackboneError(Kind kind, std::string subject, const std::string& message)
      : Error(message), kind_(kind), subject_(std::move(subject)) {}

  Kind kind() const { return kind_; }
  // The offending file, tap or stage name.
  const std::string& subject() const { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

class ImageIoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ManifestError : public Error {
 public:
  // line == 0 means the error is not tied to a specific row.
  ManifestError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Rank or value vector without variance; correlation undefined.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace smicqa
