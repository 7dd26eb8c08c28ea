/*
 * Copyright 2026 The Backorder Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BACKORDER_ERROR_HPP_
#define BACKORDER_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace backorder {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied parameter is outside its documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Column layout does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell or document could not be parsed. Carries the location when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, long row = -1, std::string column = {})
      : Error(format(message, row, column)), row_(row), column_(std::move(column)) {}

  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  static std::string format(const std::string& message, long row,
                            const std::string& column) {
    std::string out = message;
    if (row >= 0) out += " (row " + std::to_string(row);
    if (!column.empty()) out += (row >= 0 ? ", column " : " (column ") + column;
    if (row >= 0 || !column.empty()) out += ")";
    return out;
  }

  long row_;
  std::string column_;
};

// Training diverged or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Data does not satisfy an operation's preconditions (degenerate margins,
// single-class inputs, infeasible constraint sets, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside a pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& context,
             const std::string& message)
      : Error("[" + stage + "] " + (context.empty() ? "" : context + ": ") +
              message),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace backorder

#endif  // BACKORDER_ERROR_HPP_
