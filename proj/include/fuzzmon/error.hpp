#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fuzzmon {

// Base of every error raised by the toolkit. Callers that only care about
// "something went wrong with the data" can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text input (record file, schema, ODD spec) failed to parse.
// line/column are 1-based; column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error(format(line, column, what)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(std::size_t line, std::size_t column, const std::string& what) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Raised by encode() for a categorical value outside the declared list.
class UnknownCategoryError : public Error {
 public:
  UnknownCategoryError(std::string feature, std::string value)
      : Error("feature '" + feature + "': value '" + value + "' not in schema"),
        feature_(std::move(feature)),
        value_(std::move(value)) {}

  const std::string& feature() const noexcept { return feature_; }
  const std::string& value() const noexcept { return value_; }

 private:
  std::string feature_;
  std::string value_;
};

class UntrainedModelError : public Error {
 public:
  UntrainedModelError() : Error("model is untrained (no dataclouds)") {}
};

// Model state document could not be restored.
class StateFormatError : public Error {
 public:
  using Error::Error;
};

class StateVersionError : public StateFormatError {
 public:
  using StateFormatError::StateFormatError;
};

}  // namespace fuzzmon
