#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace als {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  EmptyData,
  NonFiniteLabel,
  InvalidQuantile,
  SchemaMismatch,
  StageUnderpopulated,
  LengthMismatch,
  RmsleDomain,
  InvalidProbability,
  MissingWeather,
  MissingBoundaryCrossing,
  TooManyAircraft,
  EmptyInstance,
  InstanceTooLarge,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

/// Parse failure with the 1-based line number of the offending row.
class ParseError : public Error {
public:
  ParseError(std::string file, std::size_t line, const std::string& msg)
      : Error(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + msg),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string file_;
  std::size_t line_;
};

}  // namespace als
