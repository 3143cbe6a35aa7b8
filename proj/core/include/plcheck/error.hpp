#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace plcheck {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries a 1-based source position when known
/// (line 0 means "no position").
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// Reference to something the vocabulary does not declare, or an
/// inconsistent vocabulary declaration.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

class RulebookError : public Error {
 public:
  using Error::Error;
};

class LedgerError : public Error {
 public:
  using Error::Error;
};

}  // namespace plcheck
