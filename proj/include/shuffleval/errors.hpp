#pragma once

#include <stdexcept>
#include <string>

namespace shuffleval {

// Root of every exception the toolkit throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed a value outside an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Enumeration requested beyond the exact-mode ceiling.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed input text; line is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that breaks a data-model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Missing credentials, contradictory flags, cache miss under --offline.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Backend unreachable after the configured retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Judge or baseline reply could not be interpreted.
class ScoringError : public Error {
 public:
  using Error::Error;
};

// A conlang generation stage failed; stage() names it.
class GenerationError : public Error {
 public:
  GenerationError(std::string stage, const std::string& what, std::string raw_reply = {})
      : Error(stage + ": " + what), stage_(std::move(stage)), raw_reply_(std::move(raw_reply)) {}
  const std::string& stage() const noexcept { return stage_; }
  const std::string& raw_reply() const noexcept { return raw_reply_; }

 private:
  std::string stage_;
  std::string raw_reply_;
};

}  // namespace shuffleval
