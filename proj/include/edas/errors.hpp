#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edas {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyGroupError : Error {
  using Error::Error;
};

struct NonFiniteAdvantageError : Error {
  using Error::Error;
};

// Payload variants are inconsistent within one group.
struct MixedPayloadError : Error {
  using Error::Error;
};

// Config domain does not match the group's payload variant.
struct DomainMismatchError : Error {
  using Error::Error;
};

// Execution record passed as incorrect although it passed its tests,
// or is otherwise internally contradictory.
struct InconsistentRecordError : Error {
  using Error::Error;
};

struct EmptyIncorrectSetError : Error {
  using Error::Error;
};

struct InvalidKError : Error {
  using Error::Error;
};

// Diversity requested for a problem with zero incorrect rollouts.
struct NoErrorsError : Error {
  using Error::Error;
};

// Snapshot join failed: a problem id is present in only one snapshot.
struct MissingCounterpartError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Malformed input line; `line` is 1-based.
struct ParseError : Error {
  ParseError(std::size_t line_number, const std::string& message)
      : Error("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
  std::size_t line;
};

}  // namespace edas
