#pragma once

#include <stdexcept>
#include <string>

namespace gaudit {

// Base class for every error the toolkit raises on purpose. Anything else
// escaping a public entry point is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (bad JSON, missing field, unknown enum value).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally valid document whose contents violate a lexicon invariant
// (wrong category count, broken partner matching, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Argument outside its mathematical domain (probability of 0, g = the male
// identifier in a gender-illness contrast, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A completion that tokenizes to zero tokens.
class TokenizationError : public Error {
 public:
  using Error::Error;
};

// Model backend unavailable or a remote call failed. `retryable` mirrors the
// wire protocol's error flag. `probe_index` is set when raised from a batch.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& msg, bool retryable = false,
                        long probe_index = -1)
      : Error(msg), retryable(retryable), probe_index(probe_index) {}
  bool retryable;
  long probe_index;
};

// A metric was asked for a (context, completion) cell with no score on file.
class MissingScoreError : public Error {
 public:
  using Error::Error;
};

// Same cache key written twice with different values: the backend is not
// deterministic, which the store treats as an error rather than an overwrite.
class ConflictError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class UnknownRunError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

// A correlation input with zero variance.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Too few data points (or zero spread) for a density estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gaudit
