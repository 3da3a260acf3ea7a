#pragma once

#include <stdexcept>
#include <string>

namespace graphrep {

// Base of every error raised by the library. `kind()` is a short stable tag
// used as the machine-parseable prefix on the command line.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

  // Errors caused by bad input (files, flags, data) rather than a bug or a
  // numerical failure.
  virtual bool user_error() const noexcept { return true; }

 private:
  std::string kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& what) : Error("input", what) {}
};

// A mandatory dataset file is missing or unreadable.
struct IngestionError : Error {
  explicit IngestionError(const std::string& what) : Error("ingestion", what) {}
};

// Dataset content is inconsistent (bad indicator, manifest/class mismatch).
struct DataError : Error {
  explicit DataError(const std::string& what) : Error("data", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// Decomposition would exceed the configured work budget.
struct BudgetError : Error {
  explicit BudgetError(const std::string& what) : Error("budget", what) {}
};

// Documents and vocabulary disagree.
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& what) : Error("consistency", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

// Non-finite values during optimisation.
struct TrainingError : Error {
  explicit TrainingError(const std::string& what) : Error("training", what) {}
  bool user_error() const noexcept override { return false; }
};

}  // namespace graphrep
