#pragma once

#include <stdexcept>
#include <string>

namespace qig {

// Exit-code contract shared by the library and the CLI:
//   0 success, 1 usage, 2 input validation, 3 construction precondition, 4 internal.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  bad_spec = 2,
  hypothesis = 3,
  internal = 4,
};

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const { return ExitCode::internal; }
};

// A declarative input (group table, embedding, generating set, file) failed validation.
struct SpecError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::bad_spec; }
};

// A neighbor oracle broke its contract (valence bound, symmetry, self-loop, duplicates).
struct MalformedSpaceError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::bad_spec; }
};

// A map builder's structural precondition does not hold (wrong decomposition shape,
// finite space where an infinite one is required, excluded index pattern, ...).
// The message names the violated condition.
struct HypothesisError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::hypothesis; }
};

struct InternalError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::internal; }
};

}  // namespace qig
