// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace taskzoo {

enum class Errc {
  InvalidArgument,
  Io,
  MalformedFile,
  NonFiniteEntry,
  CountMismatch,
  DuplicateId,
  EmptyZoo,
  ZeroGram,
  DimensionMismatch,
  SingularConditioning,
  BudgetOutOfRange,
  TooLarge,
  BadSchedule,
  ConfigError,
  DegenerateLabels,
  InvariantViolation,
};

const char* errc_name(Errc code) noexcept;

// True for errors caused by numerics or a failed property rather than by
// malformed input.
bool is_numerical(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace taskzoo
