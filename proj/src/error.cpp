// SPDX-License-Identifier: Apache-2.0
#include "taskzoo/error.hpp"

namespace taskzoo {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "IoError";
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::NonFiniteEntry: return "NonFiniteEntry";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::EmptyZoo: return "EmptyZoo";
    case Errc::ZeroGram: return "ZeroGram";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularConditioning: return "SingularConditioning";
    case Errc::BudgetOutOfRange: return "BudgetOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::BadSchedule: return "BadSchedule";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DegenerateLabels: return "DegenerateLabels";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

bool is_numerical(Errc code) noexcept {
  return code == Errc::SingularConditioning || code == Errc::InvariantViolation;
}

}  // namespace taskzoo
