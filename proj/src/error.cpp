#include "ccqm/error.hpp"

namespace ccqm {

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

ErrorCategory Error::category() const noexcept { return category_of(code_); }

std::string_view Error::code_name() const noexcept { return to_string(code_); }

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::InvalidFormat: return "invalid_format";
    case ErrorCode::GridOverflow: return "grid_overflow";
    case ErrorCode::Stalled: return "stalled";
    case ErrorCode::Bracket: return "bracket";
    case ErrorCode::SplitRefused: return "split_refused";
    case ErrorCode::MemoryBudget: return "memory_budget";
    case ErrorCode::VanishingWavefunction: return "vanishing_wavefunction";
    case ErrorCode::PauliExclusion: return "pauli_exclusion";
    case ErrorCode::ZeroWavefunction: return "zero_wavefunction";
  }
  return "unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidFormat:
      return ErrorCategory::Config;
    case ErrorCode::VanishingWavefunction:
    case ErrorCode::PauliExclusion:
      return ErrorCategory::PhysicsDomain;
    default:
      return ErrorCategory::Numerical;
  }
}

int exit_code_for(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Numerical: return 3;
    case ErrorCategory::PhysicsDomain: return 4;
  }
  return 1;
}

void throw_config(const std::string& message) {
  throw Error(ErrorCode::InvalidConfig, message);
}

}  // namespace ccqm
