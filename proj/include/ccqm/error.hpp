#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccqm {

// Broad error categories. Each one maps onto a process exit code in the CLI.
enum class ErrorCategory {
  Config,        // invalid parameters or malformed input files
  Numerical,     // grid overflow, stalled spreading, solver bracket failures
  PhysicsDomain, // vanishing wavefunction, Pauli annihilation
};

enum class ErrorCode {
  InvalidConfig,
  InvalidFormat,
  GridOverflow,
  Stalled,
  Bracket,
  SplitRefused,
  MemoryBudget,
  VanishingWavefunction,
  PauliExclusion,
  ZeroWavefunction,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept;
  std::string_view code_name() const noexcept;

 private:
  ErrorCode code_;
};

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

// 2 config error, 3 numerical error, 4 physics-domain error.
int exit_code_for(ErrorCategory category) noexcept;

[[noreturn]] void throw_config(const std::string& message);

}  // namespace ccqm
