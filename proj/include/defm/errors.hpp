#pragma once

#include <stdexcept>
#include <string>

namespace defm {

/// Error categories surfaced by the library. The CLI maps these to exit codes.
enum class errc {
  io,
  missing_column,
  non_binary_outcome,
  unparseable_value,
  duplicate_wave,
  syntax,
  unknown_outcome,
  unknown_covariate,
  duplicate_term,
  support_too_large,
  empty_support,
  observed_state_excluded,
  forbids_unsupported,
  not_nested,
  data_mismatch,
  invalid_argument,
};

class DefmError : public std::runtime_error {
 public:
  DefmError(errc code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw DefmError(code, msg);
}

}  // namespace defm
