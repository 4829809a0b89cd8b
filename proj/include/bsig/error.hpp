#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsig {

/// Failure categories raised by the library. The CLI maps these to exit codes.
enum class errc {
  malformed_line,
  empty_input,
  invalid_probability,
  invalid_parameters,
  node_out_of_range,
  zero_range,
  identity_range_exceeded,
  fingerprint_mismatch,
  saturated_signature,
  zero_registers,
  register_count_mismatch,
  invalid_precision,
  undefined_weight,
  io_error,
  bad_format,
};

inline std::string_view to_string(errc code) {
  switch (code) {
    case errc::malformed_line: return "MalformedLine";
    case errc::empty_input: return "EmptyInput";
    case errc::invalid_probability: return "InvalidProbability";
    case errc::invalid_parameters: return "InvalidParameters";
    case errc::node_out_of_range: return "NodeOutOfRange";
    case errc::zero_range: return "ZeroRange";
    case errc::identity_range_exceeded: return "IdentityRangeExceeded";
    case errc::fingerprint_mismatch: return "FingerprintMismatch";
    case errc::saturated_signature: return "SaturatedSignature";
    case errc::zero_registers: return "ZeroRegisters";
    case errc::register_count_mismatch: return "RegisterCountMismatch";
    case errc::invalid_precision: return "InvalidPrecision";
    case errc::undefined_weight: return "UndefinedWeight";
    case errc::io_error: return "IoError";
    case errc::bad_format: return "BadFormat";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace bsig
