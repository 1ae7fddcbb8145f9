#pragma once

#include <stdexcept>
#include <string>

namespace wban {

/// Machine-checkable failure categories for everything that can be rejected
/// at an API boundary. Protocol-level failures (MAC mismatch etc.) are not
/// errors; they land in SessionState as a halt reason.
enum class ErrorCode {
    bad_length,
    too_short,
    too_long,
    empty_bitstring,
    misaligned_message,
    empty_password,
    invalid_utf8,
    invalid_hex,
    invalid_field,
    reserved_nonzero,
    out_of_range,
    no_point_in_window,
    invalid_point,
    keygen_exhausted,
    wrong_variant,
    state_incomplete,
    incomplete_transcript,
    not_in_dictionary,
    unsupported_combination,
    needs_password,
    io_failure,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::bad_length: return "bad_length";
        case ErrorCode::too_short: return "too_short";
        case ErrorCode::too_long: return "too_long";
        case ErrorCode::empty_bitstring: return "empty_bitstring";
        case ErrorCode::misaligned_message: return "misaligned_message";
        case ErrorCode::empty_password: return "empty_password";
        case ErrorCode::invalid_utf8: return "invalid_utf8";
        case ErrorCode::invalid_hex: return "invalid_hex";
        case ErrorCode::invalid_field: return "invalid_field";
        case ErrorCode::reserved_nonzero: return "reserved_nonzero";
        case ErrorCode::out_of_range: return "out_of_range";
        case ErrorCode::no_point_in_window: return "no_point_in_window";
        case ErrorCode::invalid_point: return "invalid_point";
        case ErrorCode::keygen_exhausted: return "keygen_exhausted";
        case ErrorCode::wrong_variant: return "wrong_variant";
        case ErrorCode::state_incomplete: return "state_incomplete";
        case ErrorCode::incomplete_transcript: return "incomplete_transcript";
        case ErrorCode::not_in_dictionary: return "not_in_dictionary";
        case ErrorCode::unsupported_combination: return "unsupported_combination";
        case ErrorCode::needs_password: return "needs_password";
        case ErrorCode::io_failure: return "io_failure";
    }
    return "unknown";
}

}  // namespace wban
