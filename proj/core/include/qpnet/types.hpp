#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpnet {

using NodeId = std::uint32_t;

// Cumulative distribution over an ordered state space. Entries are
// non-decreasing and the final entry is 1 (within kProbTol).
using CdfVector = std::vector<double>;

// Tolerance used for row normalization checks and CDF comparisons.
inline constexpr double kProbTol = 1e-9;

// Cap on the number of joint cells exact enumeration will visit.
inline constexpr double kDefaultEnumerationCap = 1e7;

enum class Sign : std::uint8_t {
  Positive,
  Negative,
  Zero,
  Ambiguous,
};

constexpr bool is_decisive(Sign s) { return s != Sign::Ambiguous; }

// Chained influence along a path: Zero absorbs everything, Ambiguous
// absorbs everything except Zero, equal signs compose to Positive.
constexpr Sign sign_multiply(Sign a, Sign b) {
  if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
  if (a == Sign::Ambiguous || b == Sign::Ambiguous) return Sign::Ambiguous;
  return a == b ? Sign::Positive : Sign::Negative;
}

// Parallel combination of influences: Zero is the identity, equal signs
// are idempotent, opposing signs conflict to Ambiguous, Ambiguous absorbs.
constexpr Sign sign_add(Sign a, Sign b) {
  if (a == Sign::Zero) return b;
  if (b == Sign::Zero) return a;
  if (a == Sign::Ambiguous || b == Sign::Ambiguous) return Sign::Ambiguous;
  return a == b ? a : Sign::Ambiguous;
}

constexpr char sign_to_char(Sign s) {
  switch (s) {
    case Sign::Positive: return '+';
    case Sign::Negative: return '-';
    case Sign::Zero: return '0';
    case Sign::Ambiguous: return '?';
  }
  return '?';
}

Sign sign_from_char(char c);

const char* sign_name(Sign s);

enum class ErrorCode {
  UnknownNode,
  NoSuchArc,
  PathExists,
  LengthMismatch,
  TooLarge,
  InvalidPartition,
  Ineligible,
  GenerationFailure,
  UndefinedCondition,
  ParseError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qpnet
