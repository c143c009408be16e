#pragma once

#include <stdexcept>
#include <string>

namespace pfg {

// Error categories; the numeric values double as CLI exit codes.
enum class errc : int {
  ok = 0,
  parse = 2,
  not_square = 3,
  too_small = 4,
  zero_variance = 5,
  out_of_range = 6,
  negative_weight = 7,
  length_mismatch = 8,
  unassignable = 9,
  unknown_face = 10,
  stale_face = 11,
  monotonicity = 12,
  io = 13,
  bad_config = 14,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

}  // namespace pfg
