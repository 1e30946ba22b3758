#pragma once

#include <stdexcept>
#include <string>

namespace emoeeg {

enum class Errc {
  invalid_argument,
  malformed_header,
  length_mismatch,
  non_finite,
  rating_out_of_range,
  io,
  unknown_channel,
  dimension_mismatch,
  single_class,
  invalid_config,
};

/// Single exception type for the library; `code()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace emoeeg
