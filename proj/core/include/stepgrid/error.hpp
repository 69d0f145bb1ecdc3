#pragma once

#include <stdexcept>
#include <string>

namespace stepgrid {

enum class Errc {
  // configuration
  bad_config,
  // data / format
  io_failure,
  bad_magic,
  truncated_payload,
  zero_dimension,
  foot_does_not_fit,
  degenerate_frame,
  no_active_pixels,
  box_out_of_bounds,
  canvas_too_small,
  bad_range,
  model_load,
  shape_mismatch,
  size_mismatch,
  dim_mismatch,
  empty_sequence,
  single_class_data,
  class_too_small,
  // numeric
  non_convergence,
  numeric_failure,
};

// Process exit codes used by the CLI: 0 ok, 2 config, 3 data, 4 numeric.
inline int exit_code(Errc e) {
  switch (e) {
    case Errc::bad_config:
      return 2;
    case Errc::non_convergence:
    case Errc::numeric_failure:
      return 4;
    default:
      return 3;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc errc, const std::string& what) : std::runtime_error(what), errc_(errc) {}
  Errc errc() const { return errc_; }
  int exit_code() const { return stepgrid::exit_code(errc_); }

 private:
  Errc errc_;
};

[[noreturn]] inline void fail(Errc errc, const std::string& what) { throw Error(errc, what); }

inline void require(bool cond, Errc errc, const std::string& what) {
  if (!cond) fail(errc, what);
}

}  // namespace stepgrid
