#pragma once

#include <stdexcept>
#include <string>

namespace watt {

enum class errc {
  empty_group,
  non_finite,
  length_mismatch,
  invalid_argument,
  rank_deficient,
  dimension_mismatch,
  all_controls_trimmed,
  zero_control_mass,
  degenerate_bootstrap,
  zero_weight_group,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_group: return "empty_group";
    case errc::non_finite: return "non_finite";
    case errc::length_mismatch: return "length_mismatch";
    case errc::invalid_argument: return "invalid_argument";
    case errc::rank_deficient: return "rank_deficient";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::all_controls_trimmed: return "all_controls_trimmed";
    case errc::zero_control_mass: return "zero_control_mass";
    case errc::degenerate_bootstrap: return "degenerate_bootstrap";
    case errc::zero_weight_group: return "zero_weight_group";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace watt
