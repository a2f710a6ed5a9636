#pragma once

#include <stdexcept>
#include <string>

namespace qkr {

// Propagation produced non-finite amplitudes. Carries the 1-based index of
// the Floquet period at which the failure was detected.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, int step_index)
      : std::runtime_error(what), step_index_(step_index) {}

  int step_index() const noexcept { return step_index_; }

 private:
  int step_index_;
};

}  // namespace qkr
