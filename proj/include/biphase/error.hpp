#pragma once

#include <stdexcept>
#include <string>

namespace biphase {

// Raised by the planners when no measurement plan satisfies the cross-term
// threshold, or when part of the spectrum cannot be reached from the root.
class InfeasiblePlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Four phase steps with no interference signal (I_0 - I_pi and
// I_pi/2 - I_3pi/2 both zero).
class ContrastError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphase
