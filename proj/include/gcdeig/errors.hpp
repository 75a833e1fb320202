#pragma once

#include <stdexcept>

namespace gcdeig {

// The hypotheses of a bound do not hold for the given input.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace gcdeig
