#pragma once

#include <stdexcept>
#include <string>

namespace blmix {

// Invalid chain parameters or out-of-range numeric arguments.
class param_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A state outside the chain's state space.
class state_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Mismatched supports between probability vectors.
class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation not defined in the chain's spectral regime.
class regime_error : public std::domain_error {
 public:
  enum class kind { critical, non_mixing, generic };

  regime_error(kind k, const std::string& what)
      : std::domain_error(what), kind_(k) {}

  kind which() const { return kind_; }

 private:
  kind kind_;
};

}  // namespace blmix
