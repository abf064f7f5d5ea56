#pragma once

#include <stdexcept>
#include <string>

namespace fracspde {

// Parameters violate the L2-existence condition nu_s > 0.
class ModelError : public std::domain_error {
 public:
  ModelError(const std::string& what, double nu_s)
      : std::domain_error(what), nu_s_(nu_s) {}
  double nu_s() const noexcept { return nu_s_; }

 private:
  double nu_s_;
};

// Symmetric factorisation failed even after one jitter attempt.
class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracspde
