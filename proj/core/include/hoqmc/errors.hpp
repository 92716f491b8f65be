#pragma once

#include <stdexcept>
#include <string>

namespace hoqmc {

// Caller violated a precondition (bad argument, mismatched base, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mathematically undefined operation, e.g. inverting zero in F_b.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configured work limit would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed quantity violated a numerical consistency contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.3.0";

}  // namespace hoqmc
