#pragma once

#include <stdexcept>
#include <string>

namespace levyfp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameter combination the library deliberately does not handle.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The split X = Y_T -/+ S_T produced a negative remainder density.
class DecompositionInvalid : public std::runtime_error {
 public:
  DecompositionInvalid(const std::string& what, double x)
      : std::runtime_error(what), x_(x) {}
  double offending_x() const { return x_; }

 private:
  double x_;
};

}  // namespace levyfp
