#pragma once

#include <stdexcept>
#include <string>

namespace ulab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EquilibriumError : public Error {
 public:
  using Error::Error;
};

class BasisError : public Error {
 public:
  using Error::Error;
};

class SingularSectionError : public Error {
 public:
  SingularSectionError(const std::string& what, double smin) : Error(what), smin_(smin) {}
  double smallest_singular_value() const { return smin_; }

 private:
  double smin_;
};

}  // namespace ulab
