#pragma once

#include <stdexcept>
#include <string>

namespace bftavail {

// Invalid parameters or out-of-domain input (maps to CLI exit code 2).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure could not produce a trustworthy result (CLI exit code 3).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bftavail
