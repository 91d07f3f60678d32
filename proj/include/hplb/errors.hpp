#pragma once

#include <stdexcept>
#include <string>

namespace hplb {

/// Invalid argument or violated precondition. Maps to CLI exit status 2.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument is well-formed but outside the domain where a formula applies
/// (e.g. the analytic band below its size guard).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A state that the algorithms guarantee cannot happen. Maps to exit status 3.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hplb
