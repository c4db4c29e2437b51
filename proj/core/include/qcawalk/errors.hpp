#pragma once

#include <stdexcept>
#include <string>

namespace qcaw {

/// Precondition violated by an argument (out-of-range vertex, odd lattice side, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A request exceeds a configured resource cap (e.g. density-matrix qubit limit).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration failed to parse or validate.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcaw
