#pragma once

#include <stdexcept>
#include <string>

namespace bdmrf {

// A value fell outside the domain of its exponential family.
struct DomainViolation : std::runtime_error {
  explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

// A node-conditional has no finite log-partition at the requested natural
// parameter (e.g. exponential family with eta >= 0).
struct NonNormalizableConditional : std::runtime_error {
  explicit NonNormalizableConditional(const std::string& what)
      : std::runtime_error(what) {}
};

// Gibbs chain hit a state where a node conditional is undefined.
struct ChainAbort : std::runtime_error {
  explicit ChainAbort(const std::string& what) : std::runtime_error(what) {}
};

struct EnumerationError : std::runtime_error {
  explicit EnumerationError(const std::string& what) : std::runtime_error(what) {}
};

struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGrid : std::runtime_error {
  explicit DegenerateGrid(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bdmrf
