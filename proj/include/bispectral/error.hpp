#pragma once

#include <stdexcept>
#include <string>

namespace bispectral {

/// Raised for every contract violation in the library: invalid inputs,
/// malformed files and unsatisfiable parameters. The message is a single
/// line suitable for printing to stderr.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bispectral
