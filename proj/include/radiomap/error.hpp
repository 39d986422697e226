#pragma once

#include <stdexcept>
#include <string>

namespace radiomap {

/// Raised whenever an input or intermediate state violates a module contract.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace radiomap
