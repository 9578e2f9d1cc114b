#ifndef CKERN_ERROR_HPP
#define CKERN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ckern {

// Base of every exception thrown by the library. The CLI maps each subclass
// to its own exit code.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition does not hold (non-regular factor, zero degree,
// K out of range, non-automorphism, ...).
class precondition_error : public error {
 public:
  using error::error;
};

// Consecutive path vertices are not adjacent.
class path_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

// Connection is not proper for the group action; quotient undefined.
class properness_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

// Input file or document does not follow the expected layout.
class schema_error : public error {
 public:
  using error::error;
};

// A file could not be opened or read.
class io_error : public error {
 public:
  using error::error;
};

// A series, quadrature or lattice sum could not reach its tolerance within
// the configured limits.
class numeric_error : public error {
 public:
  using error::error;
};

}  // namespace ckern

#endif  // CKERN_ERROR_HPP
