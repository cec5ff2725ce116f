#ifndef NUMINDEX_ERRORS_HPP
#define NUMINDEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace numindex {

// Malformed or inconsistent space / operator description.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Coordinate arrays or matrices whose size does not match the space.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A projection level or step count outside the tower.
class LevelError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Operation undefined at the given point (zero vector, non-smooth space).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// P_m x = 0, where the rescaling constant b_m(x) has no value.
class DegenerateSupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace numindex

#endif  // NUMINDEX_ERRORS_HPP
