#pragma once

#include <stdexcept>
#include <string>

namespace qisim {

// Parameter outside its admissible domain (negative mean, efficiency > 1, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Not enough realizations to form the requested statistic.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Statistic is mathematically undefined for the given input
// (zero denominator, non-positive normally-ordered variance).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const char* what) {
  if (!ok) [[unlikely]] throw InvalidParameter(what);
}

}  // namespace qisim
