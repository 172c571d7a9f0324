#pragma once

#include <stdexcept>
#include <string>

namespace exsieve {

// Error taxonomy shared by every module. Each maps onto one failure class a
// caller may want to tell apart (bad input, domain violation, resources, I/O).

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A parameter lies outside the hypothesis range of the formula being evaluated.
class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CacheCorrupt : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exact identity failed to close or an accumulator blew up.
class InternalConsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace exsieve
