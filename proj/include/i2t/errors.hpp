#pragma once

#include <stdexcept>
#include <string>

namespace i2t {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments, violated preconditions, mismatched tags or shapes.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// File and format problems: bad magic, truncation, count mismatches.
class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace i2t
