#pragma once

#include <stdexcept>
#include <string>

namespace classrbm {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Shape or index contract violation (mismatched dimensions, bad label index).
class dimension_error : public error {
 public:
  explicit dimension_error(const std::string& what) : error(what) {}
};

/// Malformed input data: parse failures, unknown categories, bad files.
class data_error : public error {
 public:
  explicit data_error(const std::string& what) : error(what) {}
};

/// Numerical breakdown: non-finite values detected where finiteness is required.
class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& what) : error(what) {}
};

/// Requested brute-force enumeration exceeds the hard size guard.
class enumeration_error : public error {
 public:
  explicit enumeration_error(const std::string& what) : error(what) {}
};

}  // namespace classrbm
