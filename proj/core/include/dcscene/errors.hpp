// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dcscene {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed bytes: bad magic, truncated payload, unparseable lines.
/// Messages carry a byte offset or a line number.
class FormatError : public Error {
public:
  using Error::Error;
};

/// Structurally valid input carrying illegal values: duplicate ids,
/// negative losses, norm violations, digest mismatches.
class IntegrityError : public Error {
public:
  using Error::Error;
};

/// Caller errors: parameters out of range, dimension mismatches,
/// degenerate inputs (e.g. normalizing a zero vector).
class UsageError : public Error {
public:
  using Error::Error;
};

/// Filesystem failures. Messages always name the path.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace dcscene
