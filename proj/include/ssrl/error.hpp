// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ssrl {

/// Violated precondition or unreachable request in the domain model.
/// The CLI maps these to exit code 1.
class DomainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// File system or usage problem. The CLI maps these to exit code 2.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public IoError {
  public:
    ParseError(std::size_t line, const std::string& what)
        : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace ssrl
