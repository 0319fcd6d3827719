//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uidscan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error
{
public:
  ParseError(std::string const &message, std::size_t line = 0)
    : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message)
    , line_(line)
  {}

  std::size_t line() const noexcept
  {
    return line_;
  }

private:
  std::size_t line_;
};

/// A value violates a domain invariant (negative surprisal, unknown label, ...).
class ValidationError : public Error
{
public:
  using Error::Error;
};

/// Vector or matrix dimensions disagree.
class DimensionError : public Error
{
public:
  using Error::Error;
};

}  // namespace uidscan
