#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The entbound Authors
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

#include <stdexcept>
#include <string>

namespace entbound {

/// Base of every error raised by the library. The CLI maps each subclass to a
/// distinct exit code.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (k <= 0, |lambda| >= r, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Tabulated model queried beyond the masses it knows.
class MassUnknownError : public Error
{
public:
  using Error::Error;
};

/// The model carries no tail certificate, so nothing can be certified.
class MissingCertificateError : public Error
{
public:
  using Error::Error;
};

/// r lies outside the admissible interval (0, r_max).
class InadmissibleRError : public Error
{
public:
  InadmissibleRError(std::string const &what, double r, double r_max)
    : Error(what)
    , r_(r)
    , r_max_(r_max)
  {}

  double r() const noexcept
  {
    return r_;
  }
  double r_max() const noexcept
  {
    return r_max_;
  }

private:
  double r_;
  double r_max_;
};

/// A requested tolerance needs more than the index budget (10^9 terms).
class ResourceLimitError : public Error
{
public:
  using Error::Error;
};

/// Stored report fields contradict each other.
class IntegrityError : public Error
{
public:
  using Error::Error;
};

/// Malformed model spec, config file or tabulated document.
class ParseError : public Error
{
public:
  using Error::Error;
};

}  // namespace entbound
