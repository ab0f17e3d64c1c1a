// SPDX-License-Identifier: Apache-2.0
//
// secisac - outage-constrained secure ISAC beamforming
// Copyright (C) 2026 The secisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SECISAC_ERRORS_HPP
#define SECISAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace secisac
{

// Sizes that do not agree (vector length != N, wrong number of beamformers, ...)
class dimension_error : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class domain_error : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

// Numerical procedure could not produce a finite answer.
class numeric_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Caller used an interface in a way the object does not support
// (e.g. passing a receive filter to a metric without one).
class interface_error : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

// Malformed scenario / config files.
class parse_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace secisac

#endif
