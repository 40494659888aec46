#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The unicom Authors
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

namespace unicom {

/// Bad input: shape mismatch, out-of-range id, malformed file, violated precondition.
class InvalidArgument : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Training or evaluation produced a non-finite value.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure (missing file, unwritable directory).
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Warnings go to stderr unless a sink is installed. The sink is process-wide.
using WarningSink = void (*)(std::string const &message);
void set_warning_sink(WarningSink sink);
void warn(std::string const &message);

}  // namespace unicom
