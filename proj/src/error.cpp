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

#include "unicom/error.hpp"

#include <atomic>
#include <iostream>

namespace unicom {

namespace {
std::atomic<WarningSink> g_sink{nullptr};
}

void set_warning_sink(WarningSink sink)
{
  g_sink.store(sink);
}

void warn(std::string const &message)
{
  if (auto sink = g_sink.load())
  {
    sink(message);
    return;
  }
  std::cerr << "warning: " << message << '\n';
}

}  // namespace unicom
