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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace unicom::io {

// Raw little-endian 32-bit floats.
void write_f32(std::filesystem::path const &path, std::span<float const> values);
std::vector<float> read_f32(std::filesystem::path const &path, std::size_t expected_count);

std::string read_text(std::filesystem::path const &path);
void        write_text(std::filesystem::path const &path, std::string const &text);

}  // namespace unicom::io
