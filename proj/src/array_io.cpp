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

#include "unicom/array_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "unicom/error.hpp"

namespace unicom::io {

namespace {

std::uint32_t to_little(std::uint32_t bits)
{
  if constexpr (std::endian::native == std::endian::big)
  {
    return ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) | (bits >> 24);
  }
  return bits;
}

}  // namespace

void write_f32(std::filesystem::path const &path, std::span<float const> values)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot write " + path.string());
  }
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    words[i] = to_little(std::bit_cast<std::uint32_t>(values[i]));
  }
  out.write(reinterpret_cast<char const *>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out)
  {
    throw IoError("short write to " + path.string());
  }
}

std::vector<float> read_f32(std::filesystem::path const &path, std::size_t expected_count)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  auto const bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expected_count * sizeof(float))
  {
    throw InvalidArgument(path.string() + ": expected " + std::to_string(expected_count) +
                          " floats, found " + std::to_string(bytes) + " bytes");
  }
  in.seekg(0);
  std::vector<std::uint32_t> words(expected_count);
  in.read(reinterpret_cast<char *>(words.data()), static_cast<std::streamsize>(bytes));
  std::vector<float> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i)
  {
    out[i] = std::bit_cast<float>(to_little(words[i]));
  }
  return out;
}

std::string read_text(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(std::filesystem::path const &path, std::string const &text)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out)
  {
    throw IoError("short write to " + path.string());
  }
}

}  // namespace unicom::io
