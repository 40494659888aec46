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

#include "tensor_store.hpp"

#include <algorithm>

#include "unicom/array_io.hpp"
#include "unicom/error.hpp"

namespace unicom::store {

namespace {

std::filesystem::path file_for(std::string const &name, std::filesystem::path const &dir)
{
  return dir / (name + ".bin");
}

}  // namespace

Json save_tensors(std::vector<NamedTensor> const &tensors, std::filesystem::path const &dir)
{
  Json entries = Json::array();
  for (auto const &nt : tensors)
  {
    io::write_f32(file_for(nt.name, dir), nt.tensor.data());
    entries.push_back({{"name", nt.name}, {"shape", nt.tensor.shape()}, {"file", nt.name + ".bin"}});
  }
  return entries;
}

void load_tensors(std::vector<NamedTensor> const &tensors, std::filesystem::path const &dir,
                  Json const &entries)
{
  for (auto const &nt : tensors)
  {
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](Json const &e) { return e.at("name").get<std::string>() == nt.name; });
    if (it == entries.end())
    {
      throw InvalidArgument(dir.string() + ": manifest lacks tensor " + nt.name);
    }
    if (it->at("shape").get<ad::Shape>() != nt.tensor.shape())
    {
      throw InvalidArgument(dir.string() + ": shape mismatch for " + nt.name);
    }
    auto values = io::read_f32(dir / it->at("file").get<std::string>(), nt.tensor.numel());
    std::copy(values.begin(), values.end(), nt.tensor.data().begin());
  }
}

Json save_matrix(Matrix const &m, std::string const &name, std::filesystem::path const &dir)
{
  io::write_f32(file_for(name, dir), m.data);
  return {{"name", name}, {"shape", {m.rows, m.cols}}, {"file", name + ".bin"}};
}

Matrix load_matrix(Json const &entry, std::filesystem::path const &dir)
{
  auto const shape = entry.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2)
  {
    throw InvalidArgument(dir.string() + ": matrix entry must be 2-D");
  }
  return Matrix(shape[0], shape[1],
                io::read_f32(dir / entry.at("file").get<std::string>(), shape[0] * shape[1]));
}

Json read_manifest(std::filesystem::path const &dir)
{
  try
  {
    return Json::parse(io::read_text(dir / "manifest.json"));
  }
  catch (Json::exception const &e)
  {
    throw InvalidArgument((dir / "manifest.json").string() + ": " + e.what());
  }
}

void write_manifest(Json const &manifest, std::filesystem::path const &dir)
{
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace unicom::store
