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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "unicom/encoder.hpp"
#include "unicom/matrix.hpp"

namespace unicom::store {

using Json = nlohmann::json;

// Writes one <name>.bin per tensor and returns their manifest entries.
Json save_tensors(std::vector<NamedTensor> const &tensors, std::filesystem::path const &dir);
// Overwrites the storage of each tensor with the matching entry; shapes must agree.
void load_tensors(std::vector<NamedTensor> const &tensors, std::filesystem::path const &dir,
                  Json const &entries);

Json   save_matrix(Matrix const &m, std::string const &name, std::filesystem::path const &dir);
Matrix load_matrix(Json const &entry, std::filesystem::path const &dir);

Json read_manifest(std::filesystem::path const &dir);
void write_manifest(Json const &manifest, std::filesystem::path const &dir);

}  // namespace unicom::store
