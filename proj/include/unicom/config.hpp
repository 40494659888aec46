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
#include <cstdint>
#include <filesystem>
#include <string>

#include "unicom/das.hpp"
#include "unicom/pipeline.hpp"
#include "unicom/ugl.hpp"

namespace unicom {

struct RunConfig
{
  PreprocessConfig preprocess;
  EncoderConfig    encoder;
  UglConfig        pretrain;  // encoder and preprocess fields are filled from the two above
  DasConfig        adapt;
  double           threshold = 0.5;
  std::uint64_t    seed      = 0;
  std::size_t      threads   = 1;

  void validate() const;

  // Copies of the stage configs with the shared fields and seed filled in.
  UglConfig ugl_config() const;
  DasConfig das_config(Task task, std::size_t communities) const;
  PreprocessConfig preprocess_config() const;
};

// Flat JSON object; every key is optional and unknown keys are rejected.
RunConfig   parse_run_config(std::string const &json_text);
RunConfig   load_run_config(std::filesystem::path const &path);
std::string run_config_json(RunConfig const &config);

}  // namespace unicom
