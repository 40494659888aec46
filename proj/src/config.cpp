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

#include "unicom/config.hpp"

#include <functional>
#include <map>
#include <type_traits>

#include "json.hpp"
#include "unicom/array_io.hpp"
#include "unicom/error.hpp"

namespace unicom {

namespace {

using Json = nlohmann::json;

struct Binding
{
  std::function<void(RunConfig &, Json const &)> read;
  std::function<Json(RunConfig const &)>         write;
};

template <typename T, typename Member>
Binding bind(Member member)
{
  auto read = [member](RunConfig &c, Json const &j) {
    if constexpr (std::is_integral_v<T>)
    {
      if (!j.is_number_unsigned())
      {
        throw InvalidArgument("expected a non-negative integer");
      }
    }
    else if (!j.is_number())
    {
      throw InvalidArgument("expected a number");
    }
    member(c) = j.get<T>();
  };
  return {read,
          [member](RunConfig const &c) {
            RunConfig copy = c;
            return Json(member(copy));
          }};
}

#define UNICOM_FIELD(type, expr) bind<type>([](RunConfig &c) -> type & { return c.expr; })

std::map<std::string, Binding> const &bindings()
{
  static std::map<std::string, Binding> const table = {
      {"h_max", UNICOM_FIELD(std::size_t, preprocess.h_max)},
      {"pe_dim", UNICOM_FIELD(std::size_t, preprocess.pe_dim)},
      {"k_feat", UNICOM_FIELD(std::size_t, preprocess.k_feat)},
      {"hidden", UNICOM_FIELD(std::size_t, encoder.hidden)},
      {"heads", UNICOM_FIELD(std::size_t, encoder.heads)},
      {"layers", UNICOM_FIELD(std::size_t, encoder.layers)},
      {"ffn_dim", UNICOM_FIELD(std::size_t, encoder.ffn_dim)},
      {"dropout", UNICOM_FIELD(float, encoder.dropout)},
      {"pretrain_lr", UNICOM_FIELD(float, pretrain.lr)},
      {"pretrain_epochs", UNICOM_FIELD(std::size_t, pretrain.epochs)},
      {"pretrain_patience", UNICOM_FIELD(std::size_t, pretrain.patience)},
      {"min_delta", UNICOM_FIELD(double, pretrain.min_delta)},
      {"margin", UNICOM_FIELD(float, pretrain.margin)},
      {"beta", UNICOM_FIELD(float, pretrain.beta)},
      {"negatives", UNICOM_FIELD(std::size_t, pretrain.negatives)},
      {"anchors", UNICOM_FIELD(std::size_t, pretrain.anchors)},
      {"adapt_lr", UNICOM_FIELD(float, adapt.lr)},
      {"adapt_epochs", UNICOM_FIELD(std::size_t, adapt.epochs)},
      {"adapt_patience", UNICOM_FIELD(std::size_t, adapt.patience)},
      {"alpha", UNICOM_FIELD(float, adapt.alpha)},
      {"prompts", UNICOM_FIELD(std::size_t, adapt.n_prompts)},
      {"tau", UNICOM_FIELD(double, adapt.tau)},
      {"ocd_eps", UNICOM_FIELD(float, adapt.ocd_eps)},
      {"non_edge_factor", UNICOM_FIELD(std::size_t, adapt.non_edge_factor)},
      {"decoder_hidden", UNICOM_FIELD(std::size_t, adapt.decoder_hidden)},
      {"threshold", UNICOM_FIELD(double, threshold)},
      {"seed", UNICOM_FIELD(std::uint64_t, seed)},
      {"threads", UNICOM_FIELD(std::size_t, threads)},
  };
  return table;
}

#undef UNICOM_FIELD

void check_range(char const *name, double value, double lo, double hi)
{
  if (!(value >= lo && value <= hi))
  {
    throw InvalidArgument(std::string(name) + " = " + std::to_string(value) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

void RunConfig::validate() const
{
  EncoderConfig enc = encoder;
  enc.input_dim     = 1;
  enc.validate();
  check_range("pretrain_lr", pretrain.lr, 1e-4, 1e-2);
  check_range("adapt_lr", adapt.lr, 1e-4, 1e-2);
  check_range("alpha", adapt.alpha, 0.01, 1.0);
  pretrain.validate();
  adapt.validate();
  if (!(threshold > 0.0))
  {
    throw InvalidArgument("threshold must be positive");
  }
  if (threads == 0)
  {
    throw InvalidArgument("threads must be positive");
  }
}

PreprocessConfig RunConfig::preprocess_config() const
{
  PreprocessConfig p = preprocess;
  p.seed             = seed;
  return p;
}

UglConfig RunConfig::ugl_config() const
{
  UglConfig u  = pretrain;
  u.encoder    = encoder;
  u.preprocess = preprocess_config();
  u.seed       = seed;
  return u;
}

DasConfig RunConfig::das_config(Task task, std::size_t communities) const
{
  DasConfig d   = adapt;
  d.task        = task;
  d.communities = communities;
  d.margin      = pretrain.margin;
  d.beta        = pretrain.beta;
  d.negatives   = pretrain.negatives;
  d.seed        = seed;
  return d;
}

RunConfig parse_run_config(std::string const &json_text)
{
  Json j;
  try
  {
    j = Json::parse(json_text);
  }
  catch (Json::exception const &e)
  {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object())
  {
    throw InvalidArgument("config: expected a JSON object");
  }
  RunConfig   c;
  auto const &table = bindings();
  for (auto const &[key, value] : j.items())
  {
    auto const it = table.find(key);
    if (it == table.end())
    {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
    try
    {
      it->second.read(c, value);
    }
    catch (InvalidArgument const &e)
    {
      throw InvalidArgument("config: key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(std::filesystem::path const &path)
{
  return parse_run_config(io::read_text(path));
}

std::string run_config_json(RunConfig const &config)
{
  Json j = Json::object();
  for (auto const &[key, b] : bindings())
  {
    j[key] = b.write(config);
  }
  return j.dump(2);
}

}  // namespace unicom
