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

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "unicom/config.hpp"
#include "unicom/dataset.hpp"
#include "unicom/error.hpp"

using namespace unicom;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(std::string const &name)
{
  auto dir = fs::temp_directory_path() / ("unicom_test_dataset_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(fs::path const &path, std::string const &text)
{
  std::ofstream(path) << text;
}

std::string error_of(auto &&fn)
{
  try
  {
    fn();
  }
  catch (std::exception const &e)
  {
    return e.what();
  }
  return {};
}

SbmParams small_sbm(std::uint64_t seed)
{
  SbmParams sp;
  sp.blocks      = 3;
  sp.block_size  = 20;
  sp.p_in        = 0.3;
  sp.p_out       = 0.05;
  sp.feature_dim = 5;
  sp.seed        = seed;
  return sp;
}

}  // namespace

TEST_CASE("bundle round trip in both feature formats")
{
  auto bundle    = sbm_generate(small_sbm(1));
  QuerySamplerOptions qo;
  qo.per_community = 4;
  bundle.queries   = sample_queries(bundle, qo);
  for (auto format : {FeatureFormat::csv, FeatureFormat::binary})
  {
    auto const dir = scratch_dir(format == FeatureFormat::csv ? "csv" : "binary");
    save_bundle(bundle, dir, format);
    auto const back = load_bundle(dir);
    CHECK(back.name == bundle.name);
    CHECK(back.communities == 3);
    CHECK(back.overlapping == bundle.overlapping);
    CHECK(back.graph.num_nodes() == bundle.graph.num_nodes());
    CHECK(back.graph.edge_list() == bundle.graph.edge_list());
    CHECK(back.graph.features() == bundle.graph.features());
    REQUIRE(back.labels.has_value());
    CHECK(*back.labels == *bundle.labels);
    REQUIRE(back.queries.size() == bundle.queries.size());
    for (std::size_t i = 0; i < back.queries.size(); ++i)
    {
      CHECK(back.queries[i].id == bundle.queries[i].id);
      CHECK(back.queries[i].nodes == bundle.queries[i].nodes);
      CHECK(back.queries[i].positives == bundle.queries[i].positives);
      CHECK(back.queries[i].negatives == bundle.queries[i].negatives);
    }
    fs::remove_all(dir);
  }
}

TEST_CASE("malformed inputs report file and line")
{
  auto const bundle = sbm_generate(small_sbm(2));
  auto const dir    = scratch_dir("malformed");
  save_bundle(bundle, dir, FeatureFormat::csv);

  write(dir / "graph.tsv", "# header\n0\t1\n1\t99\n");
  auto msg = error_of([&] { load_bundle(dir); });
  CHECK(msg.find("graph.tsv:3") != std::string::npos);
  CHECK_THROWS_AS(load_bundle(dir), InvalidArgument);

  write(dir / "graph.tsv", "0\t1\n");
  write(dir / "features.csv", "1,2,3,4,5\n");
  msg = error_of([&] { load_bundle(dir); });
  CHECK(msg.find("truncated") != std::string::npos);

  write(dir / "labels.tsv", "0\t1\n0\t2\n");
  CHECK_THROWS_AS(load_labels(dir / "labels.tsv", 3), InvalidArgument);
  write(dir / "labels.tsv", "0\t1\n1\tx\n");
  msg = error_of([&] { load_labels(dir / "labels.tsv", 2); });
  CHECK(msg.find("labels.tsv:2") != std::string::npos);
  write(dir / "labels.tsv", "0\t1\r\n\n1\t0\r\n");
  CHECK(load_labels(dir / "labels.tsv", 2) == LabelSet{{1}, {0}});

  write(dir / "queries.tsv", "q0\t1,2;3\n");
  CHECK_THROWS_AS(load_queries(dir / "queries.tsv", 5), InvalidArgument);

  CHECK_THROWS_AS(load_bundle(dir / "absent"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("planted partition edge counts stay within three standard deviations")
{
  SbmParams sp = small_sbm(0);
  double const pairs_in  = 3.0 * 20.0 * 19.0 / 2.0;
  double const pairs_out = 3.0 * 20.0 * 20.0;
  double const mean      = pairs_in * sp.p_in + pairs_out * sp.p_out;
  double const sd = std::sqrt(pairs_in * sp.p_in * (1 - sp.p_in) + pairs_out * sp.p_out * (1 - sp.p_out));
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    sp.seed          = seed;
    auto const b     = sbm_generate(sp);
    double const m   = static_cast<double>(b.graph.num_edges());
    CHECK(std::abs(m - mean) <= 3.0 * sd);
  }
}

TEST_CASE("planted partition structure")
{
  SbmParams sp = small_sbm(3);
  sp.p_out     = 0.0;
  auto const b = sbm_generate(sp);
  for (auto const &e : b.graph.edge_list())
  {
    CHECK(e.u / 20 == e.v / 20);
  }
  CHECK(b.communities == 3);
  CHECK_FALSE(b.overlapping);
  CHECK(overlap_rate(*b.labels) == 0.0);

  sp.overlap   = 0.2;
  sp.blocks    = 2;
  sp.block_size = 50;
  auto const o = sbm_generate(sp);
  CHECK(o.overlapping);
  CHECK(overlap_rate(*o.labels) == doctest::Approx(0.2));
  CHECK(max_label_affiliation(*o.labels) == 2);

  CHECK(sbm_generate(small_sbm(4)).graph.edge_list() == sbm_generate(small_sbm(4)).graph.edge_list());
  CHECK(sbm_generate(small_sbm(4)).graph.features() == sbm_generate(small_sbm(4)).graph.features());

  sp.p_in = 1.5;
  CHECK_THROWS_AS(sbm_generate(sp), InvalidArgument);
}

TEST_CASE("query sampler")
{
  SbmParams sp  = small_sbm(5);
  sp.blocks     = 7;
  auto const b  = sbm_generate(sp);
  QuerySamplerOptions qo;
  qo.seed      = 9;
  auto const q = sample_queries(b, qo);
  CHECK(q.size() == 140);
  std::set<std::string> ids;
  for (auto const &query : q)
  {
    ids.insert(query.id);
    CHECK(query.nodes.size() >= qo.min_size);
    CHECK(query.nodes.size() <= qo.max_size);
    CHECK(query.positives.size() == qo.positives);
    CHECK(query.negatives.size() == qo.negatives);
    auto const truth = query_truth(*b.labels, query);
    for (NodeId v : query.nodes)
    {
      CHECK(std::binary_search(truth.begin(), truth.end(), v));
    }
    for (NodeId v : query.positives)
    {
      CHECK(std::binary_search(truth.begin(), truth.end(), v));
    }
    for (NodeId v : query.negatives)
    {
      CHECK_FALSE(std::binary_search(truth.begin(), truth.end(), v));
    }
  }
  CHECK(ids.size() == q.size());
  auto const again = sample_queries(b, qo);
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    CHECK(again[i].nodes == q[i].nodes);
  }

  qo.rate      = 0.1;
  CHECK(sample_queries(b, qo).size() == 7 * 2);
  qo.rate      = 2.0;
  CHECK_THROWS_AS(sample_queries(b, qo), InvalidArgument);

  SbmParams tiny  = small_sbm(6);
  tiny.block_size = 4;
  QuerySamplerOptions strict;
  CHECK(sample_queries(sbm_generate(tiny), strict).empty());
}

TEST_CASE("run configuration parsing")
{
  auto const cfg = parse_run_config(R"({"hidden": 64, "heads": 4, "seed": 7, "adapt_lr": 0.002})");
  CHECK(cfg.encoder.hidden == 64);
  CHECK(cfg.encoder.heads == 4);
  CHECK(cfg.seed == 7);
  CHECK(cfg.adapt.lr == doctest::Approx(0.002f));
  CHECK(cfg.ugl_config().seed == 7);
  CHECK(cfg.das_config(Task::dcd, 3).communities == 3);
  CHECK(cfg.das_config(Task::dcd, 3).seed == 7);

  auto const back = parse_run_config(run_config_json(cfg));
  CHECK(run_config_json(back) == run_config_json(cfg));

  CHECK_THROWS_AS(parse_run_config(R"({"hiden": 64})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"hidden": -4})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"hidden": 2.5})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"hidden": 6, "heads": 4})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"pretrain_lr": 0.5})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"alpha": 0.001})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config(R"({"threads": 0})"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config("{not json"), InvalidArgument);
  CHECK_THROWS_AS(parse_run_config("[1, 2]"), InvalidArgument);
}
