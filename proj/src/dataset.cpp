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

#include "unicom/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "tensor_store.hpp"
#include "unicom/array_io.hpp"
#include "unicom/error.hpp"

namespace unicom {

namespace fs = std::filesystem;

namespace {

struct LineReader
{
  explicit LineReader(fs::path p)
    : path(std::move(p))
    , in(path)
  {
    if (!in)
    {
      throw IoError("cannot open " + path.string());
    }
  }

  // Next non-blank, non-comment line.
  bool next(std::string &line)
  {
    while (std::getline(in, line))
    {
      ++number;
      if (!line.empty() && line.back() == '\r')
      {
        line.pop_back();
      }
      if (!line.empty() && line[0] != '#')
      {
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void fail(std::string const &what) const
  {
    throw InvalidArgument(path.string() + ":" + std::to_string(number) + ": " + what);
  }

  fs::path      path;
  std::ifstream in;
  std::size_t   number = 0;
};

std::vector<std::string_view> split(std::string_view s, char sep)
{
  std::vector<std::string_view> out;
  std::size_t                   start = 0;
  while (true)
  {
    auto const pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
    {
      return out;
    }
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
  {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
  {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T &out)
{
  s             = trim(s);
  auto const rc = std::from_chars(s.data(), s.data() + s.size(), out);
  return rc.ec == std::errc() && rc.ptr == s.data() + s.size() && !s.empty();
}

NodeId parse_node(std::string_view s, std::size_t n_nodes, LineReader const &reader)
{
  NodeId v = 0;
  if (!parse_number(s, v))
  {
    reader.fail("bad node id '" + std::string(s) + "'");
  }
  if (v >= n_nodes)
  {
    reader.fail("node id " + std::to_string(v) + " out of range [0, " + std::to_string(n_nodes) + ")");
  }
  return v;
}

std::vector<NodeId> parse_node_list(std::string_view s, std::size_t n_nodes, LineReader const &reader)
{
  std::vector<NodeId> out;
  if (trim(s).empty())
  {
    return out;
  }
  for (auto part : split(s, ','))
  {
    out.push_back(parse_node(part, n_nodes, reader));
  }
  return out;
}

std::string format_float(float x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(x));
  return buf;
}

template <typename T>
std::string join(std::vector<T> const &xs)
{
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    if (i)
    {
      out += ',';
    }
    out += std::to_string(xs[i]);
  }
  return out;
}

std::vector<Edge> load_edges(fs::path const &path, std::size_t n_nodes)
{
  LineReader        reader(path);
  std::vector<Edge> edges;
  std::string       line;
  while (reader.next(line))
  {
    auto const parts = split(line, '\t');
    if (parts.size() != 2)
    {
      reader.fail("expected 'u<TAB>v'");
    }
    edges.push_back({parse_node(parts[0], n_nodes, reader), parse_node(parts[1], n_nodes, reader)});
  }
  return edges;
}

Matrix load_csv_features(fs::path const &path, std::size_t n_nodes, std::size_t dim)
{
  LineReader  reader(path);
  Matrix      x(n_nodes, dim);
  std::string line;
  std::size_t row = 0;
  while (reader.next(line))
  {
    if (row == n_nodes)
    {
      reader.fail("more feature rows than nodes (" + std::to_string(n_nodes) + ")");
    }
    auto const parts = split(line, ',');
    if (parts.size() != dim)
    {
      reader.fail("expected " + std::to_string(dim) + " values, found " + std::to_string(parts.size()));
    }
    for (std::size_t j = 0; j < dim; ++j)
    {
      if (!parse_number(parts[j], x(row, j)) || !std::isfinite(x(row, j)))
      {
        reader.fail("bad feature value '" + std::string(parts[j]) + "'");
      }
    }
    ++row;
  }
  if (row != n_nodes)
  {
    reader.fail("truncated feature file: " + std::to_string(row) + " of " + std::to_string(n_nodes) +
                " rows");
  }
  return x;
}

void save_csv_features(Matrix const &x, fs::path const &path)
{
  std::ostringstream out;
  for (std::size_t i = 0; i < x.rows; ++i)
  {
    for (std::size_t j = 0; j < x.cols; ++j)
    {
      if (j)
      {
        out << ',';
      }
      out << format_float(x(i, j));
    }
    out << '\n';
  }
  io::write_text(path, out.str());
}

}  // namespace

LabelSet load_labels(fs::path const &path, std::size_t n_nodes)
{
  LineReader        reader(path);
  LabelSet          labels(n_nodes);
  std::vector<bool> seen(n_nodes);
  std::string       line;
  while (reader.next(line))
  {
    auto const parts = split(line, '\t');
    if (parts.size() != 2)
    {
      reader.fail("expected 'node<TAB>c[,c...]'");
    }
    NodeId const v = parse_node(parts[0], n_nodes, reader);
    if (seen[v])
    {
      reader.fail("duplicate node " + std::to_string(v));
    }
    seen[v] = true;
    for (auto part : split(parts[1], ','))
    {
      std::uint32_t c = 0;
      if (!parse_number(part, c))
      {
        reader.fail("bad community id '" + std::string(part) + "'");
      }
      labels[v].push_back(c);
    }
  }
  for (NodeId v = 0; v < n_nodes; ++v)
  {
    if (!seen[v])
    {
      throw InvalidArgument(path.string() + ": node " + std::to_string(v) + " has no label line");
    }
  }
  return labels;
}

void save_labels(LabelSet const &labels, fs::path const &path)
{
  std::ostringstream out;
  for (NodeId v = 0; v < labels.size(); ++v)
  {
    out << v << '\t' << join(labels[v]) << '\n';
  }
  io::write_text(path, out.str());
}

std::vector<Query> load_queries(fs::path const &path, std::size_t n_nodes)
{
  LineReader         reader(path);
  std::vector<Query> queries;
  std::string        line;
  while (reader.next(line))
  {
    auto const parts = split(line, '\t');
    if (parts.size() != 2)
    {
      reader.fail("expected 'id<TAB>nodes;positives;negatives'");
    }
    auto const sets = split(parts[1], ';');
    if (sets.size() != 3)
    {
      reader.fail("expected three ';'-separated node lists");
    }
    Query q;
    q.id        = std::string(trim(parts[0]));
    q.nodes     = parse_node_list(sets[0], n_nodes, reader);
    q.positives = parse_node_list(sets[1], n_nodes, reader);
    q.negatives = parse_node_list(sets[2], n_nodes, reader);
    if (q.nodes.empty())
    {
      reader.fail("query without nodes");
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

void save_queries(std::vector<Query> const &queries, fs::path const &path)
{
  std::ostringstream out;
  for (auto const &q : queries)
  {
    out << q.id << '\t' << join(q.nodes) << ';' << join(q.positives) << ';' << join(q.negatives) << '\n';
  }
  io::write_text(path, out.str());
}

CommunityList load_communities(fs::path const &path, std::size_t n_nodes)
{
  LineReader    reader(path);
  CommunityList out;
  std::string   line;
  while (reader.next(line))
  {
    auto const parts = split(line, '\t');
    if (parts.size() != 2)
    {
      reader.fail("expected 'id<TAB>nodes'");
    }
    out.emplace_back(std::string(trim(parts[0])), parse_node_list(parts[1], n_nodes, reader));
  }
  return out;
}

void save_communities(CommunityList const &result, fs::path const &path)
{
  std::ostringstream out;
  for (auto const &[id, nodes] : result)
  {
    out << id << '\t' << join(nodes) << '\n';
  }
  io::write_text(path, out.str());
}

DatasetBundle load_bundle(fs::path const &dir)
{
  store::Json meta;
  try
  {
    meta = store::Json::parse(io::read_text(dir / "meta.json"));
  }
  catch (store::Json::exception const &e)
  {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }
  DatasetBundle b;
  std::size_t   n = 0, d = 0;
  std::string   format;
  try
  {
    b.name        = meta.value("name", dir.filename().string());
    n             = meta.at("num_nodes").get<std::size_t>();
    d             = meta.at("feature_dim").get<std::size_t>();
    b.communities = meta.value("communities", std::size_t{0});
    b.overlapping = meta.value("overlapping", false);
    format        = meta.value("feature_format", std::string("csv"));
  }
  catch (store::Json::exception const &e)
  {
    throw InvalidArgument((dir / "meta.json").string() + ": " + e.what());
  }

  Matrix x;
  if (format == "csv")
  {
    x = load_csv_features(dir / "features.csv", n, d);
  }
  else if (format == "binary")
  {
    auto const m = store::read_manifest(dir / "features");
    x            = store::load_matrix(m.at("features"), dir / "features");
    if (x.rows != n || x.cols != d)
    {
      throw InvalidArgument((dir / "features").string() + ": shape disagrees with meta.json");
    }
  }
  else
  {
    throw InvalidArgument((dir / "meta.json").string() + ": unknown feature_format '" + format + "'");
  }
  b.graph = Graph(n, load_edges(dir / "graph.tsv", n), std::move(x));
  if (fs::exists(dir / "labels.tsv"))
  {
    b.labels = load_labels(dir / "labels.tsv", n);
  }
  if (fs::exists(dir / "queries.tsv"))
  {
    b.queries = load_queries(dir / "queries.tsv", n);
  }
  return b;
}

void save_bundle(DatasetBundle const &b, fs::path const &dir, FeatureFormat format)
{
  fs::create_directories(dir);
  Graph const &g = b.graph;
  if (format == FeatureFormat::automatic)
  {
    format = g.num_nodes() > kBinaryFeatureThreshold ? FeatureFormat::binary : FeatureFormat::csv;
  }
  store::Json meta = {{"name", b.name},
                      {"num_nodes", g.num_nodes()},
                      {"feature_dim", g.feature_dim()},
                      {"communities", b.communities},
                      {"overlapping", b.overlapping},
                      {"feature_format", format == FeatureFormat::csv ? "csv" : "binary"}};
  io::write_text(dir / "meta.json", meta.dump(2) + "\n");

  std::ostringstream edges;
  for (auto const &e : g.edge_list())
  {
    edges << e.u << '\t' << e.v << '\n';
  }
  io::write_text(dir / "graph.tsv", edges.str());

  if (format == FeatureFormat::csv)
  {
    save_csv_features(g.features(), dir / "features.csv");
  }
  else
  {
    fs::create_directories(dir / "features");
    store::Json m = {{"format_version", 1}, {"byte_order", "little"}};
    m["features"] = store::save_matrix(g.features(), "features", dir / "features");
    store::write_manifest(m, dir / "features");
  }
  if (b.labels)
  {
    save_labels(*b.labels, dir / "labels.tsv");
  }
  if (!b.queries.empty())
  {
    save_queries(b.queries, dir / "queries.tsv");
  }
}

void SbmParams::validate() const
{
  if (blocks == 0 || block_size == 0 || feature_dim == 0)
  {
    throw InvalidArgument("sbm: blocks, block size and feature dim must be positive");
  }
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0))
  {
    throw InvalidArgument("sbm: probabilities must lie in [0, 1]");
  }
  if (!(overlap >= 0.0 && overlap <= 1.0) || (overlap > 0.0 && blocks < 2))
  {
    throw InvalidArgument("sbm: overlap must lie in [0, 1] and needs two blocks");
  }
}

DatasetBundle sbm_generate(SbmParams const &p)
{
  p.validate();
  std::size_t const n = p.blocks * p.block_size;
  std::mt19937_64   rng(p.seed);

  LabelSet labels(n);
  for (NodeId v = 0; v < n; ++v)
  {
    labels[v] = {static_cast<std::uint32_t>(v / p.block_size)};
  }
  auto const shared_count = static_cast<std::size_t>(std::llround(p.overlap * static_cast<double>(n)));
  if (shared_count > 0)
  {
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_int_distribution<std::uint32_t> other(0, static_cast<std::uint32_t>(p.blocks - 2));
    for (std::size_t i = 0; i < shared_count; ++i)
    {
      NodeId const  v      = order[i];
      std::uint32_t second = other(rng);
      second += second >= labels[v][0] ? 1 : 0;
      labels[v].push_back(second);
      std::sort(labels[v].begin(), labels[v].end());
    }
  }

  std::vector<std::uint64_t> member(n);
  for (NodeId v = 0; v < n; ++v)
  {
    for (auto c : labels[v])
    {
      member[v] |= std::uint64_t{1} << (c % 64);
    }
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge>                      edges;
  for (NodeId u = 0; u < n; ++u)
  {
    for (NodeId v = u + 1; v < n; ++v)
    {
      int const    shared = std::popcount(member[u] & member[v]);
      double const prob   = shared > 0 ? 1.0 - std::pow(1.0 - p.p_in, shared) : p.p_out;
      if (unit(rng) < prob)
      {
        edges.push_back({u, v});
      }
    }
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  double const                     mean_scale = p.separation / std::sqrt(static_cast<double>(p.feature_dim));
  Matrix                           means(p.blocks, p.feature_dim);
  for (auto &m : means.data)
  {
    m = static_cast<float>(normal(rng) * mean_scale);
  }
  Matrix x(n, p.feature_dim);
  for (NodeId v = 0; v < n; ++v)
  {
    for (std::size_t j = 0; j < p.feature_dim; ++j)
    {
      double mu = 0.0;
      for (auto c : labels[v])
      {
        mu += means(c, j);
      }
      x(v, j) = static_cast<float>(mu / static_cast<double>(labels[v].size()) + normal(rng));
    }
  }

  DatasetBundle b;
  b.name        = p.name;
  b.graph       = Graph(n, edges, std::move(x));
  b.labels      = std::move(labels);
  b.communities = p.blocks;
  b.overlapping = shared_count > 0;
  return b;
}

std::vector<Query> sample_queries(DatasetBundle const &bundle, QuerySamplerOptions const &o)
{
  if (!bundle.labels)
  {
    throw InvalidArgument("sample_queries: bundle has no labels");
  }
  if (!(o.rate >= 0.0 && o.rate <= 1.0))
  {
    throw InvalidArgument("sample_queries: rate must lie in [0, 1]");
  }
  if (o.min_size == 0 || o.min_size > o.max_size)
  {
    throw InvalidArgument("sample_queries: need 1 <= min_size <= max_size");
  }
  std::size_t const n     = bundle.graph.num_nodes();
  auto const        comms = communities_of(*bundle.labels);
  std::mt19937_64   rng(o.seed);
  std::vector<Query> out;
  std::map<std::uint32_t, std::vector<NodeId>> by_id;
  for (NodeId v = 0; v < n; ++v)
  {
    for (auto c : (*bundle.labels)[v])
    {
      by_id[c].push_back(v);
    }
  }
  std::uniform_int_distribution<std::size_t> size_dist(o.min_size, o.max_size);
  for (auto &[cid, members] : by_id)
  {
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::set<NodeId> const inside(members.begin(), members.end());
    std::vector<NodeId>    outside;
    for (NodeId v = 0; v < n; ++v)
    {
      if (!inside.count(v))
      {
        outside.push_back(v);
      }
    }
    if (members.size() < o.max_size + o.positives || outside.size() < o.negatives)
    {
      warn("sample_queries: community " + std::to_string(cid) + " too small, skipped");
      continue;
    }
    std::size_t const count =
        o.rate > 0.0 ? static_cast<std::size_t>(std::ceil(o.rate * static_cast<double>(members.size())))
                     : o.per_community;
    for (std::size_t k = 0; k < count; ++k)
    {
      std::vector<NodeId> pool = members;
      std::shuffle(pool.begin(), pool.end(), rng);
      std::size_t const s = size_dist(rng);
      Query             q;
      q.id        = "q" + std::to_string(out.size());
      q.nodes     = {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s)};
      q.positives = {pool.begin() + static_cast<std::ptrdiff_t>(s),
                     pool.begin() + static_cast<std::ptrdiff_t>(s + o.positives)};
      std::vector<NodeId> neg = outside;
      std::shuffle(neg.begin(), neg.end(), rng);
      q.negatives = {neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(o.negatives)};
      out.push_back(std::move(q));
    }
  }
  return out;
}

std::vector<NodeId> query_truth(LabelSet const &labels, Query const &query)
{
  std::set<std::uint32_t> common;
  for (std::size_t i = 0; i < query.nodes.size(); ++i)
  {
    auto const &ls = labels.at(query.nodes[i]);
    std::set<std::uint32_t> mine(ls.begin(), ls.end());
    if (i == 0)
    {
      common = std::move(mine);
      continue;
    }
    std::set<std::uint32_t> keep;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                          std::inserter(keep, keep.begin()));
    common = std::move(keep);
  }
  if (common.empty())
  {
    throw InvalidArgument("query " + query.id + ": nodes share no community");
  }
  std::uint32_t const c = *common.begin();
  std::vector<NodeId> out;
  for (NodeId v = 0; v < labels.size(); ++v)
  {
    if (std::find(labels[v].begin(), labels[v].end(), c) != labels[v].end())
    {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace unicom
