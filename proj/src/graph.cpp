#include "hinwalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace hinwalk {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != '\t' && line[pos] != ' ') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::uint64_t encode_pair(node_id u, node_id v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

type_id MetaSchema::add_type(std::string name) {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  const type_id t = static_cast<type_id>(names_.size());
  by_name_.emplace(name, t);
  names_.push_back(std::move(name));
  adjacent_.emplace_back();
  return t;
}

std::optional<type_id> MetaSchema::find_type(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

type_id MetaSchema::require_type(std::string_view name) const {
  auto t = find_type(name);
  if (!t) fail("unknown type name '", name, "'");
  return *t;
}

void MetaSchema::add_edge(type_id a, type_id b) {
  if (a >= type_count() || b >= type_count()) fail("schema edge on unknown type id");
  auto pair = std::minmax(a, b);
  auto edge = std::make_pair(pair.first, pair.second);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), edge);
  if (it != edges_.end() && *it == edge) return;
  edges_.insert(it, edge);
  auto link = [this](type_id x, type_id y) {
    auto& adj = adjacent_[x];
    auto pos = std::lower_bound(adj.begin(), adj.end(), y);
    if (pos == adj.end() || *pos != y) adj.insert(pos, y);
  };
  link(a, b);
  link(b, a);
}

bool MetaSchema::has_edge(type_id a, type_id b) const {
  auto pair = std::minmax(a, b);
  auto edge = std::make_pair(pair.first, pair.second);
  return std::binary_search(edges_.begin(), edges_.end(), edge);
}

std::optional<node_id> TypedGraph::find_node(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<type_id> TypedGraph::find_type(std::string_view name) const {
  auto it = type_by_name_.find(std::string(name));
  if (it == type_by_name_.end()) return std::nullopt;
  return it->second;
}

std::span<const node_id> TypedGraph::neighbors(node_id u, type_id t) const {
  const std::uint32_t lo = meta_[u].seg_begin;
  const std::uint32_t hi = meta_[u + 1].seg_begin;
  for (std::uint32_t q = lo; q < hi; ++q) {
    const Segment& seg = segs_[q];
    if (seg.type == t) {
      const std::uint32_t begin =
          (q == lo) ? meta_[u].nbr_begin : segs_[q - 1].end;
      return {nbr_.data() + begin, static_cast<std::size_t>(seg.end - begin)};
    }
    if (seg.type > t) break;
  }
  return {};
}

std::vector<type_id> TypedGraph::adjacent_types(node_id u) const {
  std::vector<type_id> types;
  for (const Segment& seg : segments(u)) types.push_back(seg.type);
  return types;
}

double TypedGraph::transition_prob(node_id src, type_id dst_type,
                                   node_id dst) const {
  auto span = neighbors(src, dst_type);
  if (span.empty())
    fail("no neighbor of required type '", type_name(dst_type), "' at node '",
         node_name(src), "'");
  const bool adjacent = std::binary_search(span.begin(), span.end(), dst);
  return adjacent ? 1.0 / static_cast<double>(span.size()) : 0.0;
}

node_id TypedGraph::sample_typed_neighbor(node_id src, type_id dst_type,
                                          Rng& rng) const {
  auto span = neighbors(src, dst_type);
  if (span.empty())
    fail("no neighbor of required type '", type_name(dst_type), "' at node '",
         node_name(src), "'");
  return span[rng.next_below(span.size())];
}

MetaSchema TypedGraph::derive_schema() const {
  MetaSchema schema;
  for (const auto& name : type_names_) schema.add_type(name);
  for (node_id u = 0; u < node_count(); ++u) {
    for (type_id t : adjacent_types(u)) schema.add_edge(node_type(u), t);
  }
  return schema;
}

std::vector<std::pair<node_id, node_id>> TypedGraph::edge_list() const {
  std::vector<std::pair<node_id, node_id>> edges;
  edges.reserve(edge_count_);
  for (node_id u = 0; u < node_count(); ++u) {
    for (std::uint64_t q = node_off_[u]; q < node_off_[u + 1]; ++q) {
      const node_id v = nbr_[q];
      if (u < v) edges.emplace_back(u, v);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

node_id TypedGraph::Builder::add_node(std::string name,
                                      const std::string& type_name) {
  type_id t;
  if (auto it = type_by_name_.find(type_name); it != type_by_name_.end()) {
    t = it->second;
  } else {
    t = static_cast<type_id>(type_names_.size());
    type_by_name_.emplace(type_name, t);
    type_names_.push_back(type_name);
  }
  if (auto it = by_name_.find(name); it != by_name_.end()) {
    if (type_of_[it->second] != t)
      fail("node '", name, "' declared with two different types");
    return it->second;
  }
  const node_id v = static_cast<node_id>(names_.size());
  by_name_.emplace(name, v);
  names_.push_back(std::move(name));
  type_of_.push_back(t);
  return v;
}

void TypedGraph::Builder::add_edge(node_id u, node_id v) {
  if (u >= node_count() || v >= node_count()) fail("edge references unknown node id");
  if (u == v) fail("self-loop on node '", names_[u], "'");
  edges_.emplace_back(u, v);
}

void TypedGraph::Builder::add_edge(std::string_view u_name,
                                   std::string_view v_name) {
  auto lookup = [this](std::string_view name) {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) fail("unknown node '", name, "'");
    return it->second;
  };
  add_edge(lookup(u_name), lookup(v_name));
}

TypedGraph TypedGraph::Builder::build() && {
  TypedGraph g;
  g.names_ = std::move(names_);
  g.by_name_ = std::move(by_name_);
  g.type_of_ = std::move(type_of_);
  g.type_names_ = std::move(type_names_);
  g.type_by_name_ = std::move(type_by_name_);

  const node_id n = g.node_count();
  g.by_type_.assign(g.type_names_.size(), {});
  for (node_id v = 0; v < n; ++v) g.by_type_[g.type_of_[v]].push_back(v);

  // Deduplicate before building adjacency; both directions stored.
  std::sort(edges_.begin(), edges_.end(),
            [](const auto& a, const auto& b) {
              return std::minmax(a.first, a.second) <
                     std::minmax(b.first, b.second);
            });
  edges_.erase(std::unique(edges_.begin(), edges_.end(),
                           [](const auto& a, const auto& b) {
                             return std::minmax(a.first, a.second) ==
                                    std::minmax(b.first, b.second);
                           }),
               edges_.end());
  g.edge_count_ = edges_.size();

  if (2 * g.edge_count_ >= std::numeric_limits<std::uint32_t>::max())
    fail("graph too large for 32-bit adjacency offsets");

  std::vector<std::vector<node_id>> adj(n);
  for (auto [u, v] : edges_) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  g.nbr_.reserve(2 * g.edge_count_);
  g.meta_.reserve(n + 1);
  for (node_id u = 0; u < n; ++u) {
    auto& list = adj[u];
    std::sort(list.begin(), list.end(), [&g](node_id a, node_id b) {
      return std::make_pair(g.type_of_[a], a) < std::make_pair(g.type_of_[b], b);
    });
    g.meta_.push_back({static_cast<std::uint32_t>(g.nbr_.size()),
                       static_cast<std::uint32_t>(g.segs_.size())});
    for (std::size_t i = 0; i < list.size(); ++i) {
      g.nbr_.push_back(list[i]);
      const type_id t = g.type_of_[list[i]];
      if (i == 0 || g.type_of_[list[i - 1]] != t)
        g.segs_.push_back({t, static_cast<std::uint32_t>(g.nbr_.size())});
      else
        g.segs_.back().end = static_cast<std::uint32_t>(g.nbr_.size());
    }
    list.clear();
    list.shrink_to_fit();
  }
  g.meta_.push_back({static_cast<std::uint32_t>(g.nbr_.size()),
                     static_cast<std::uint32_t>(g.segs_.size())});
  return g;
}

TypedGraph load_graph(const std::string& nodes_path,
                      const std::string& edges_path) {
  std::ifstream nodes(nodes_path);
  if (!nodes) fail("cannot open nodes file '", nodes_path, "'");
  TypedGraph::Builder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(nodes, line)) {
    ++line_no;
    auto fields = split_fields(strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() != 2)
      fail(nodes_path, ":", line_no, ": malformed node line (want `<id> <type>`)");
    builder.add_node(std::string(fields[0]), std::string(fields[1]));
  }

  std::ifstream edges(edges_path);
  if (!edges) fail("cannot open edges file '", edges_path, "'");
  line_no = 0;
  while (std::getline(edges, line)) {
    ++line_no;
    auto fields = split_fields(strip_comment(line));
    if (fields.empty()) continue;
    if (fields.size() != 2 && fields.size() != 3)
      fail(edges_path, ":", line_no, ": malformed edge line (want `<src> <dst>`)");
    try {
      builder.add_edge(fields[0], fields[1]);
    } catch (const Error& e) {
      fail(edges_path, ":", line_no, ": ", e.what());
    }
  }
  return std::move(builder).build();
}

void save_graph(const TypedGraph& g, const std::string& nodes_path,
                const std::string& edges_path) {
  std::ofstream nodes(nodes_path);
  if (!nodes) fail("cannot write nodes file '", nodes_path, "'");
  for (node_id v = 0; v < g.node_count(); ++v)
    nodes << g.node_name(v) << '\t' << g.type_name(g.node_type(v)) << '\n';

  std::ofstream edges(edges_path);
  if (!edges) fail("cannot write edges file '", edges_path, "'");
  for (auto [u, v] : g.edge_list())
    edges << g.node_name(u) << '\t' << g.node_name(v) << '\n';
}

SyntheticGraph generate_synthetic(const MetaSchema& schema,
                                  const SynthConfig& cfg) {
  if (schema.edges().empty()) fail("schema has no type edges");
  if (cfg.type_proportions.size() != schema.type_count())
    fail("need one proportion per schema type");
  double total = 0;
  for (double p : cfg.type_proportions) {
    if (p < 0) fail("negative type proportion");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("type proportions must sum to 1");
  if (cfg.avg_degree < 1.0) fail("avg_degree must be >= 1");

  const type_id tc = schema.type_count();

  // Largest-remainder allocation of node counts per type.
  std::vector<std::uint64_t> count(tc, 0);
  std::vector<std::pair<double, type_id>> remainder;
  std::uint64_t assigned = 0;
  for (type_id t = 0; t < tc; ++t) {
    const double exact = cfg.type_proportions[t] * static_cast<double>(cfg.n_nodes);
    count[t] = static_cast<std::uint64_t>(exact);
    assigned += count[t];
    remainder.emplace_back(exact - std::floor(exact), t);
  }
  std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
    return std::make_pair(-a.first, a.second) < std::make_pair(-b.first, b.second);
  });
  for (std::size_t i = 0; assigned < cfg.n_nodes; ++i, ++assigned)
    count[remainder[i % remainder.size()].second]++;

  TypedGraph::Builder builder;
  std::vector<std::vector<node_id>> of_type(tc);
  for (type_id t = 0; t < tc; ++t) {
    of_type[t].reserve(count[t]);
    for (std::uint64_t i = 0; i < count[t]; ++i) {
      of_type[t].push_back(
          builder.add_node(cat(schema.type_name(t), "_", i), schema.type_name(t)));
    }
  }

  const std::uint32_t blocks = cfg.communities;
  std::vector<std::uint32_t> community;
  std::vector<std::vector<std::vector<node_id>>> of_type_block;
  if (blocks > 0) {
    community.assign(builder.node_count(), 0);
    of_type_block.assign(tc, std::vector<std::vector<node_id>>(blocks));
    for (type_id t = 0; t < tc; ++t) {
      for (std::size_t i = 0; i < of_type[t].size(); ++i) {
        const auto b = static_cast<std::uint32_t>(i % blocks);
        community[of_type[t][i]] = b;
        of_type_block[t][b].push_back(of_type[t][i]);
      }
    }
  }

  // Edge budget per schema pair, proportional to the pair's population
  // product and capped at the number of distinct simple edges.
  auto pair_cap = [&](type_id a, type_id b) -> double {
    if (a == b)
      return 0.5 * static_cast<double>(count[a]) *
             static_cast<double>(count[a] > 0 ? count[a] - 1 : 0);
    return static_cast<double>(count[a]) * static_cast<double>(count[b]);
  };
  const double m_target = cfg.n_nodes * cfg.avg_degree / 2.0;
  double weight_sum = 0;
  for (auto [a, b] : schema.edges()) weight_sum += pair_cap(a, b);
  if (weight_sum <= 0) fail("schema pairs have no candidate node pairs");

  Rng rng(Rng::stream(cfg.seed, 0x5e15, cfg.n_nodes));
  std::unordered_set<std::uint64_t> seen;
  for (auto [a, b] : schema.edges()) {
    const double cap = pair_cap(a, b);
    const auto quota = static_cast<std::uint64_t>(
        std::min(cap, std::round(m_target * cap / weight_sum)));
    std::uint64_t placed = 0;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 50 * quota + 100;
    while (placed < quota && attempts < max_attempts) {
      ++attempts;
      node_id u, v;
      if (blocks > 0 && rng.next_double() < cfg.intra_community_bias) {
        const auto blk = static_cast<std::uint32_t>(rng.next_below(blocks));
        const auto& ua = of_type_block[a][blk];
        const auto& vb = of_type_block[b][blk];
        if (ua.empty() || vb.empty()) continue;
        u = ua[rng.next_below(ua.size())];
        v = vb[rng.next_below(vb.size())];
      } else {
        if (of_type[a].empty() || of_type[b].empty()) break;
        u = of_type[a][rng.next_below(of_type[a].size())];
        v = of_type[b][rng.next_below(of_type[b].size())];
      }
      if (u == v) continue;
      if (!seen.insert(encode_pair(u, v)).second) continue;
      builder.add_edge(u, v);
      ++placed;
    }
  }

  SyntheticGraph out{std::move(builder).build(), std::move(community)};
  return out;
}

SchemaSpec parse_schema_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open schema spec '", path, "'");
  SchemaSpec spec;
  std::vector<std::pair<std::string, std::string>> pending_edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(strip_comment(line));
    if (fields.empty()) continue;
    if (fields[0] == "type" && fields.size() == 3) {
      spec.schema.add_type(std::string(fields[1]));
      try {
        spec.proportions.push_back(std::stod(std::string(fields[2])));
      } catch (const std::exception&) {
        fail(path, ":", line_no, ": bad proportion '", fields[2], "'");
      }
    } else if (fields[0] == "edge" && fields.size() == 3) {
      pending_edges.emplace_back(std::string(fields[1]), std::string(fields[2]));
    } else {
      fail(path, ":", line_no, ": expected `type <name> <prop>` or `edge <a> <b>`");
    }
  }
  for (const auto& [a, b] : pending_edges)
    spec.schema.add_edge(spec.schema.require_type(a), spec.schema.require_type(b));
  return spec;
}

}  // namespace hinwalk
