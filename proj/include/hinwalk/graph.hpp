#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hinwalk/common.hpp"
#include "hinwalk/rng.hpp"

namespace hinwalk {

// Type-level graph: which node types exist and which type pairs may connect.
class MetaSchema {
 public:
  type_id add_type(std::string name);
  type_id require_type(std::string_view name) const;
  std::optional<type_id> find_type(std::string_view name) const;
  void add_edge(type_id a, type_id b);

  type_id type_count() const { return static_cast<type_id>(names_.size()); }
  const std::string& type_name(type_id t) const { return names_.at(t); }
  bool has_edge(type_id a, type_id b) const;
  const std::vector<type_id>& adjacent_types(type_id t) const {
    return adjacent_.at(t);
  }
  // Canonical (min,max) pairs, sorted.
  const std::vector<std::pair<type_id, type_id>>& edges() const {
    return edges_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, type_id> by_name_;
  std::vector<std::pair<type_id, type_id>> edges_;
  std::vector<std::vector<type_id>> adjacent_;
};

// Immutable multi-typed graph. Undirected edges are stored in both
// directions; each node's neighbors are grouped by type and sorted by id so
// sampling is reproducible across platforms. Safe for concurrent reads.
class TypedGraph {
 public:
  class Builder;

  // One typed run inside a node's neighbor list: neighbors of type `type`
  // end at nbr_[end] (exclusive).
  struct Segment {
    type_id type;
    std::uint32_t end;
  };

  node_id node_count() const { return static_cast<node_id>(type_of_.size()); }
  std::size_t edge_count() const { return edge_count_; }
  type_id type_count() const { return static_cast<type_id>(type_names_.size()); }

  type_id node_type(node_id v) const { return type_of_[v]; }
  const std::string& node_name(node_id v) const { return names_[v]; }
  std::optional<node_id> find_node(std::string_view name) const;
  const std::string& type_name(type_id t) const { return type_names_.at(t); }
  std::optional<type_id> find_type(std::string_view name) const;

  std::span<const node_id> neighbors(node_id u, type_id t) const;
  std::uint32_t typed_degree(node_id u, type_id t) const {
    return static_cast<std::uint32_t>(neighbors(u, t).size());
  }
  std::uint32_t degree(node_id u) const {
    return meta_[u + 1].nbr_begin - meta_[u].nbr_begin;
  }
  // Typed neighbor runs of u, ascending by type.
  std::span<const Segment> segments(node_id u) const {
    return {segs_.data() + meta_[u].seg_begin,
            static_cast<std::size_t>(meta_[u + 1].seg_begin -
                                     meta_[u].seg_begin)};
  }
  // Types t with typed_degree(u, t) > 0, ascending.
  std::vector<type_id> adjacent_types(node_id u) const;
  const std::vector<node_id>& nodes_of_type(type_id t) const {
    return by_type_.at(t);
  }

  // Eq-style first-order probability W(src,dst)/D(src, dst_type).
  double transition_prob(node_id src, type_id dst_type, node_id dst) const;
  node_id sample_typed_neighbor(node_id src, type_id dst_type, Rng& rng) const;

  MetaSchema derive_schema() const;

  // All undirected edges once, as (u, v) with u < v, sorted.
  std::vector<std::pair<node_id, node_id>> edge_list() const;

 private:
  struct NodeMeta {
    std::uint32_t nbr_begin;
    std::uint32_t seg_begin;
  };

  std::vector<std::string> names_;
  std::unordered_map<std::string, node_id> by_name_;
  std::vector<type_id> type_of_;
  std::vector<std::string> type_names_;
  std::unordered_map<std::string, type_id> type_by_name_;
  std::vector<std::vector<node_id>> by_type_;
  std::size_t edge_count_ = 0;

  // CSR with per-node type segments: nbr_[meta_[u].nbr_begin ..
  // meta_[u+1].nbr_begin) holds u's neighbors sorted by (type, id); segs_
  // carries the typed runs. Offsets are 32-bit to keep the walk working set
  // small; builds beyond 2^32 half-edges are rejected.
  std::vector<node_id> nbr_;
  std::vector<Segment> segs_;
  std::vector<NodeMeta> meta_;  // n + 1 entries, sentinel at the end
};

class TypedGraph::Builder {
 public:
  node_id add_node(std::string name, const std::string& type_name);
  void add_edge(node_id u, node_id v);
  void add_edge(std::string_view u_name, std::string_view v_name);
  node_id node_count() const { return static_cast<node_id>(type_of_.size()); }
  TypedGraph build() &&;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, node_id> by_name_;
  std::vector<type_id> type_of_;
  std::vector<std::string> type_names_;
  std::unordered_map<std::string, type_id> type_by_name_;
  std::vector<std::pair<node_id, node_id>> edges_;
};

// Nodes file: `<id> <TAB> <type>`; edges file: `<src> <TAB> <dst>` with an
// optional ignored relation column; `#` starts a comment in both.
TypedGraph load_graph(const std::string& nodes_path,
                      const std::string& edges_path);
void save_graph(const TypedGraph& g, const std::string& nodes_path,
                const std::string& edges_path);

struct SynthConfig {
  std::uint64_t n_nodes = 1000;
  double avg_degree = 10.0;
  std::uint64_t seed = 1;
  // Aligned with schema type ids; must sum to 1.
  std::vector<double> type_proportions;
  // 0 disables the planted-community mode.
  std::uint32_t communities = 0;
  double intra_community_bias = 0.8;
};

struct SyntheticGraph {
  TypedGraph graph;
  // Per-node latent block label; empty unless communities were requested.
  std::vector<std::uint32_t> community;
};

SyntheticGraph generate_synthetic(const MetaSchema& schema,
                                  const SynthConfig& cfg);

// Synth schema spec: `type <name> <proportion>` and `edge <a> <b>` lines.
struct SchemaSpec {
  MetaSchema schema;
  std::vector<double> proportions;
};
SchemaSpec parse_schema_spec(const std::string& path);

}  // namespace hinwalk
