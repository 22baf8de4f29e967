#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hinwalk/graph.hpp"

namespace hinwalk {

// Cyclic sequence of node types with its detected Markov order and the
// factorized fixed-length windows that drive constrained walking.
struct MetaPath {
  // A_1..A_{L+1}; front() == back().
  std::vector<type_id> types;
  unsigned order = 0;
  // k-tuple of consecutive types -> unique successor type.
  std::map<std::vector<type_id>, type_id> windows;

  std::size_t length() const { return types.size() - 1; }
  type_id source_type() const { return types.front(); }
  // Type preceding A_1 on the cycle (the wrap window context).
  type_id wrap_type() const { return types[length() - 1]; }
  std::string to_string(const MetaSchema& schema) const;
};

// Smallest k such that every cyclic length-k type window has a unique
// successor. `cyclic` is A_1..A_L (the closing A_{L+1} dropped).
unsigned chain_order(const std::vector<type_id>& cyclic);

std::map<std::vector<type_id>, type_id> factorize(
    const std::vector<type_id>& cyclic, unsigned order);

MetaPath parse_metapath(std::string_view spec, const MetaSchema& schema);

// Type-level folding of a meta-path: all (predecessor, current) -> next
// transitions a spacey process may take. Order-1 paths are lifted to
// degenerate pair windows; orders above 2 are rejected.
class SpaceyGraph {
 public:
  explicit SpaceyGraph(const MetaPath& mp);

  std::optional<type_id> successor(type_id pred, type_id cur) const;
  // Valid predecessor types of `cur`, ascending; empty if none.
  std::span<const type_id> predecessors(type_id cur) const;
  const std::map<std::pair<type_id, type_id>, type_id>& context_successors()
      const {
    return successors_;
  }

 private:
  std::map<std::pair<type_id, type_id>, type_id> successors_;
  std::map<type_id, std::vector<type_id>> predecessors_;
};

inline SpaceyGraph build_spacey_graph(const MetaPath& mp) {
  return SpaceyGraph(mp);
}

// Union of member meta-paths sharing one source type.
struct MetaGraph {
  std::vector<MetaPath> members;
  type_id source_type = 0;
  // (pred, cur) -> sorted set of candidate next types.
  std::map<std::pair<type_id, type_id>, std::vector<type_id>> successor_types;
  std::map<type_id, std::vector<type_id>> predecessor_types;
  // Distinct wrap types of the members; start-of-walk contexts.
  std::vector<type_id> start_contexts;

  std::span<const type_id> successors(type_id pred, type_id cur) const;
  std::span<const type_id> predecessors(type_id cur) const;
};

MetaGraph parse_metagraph(const std::vector<std::string>& specs,
                          const MetaSchema& schema);

// One meta-path per non-empty line.
std::vector<std::string> read_metapath_lines(const std::string& path);

}  // namespace hinwalk
