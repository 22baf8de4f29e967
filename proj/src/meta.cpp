#include "hinwalk/meta.hpp"

#include <algorithm>
#include <fstream>

namespace hinwalk {

std::string MetaPath::to_string(const MetaSchema& schema) const {
  std::string out;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += '-';
    out += schema.type_name(types[i]);
  }
  return out;
}

unsigned chain_order(const std::vector<type_id>& cyclic) {
  const std::size_t len = cyclic.size();
  if (len == 0) fail("empty type sequence");
  for (unsigned k = 1; k <= len; ++k) {
    std::map<std::vector<type_id>, type_id> windows;
    bool unique = true;
    for (std::size_t l = 0; l < len && unique; ++l) {
      std::vector<type_id> key(k);
      for (unsigned i = 0; i < k; ++i) key[i] = cyclic[(l + i) % len];
      const type_id next = cyclic[(l + k) % len];
      auto [it, inserted] = windows.emplace(std::move(key), next);
      if (!inserted && it->second != next) unique = false;
    }
    if (unique) return k;
  }
  // Unreachable for cyclic sequences: k = L windows are full rotations.
  fail("meta-path not realizable as a finite-order chain");
}

std::map<std::vector<type_id>, type_id> factorize(
    const std::vector<type_id>& cyclic, unsigned order) {
  const std::size_t len = cyclic.size();
  std::map<std::vector<type_id>, type_id> windows;
  for (std::size_t l = 0; l < len; ++l) {
    std::vector<type_id> key(order);
    for (unsigned i = 0; i < order; ++i) key[i] = cyclic[(l + i) % len];
    windows[std::move(key)] = cyclic[(l + order) % len];
  }
  return windows;
}

MetaPath parse_metapath(std::string_view spec, const MetaSchema& schema) {
  std::vector<std::string> tokens;
  if (spec.find('-') != std::string_view::npos) {
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      auto dash = spec.find('-', pos);
      if (dash == std::string_view::npos) dash = spec.size();
      tokens.emplace_back(spec.substr(pos, dash - pos));
      pos = dash + 1;
    }
  } else {
    // Juxtaposed single-letter type names, e.g. "APVPA".
    for (char c : spec) tokens.emplace_back(1, c);
  }
  if (tokens.size() < 2) fail("meta-path '", spec, "' needs at least two types");

  MetaPath mp;
  mp.types.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto t = schema.find_type(tok);
    if (!t) fail("meta-path '", spec, "': unknown type name '", tok, "'");
    mp.types.push_back(*t);
  }
  for (std::size_t i = 0; i + 1 < mp.types.size(); ++i) {
    if (!schema.has_edge(mp.types[i], mp.types[i + 1]))
      fail("meta-path '", spec, "': schema has no edge ",
           schema.type_name(mp.types[i]), "-", schema.type_name(mp.types[i + 1]));
  }
  if (mp.types.front() != mp.types.back())
    fail("meta-path '", spec,
         "' is not cyclic; append the reverse path to symmetrize it (e.g. "
         "A-P-V becomes A-P-V-P-A)");

  std::vector<type_id> cyclic(mp.types.begin(), mp.types.end() - 1);
  mp.order = chain_order(cyclic);
  mp.windows = factorize(cyclic, mp.order);
  return mp;
}

SpaceyGraph::SpaceyGraph(const MetaPath& mp) {
  if (mp.order > 2)
    fail("unsupported order ", mp.order,
         ": spacey walking is defined for second-order meta-paths");
  std::vector<type_id> cyclic(mp.types.begin(), mp.types.end() - 1);
  // Degenerate lift for order-1 paths; identical to mp.windows at order 2.
  for (const auto& [key, next] : factorize(cyclic, 2)) {
    successors_.emplace(std::make_pair(key[0], key[1]), next);
  }
  for (const auto& [key, next] : successors_) {
    auto& preds = predecessors_[key.second];
    auto pos = std::lower_bound(preds.begin(), preds.end(), key.first);
    if (pos == preds.end() || *pos != key.first) preds.insert(pos, key.first);
    (void)next;
  }
}

std::optional<type_id> SpaceyGraph::successor(type_id pred, type_id cur) const {
  auto it = successors_.find({pred, cur});
  if (it == successors_.end()) return std::nullopt;
  return it->second;
}

std::span<const type_id> SpaceyGraph::predecessors(type_id cur) const {
  auto it = predecessors_.find(cur);
  if (it == predecessors_.end()) return {};
  return {it->second.data(), it->second.size()};
}

std::span<const type_id> MetaGraph::successors(type_id pred, type_id cur) const {
  auto it = successor_types.find({pred, cur});
  if (it == successor_types.end()) return {};
  return {it->second.data(), it->second.size()};
}

std::span<const type_id> MetaGraph::predecessors(type_id cur) const {
  auto it = predecessor_types.find(cur);
  if (it == predecessor_types.end()) return {};
  return {it->second.data(), it->second.size()};
}

MetaGraph parse_metagraph(const std::vector<std::string>& specs,
                          const MetaSchema& schema) {
  if (specs.empty()) fail("meta-graph needs at least one member meta-path");
  MetaGraph mg;
  for (const auto& spec : specs) mg.members.push_back(parse_metapath(spec, schema));
  mg.source_type = mg.members.front().source_type();
  for (const auto& member : mg.members) {
    if (member.source_type() != mg.source_type)
      fail("meta-graph members must share one source type; got '",
           schema.type_name(mg.source_type), "' and '",
           schema.type_name(member.source_type()), "'");
  }

  auto insert_sorted = [](std::vector<type_id>& v, type_id t) {
    auto pos = std::lower_bound(v.begin(), v.end(), t);
    if (pos == v.end() || *pos != t) v.insert(pos, t);
  };
  for (const auto& member : mg.members) {
    SpaceyGraph sg(member);
    for (const auto& [key, next] : sg.context_successors()) {
      insert_sorted(mg.successor_types[key], next);
      insert_sorted(mg.predecessor_types[key.second], key.first);
    }
    insert_sorted(mg.start_contexts, member.wrap_type());
  }
  return mg;
}

std::vector<std::string> read_metapath_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open meta-path spec '", path, "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed;
    for (char c : line) {
      if (c == '#') break;
      trimmed += c;
    }
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t'))
      trimmed.pop_back();
    std::size_t start = 0;
    while (start < trimmed.size() &&
           (trimmed[start] == ' ' || trimmed[start] == '\t'))
      ++start;
    trimmed = trimmed.substr(start);
    if (!trimmed.empty()) lines.push_back(trimmed);
  }
  return lines;
}

}  // namespace hinwalk
