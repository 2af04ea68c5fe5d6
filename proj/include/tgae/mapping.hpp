#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tgae/error.hpp"

namespace tgae {

/// Which algorithm produced a node mapping.
enum class MatcherKind { Greedy, Exact, ApproxNN, GroundTruth };

inline const char* to_string(MatcherKind k) {
  switch (k) {
    case MatcherKind::Greedy: return "greedy";
    case MatcherKind::Exact: return "exact";
    case MatcherKind::ApproxNN: return "approx_nn";
    case MatcherKind::GroundTruth: return "ground_truth";
  }
  return "?";
}

inline MatcherKind matcher_from_string(const std::string& s) {
  if (s == "greedy") return MatcherKind::Greedy;
  if (s == "exact") return MatcherKind::Exact;
  if (s == "approx_nn") return MatcherKind::ApproxNN;
  if (s == "ground_truth") return MatcherKind::GroundTruth;
  throw InvalidArgument("unknown matcher '" + s + "' (expected greedy|exact|approx_nn)");
}

struct MatchedPair {
  std::size_t source;
  std::size_t target;
  std::optional<double> distance;

  friend bool operator==(const MatchedPair& a, const MatchedPair& b) {
    return a.source == b.source && a.target == b.target;
  }
};

/// Injective partial map from source-graph nodes to target-graph nodes.
class NodeMapping {
 public:
  NodeMapping() = default;
  explicit NodeMapping(MatcherKind tag) : tag_(tag) {}

  /// Builds the total mapping i -> targets[i].
  static NodeMapping from_targets(const std::vector<std::size_t>& targets,
                                  MatcherKind tag = MatcherKind::GroundTruth) {
    NodeMapping m(tag);
    for (std::size_t i = 0; i < targets.size(); ++i) m.add(i, targets[i]);
    return m;
  }

  void add(std::size_t source, std::size_t target, std::optional<double> distance = std::nullopt) {
    if (forward_.contains(source))
      throw InvalidArgument("mapping: source node " + std::to_string(source) + " mapped twice");
    if (targets_.contains(target))
      throw InvalidArgument("mapping: target node " + std::to_string(target) + " mapped twice");
    forward_.emplace(source, target);
    targets_.insert(target);
    pairs_.push_back({source, target, distance});
  }

  const std::vector<MatchedPair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  MatcherKind tag() const noexcept { return tag_; }

  bool contains(std::size_t source, std::size_t target) const {
    auto it = forward_.find(source);
    return it != forward_.end() && it->second == target;
  }

  /// Dense source->target table; throws if some source in [0, n) is unmapped.
  std::vector<std::size_t> as_total(std::size_t n) const {
    std::vector<std::size_t> t(n, n);
    for (const auto& p : pairs_) {
      if (p.source >= n) throw InvalidArgument("mapping: source index out of range");
      t[p.source] = p.target;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (t[i] == n) throw InvalidArgument("mapping is partial: node " + std::to_string(i) + " unmapped");
    return t;
  }

  double total_distance() const {
    double s = 0.0;
    for (const auto& p : pairs_) s += p.distance.value_or(0.0);
    return s;
  }

 private:
  MatcherKind tag_ = MatcherKind::GroundTruth;
  std::vector<MatchedPair> pairs_;
  std::unordered_map<std::size_t, std::size_t> forward_;
  std::unordered_set<std::size_t> targets_;
};

}  // namespace tgae
