#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace facetrank {

using FacetId = std::string;

struct FacetNode {
  FacetId id;
  std::string label;
  std::optional<FacetId> parent;  // empty iff level == 1
  int level = 1;
};

// The multi-level facet hierarchy. Parent links form a forest rooted at the
// level-1 nodes; the leaf facets are exactly the nodes at the deepest level.
// Immutable after construction, safe for concurrent reads.
class Taxonomy {
 public:
  Taxonomy() = default;

  // Validates all structural invariants; throws DataError naming the
  // offending node otherwise.
  static Taxonomy from_nodes(std::vector<FacetNode> nodes);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  // Deepest level present; 0 for an empty taxonomy.
  int depth() const { return depth_; }

  bool contains(const FacetId& id) const;
  const FacetNode& node(const FacetId& id) const;

  // A leaf is a node at the deepest level, not merely a childless node.
  bool is_leaf(const FacetId& id) const;

  // All deepest-level nodes in lexicographic order.
  const std::vector<FacetId>& leaves() const { return leaves_; }

  // Path from the level-1 root down to (excluding) the given node.
  std::vector<FacetId> ancestors(const FacetId& id) const;

  // Children in lexicographic order; empty for childless nodes.
  const std::vector<FacetId>& children(const FacetId& id) const;

  // All leaves of the subtree rooted at the node (the node itself if it is
  // a leaf), lexicographic order.
  std::vector<FacetId> descendant_leaves(const FacetId& id) const;

  const std::vector<FacetId>& level1_nodes() const { return level1_; }

  // All nodes ordered by (level, id); the canonical serialization order.
  std::vector<const FacetNode*> all_nodes() const;

 private:
  std::map<FacetId, FacetNode> nodes_;
  std::map<FacetId, std::vector<FacetId>> children_;
  std::vector<FacetId> leaves_;
  std::vector<FacetId> level1_;
  int depth_ = 0;
};

// Parses the flat JSON form: an array of {"id", "label", "parent", "level"}
// objects, null parent meaning level 1. Node order in the document is
// irrelevant. max_depth == 0 keeps every level; otherwise nodes below
// max_depth are dropped before validation.
Taxonomy parse_taxonomy(const std::string& json_text, int max_depth = 0);

std::string serialize_taxonomy(const Taxonomy& taxonomy);

// Accepts the nested category export shape: an array of
// {"id", "name", "categories": [children...]} objects, and flattens it to
// the canonical form. Nesting depth becomes the level.
Taxonomy flatten_category_export(const std::string& json_text, int max_depth = 0);

// Detects which of the two shapes the document uses and parses accordingly.
Taxonomy parse_taxonomy_any(const std::string& json_text, int max_depth = 0);

}  // namespace facetrank
