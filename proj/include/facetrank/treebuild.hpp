#pragma once

#include <string>
#include <vector>

#include "facetrank/scoring.hpp"
#include "facetrank/taxonomy.hpp"

namespace facetrank {

enum class Aggregation { avg, max };

const char* aggregation_name(Aggregation a);
Aggregation aggregation_from_name(const std::string& name);

struct BuildConfig {
  Aggregation aggregation = Aggregation::max;
  int top_k_children = 3;
  int page_size_level1 = 3;
  int page_size_level2 = 3;
};

struct LeafEntry {
  FacetId id;
  double score = 0.0;
};

// A ranked level-1 node with its ranked children, already cut into pages of
// page_size_level2 each.
struct ParentEntry {
  FacetId id;
  double aggregate = 0.0;
  std::vector<std::vector<LeafEntry>> child_pages;
};

// The re-ordered, paginated facet tree. Parents are ranked by aggregate
// score and cut into pages of page_size_level1; pagination markers are
// implied wherever later pages exist.
struct RankedTree {
  std::vector<std::vector<ParentEntry>> pages;
};

// Score of a parent from its children's scores, which must be sorted
// descending: avg takes the mean of the top min(k, n) scores, max the best.
double aggregate_children(const std::vector<double>& child_scores_desc,
                          Aggregation aggregation, int k);

// Bottom-up fixed-level construction: scored leaves are grouped under their
// parents, ranked by score (ties by id), parents ranked by the aggregate of
// their top-k children (ties by id), and both levels are paginated. Parents
// with no scored children are omitted. Requires a two-level taxonomy.
RankedTree build_fixed_level(const Taxonomy& taxonomy,
                             const FacetScoreMap& scores,
                             const BuildConfig& config);

struct DisplayItem {
  enum class Kind { parent, leaf, more_children, more_pages };
  Kind kind = Kind::parent;
  FacetId id;          // facet for parent/leaf; owning parent for more_children
  double score = 0.0;  // aggregate or leaf score; 0 for markers
  int level = 0;       // 1 or 2 for facets; level being extended for markers

  bool is_facet() const { return kind == Kind::parent || kind == Kind::leaf; }
};

// Canonical reading order over the whole tree: within each page, a level-1
// node is followed by its children with a marker between consecutive child
// pages; a page marker separates consecutive level-1 pages.
std::vector<DisplayItem> flatten_display_order(const RankedTree& tree);

// `level<TAB>id<TAB>score` per display item, markers as `MORE`.
std::string render_tree_text(const RankedTree& tree);
std::string render_tree_json(const RankedTree& tree);

}  // namespace facetrank
