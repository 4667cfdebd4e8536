#include "facetrank/treebuild.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

using json = nlohmann::ordered_json;

const char* aggregation_name(Aggregation a) {
  return a == Aggregation::avg ? "avg" : "max";
}

Aggregation aggregation_from_name(const std::string& name) {
  if (name == "avg") return Aggregation::avg;
  if (name == "max") return Aggregation::max;
  throw ConfigError("unknown aggregation '" + name + "' (expected avg or max)");
}

double aggregate_children(const std::vector<double>& child_scores_desc,
                          Aggregation aggregation, int k) {
  if (child_scores_desc.empty()) {
    throw DataError("aggregate_children: empty child list");
  }
  if (aggregation == Aggregation::max) {
    return child_scores_desc.front();
  }
  std::size_t take = std::min<std::size_t>(child_scores_desc.size(),
                                           static_cast<std::size_t>(std::max(1, k)));
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += child_scores_desc[i];
  return sum / static_cast<double>(take);
}

RankedTree build_fixed_level(const Taxonomy& taxonomy,
                             const FacetScoreMap& scores,
                             const BuildConfig& config) {
  if (config.top_k_children < 1 || config.page_size_level1 < 1 ||
      config.page_size_level2 < 1) {
    throw ConfigError("tree build: page sizes and k must be >= 1");
  }
  if (!scores.empty() && taxonomy.depth() != 2) {
    throw DataError("tree build: requires a two-level taxonomy, got depth " +
                    std::to_string(taxonomy.depth()));
  }

  // Group the scored leaves under their parents.
  std::map<FacetId, std::vector<LeafEntry>> by_parent;
  for (const auto& [facet, score] : scores) {
    const FacetNode& node = taxonomy.node(facet);  // throws on unknown id
    if (!taxonomy.is_leaf(facet)) {
      throw DataError("tree build: '" + facet + "' is not a leaf facet");
    }
    by_parent[*node.parent].push_back({facet, score});
  }

  struct RankedParent {
    FacetId id;
    double aggregate;
    std::vector<LeafEntry> children;
  };
  std::vector<RankedParent> parents;
  parents.reserve(by_parent.size());
  for (auto& [parent_id, children] : by_parent) {
    std::sort(children.begin(), children.end(),
              [](const LeafEntry& a, const LeafEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.id < b.id;
              });
    std::vector<double> child_scores;
    child_scores.reserve(children.size());
    for (const LeafEntry& c : children) child_scores.push_back(c.score);
    parents.push_back({parent_id,
                       aggregate_children(child_scores, config.aggregation,
                                          config.top_k_children),
                       std::move(children)});
  }
  std::sort(parents.begin(), parents.end(),
            [](const RankedParent& a, const RankedParent& b) {
              if (a.aggregate != b.aggregate) return a.aggregate > b.aggregate;
              return a.id < b.id;
            });

  RankedTree tree;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (i % static_cast<std::size_t>(config.page_size_level1) == 0) {
      tree.pages.emplace_back();
    }
    ParentEntry entry;
    entry.id = parents[i].id;
    entry.aggregate = parents[i].aggregate;
    const std::vector<LeafEntry>& children = parents[i].children;
    for (std::size_t j = 0; j < children.size(); ++j) {
      if (j % static_cast<std::size_t>(config.page_size_level2) == 0) {
        entry.child_pages.emplace_back();
      }
      entry.child_pages.back().push_back(children[j]);
    }
    tree.pages.back().push_back(std::move(entry));
  }
  return tree;
}

std::vector<DisplayItem> flatten_display_order(const RankedTree& tree) {
  std::vector<DisplayItem> items;
  for (std::size_t p = 0; p < tree.pages.size(); ++p) {
    for (const ParentEntry& parent : tree.pages[p]) {
      items.push_back({DisplayItem::Kind::parent, parent.id, parent.aggregate, 1});
      for (std::size_t cp = 0; cp < parent.child_pages.size(); ++cp) {
        if (cp > 0) {
          items.push_back({DisplayItem::Kind::more_children, parent.id, 0.0, 2});
        }
        for (const LeafEntry& leaf : parent.child_pages[cp]) {
          items.push_back({DisplayItem::Kind::leaf, leaf.id, leaf.score, 2});
        }
      }
    }
    if (p + 1 < tree.pages.size()) {
      items.push_back({DisplayItem::Kind::more_pages, FacetId(), 0.0, 1});
    }
  }
  return items;
}

std::string render_tree_text(const RankedTree& tree) {
  std::string out;
  for (const DisplayItem& item : flatten_display_order(tree)) {
    if (!item.is_facet()) {
      out += "MORE\n";
      continue;
    }
    out += std::to_string(item.level);
    out += '\t';
    out += item.id;
    out += '\t';
    out += format_score(item.score);
    out += '\n';
  }
  return out;
}

std::string render_tree_json(const RankedTree& tree) {
  json display = json::array();
  for (const DisplayItem& item : flatten_display_order(tree)) {
    json e;
    if (item.is_facet()) {
      e["kind"] = item.kind == DisplayItem::Kind::parent ? "parent" : "leaf";
      e["level"] = item.level;
      e["id"] = item.id;
      e["score"] = item.score;
    } else {
      e["kind"] = "more";
      e["level"] = item.level;
      if (item.kind == DisplayItem::Kind::more_children) {
        e["parent"] = item.id;
      }
    }
    display.push_back(std::move(e));
  }

  json pages = json::array();
  for (const auto& page : tree.pages) {
    json page_json = json::array();
    for (const ParentEntry& parent : page) {
      json pj;
      pj["id"] = parent.id;
      pj["score"] = parent.aggregate;
      json child_pages = json::array();
      for (const auto& child_page : parent.child_pages) {
        json cp = json::array();
        for (const LeafEntry& leaf : child_page) {
          json lj;
          lj["id"] = leaf.id;
          lj["score"] = leaf.score;
          cp.push_back(std::move(lj));
        }
        child_pages.push_back(std::move(cp));
      }
      pj["child_pages"] = std::move(child_pages);
      page_json.push_back(std::move(pj));
    }
    pages.push_back(std::move(page_json));
  }

  json root;
  root["pages"] = std::move(pages);
  root["display"] = std::move(display);
  return root.dump(2) + "\n";
}

}  // namespace facetrank
