#include "facetrank/taxonomy.hpp"

#include <algorithm>

#include <json.hpp>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

using json = nlohmann::ordered_json;

Taxonomy Taxonomy::from_nodes(std::vector<FacetNode> nodes) {
  Taxonomy t;
  for (FacetNode& n : nodes) {
    if (n.id.empty()) {
      throw DataError("taxonomy: node with empty id");
    }
    if (has_whitespace(n.id)) {
      throw DataError("taxonomy node '" + n.id + "': id contains whitespace");
    }
    if (n.label.empty()) {
      throw DataError("taxonomy node '" + n.id + "': empty label");
    }
    if (n.level < 1) {
      throw DataError("taxonomy node '" + n.id + "': level must be >= 1");
    }
    if ((n.level == 1) != !n.parent.has_value()) {
      throw DataError("taxonomy node '" + n.id +
                      "': null parent is required exactly for level-1 nodes");
    }
    auto [it, inserted] = t.nodes_.emplace(n.id, std::move(n));
    if (!inserted) {
      throw DataError("taxonomy node '" + it->first + "': duplicate id");
    }
  }
  for (const auto& [id, n] : t.nodes_) {
    t.depth_ = std::max(t.depth_, n.level);
    if (!n.parent) continue;
    auto pit = t.nodes_.find(*n.parent);
    if (pit == t.nodes_.end()) {
      throw DataError("taxonomy node '" + id + "': unknown parent '" +
                      *n.parent + "'");
    }
    if (n.level != pit->second.level + 1) {
      throw DataError("taxonomy node '" + id + "': level " +
                      std::to_string(n.level) + " inconsistent with parent '" +
                      *n.parent + "' at level " +
                      std::to_string(pit->second.level));
    }
    t.children_[*n.parent].push_back(id);
  }
  for (auto& [id, kids] : t.children_) {
    std::sort(kids.begin(), kids.end());
  }
  for (const auto& [id, n] : t.nodes_) {
    if (n.level == t.depth_) t.leaves_.push_back(id);
    if (n.level == 1) t.level1_.push_back(id);
  }
  // std::map iteration already yields lexicographic order.
  return t;
}

bool Taxonomy::contains(const FacetId& id) const {
  return nodes_.find(id) != nodes_.end();
}

const FacetNode& Taxonomy::node(const FacetId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw DataError("unknown facet id '" + id + "'");
  }
  return it->second;
}

bool Taxonomy::is_leaf(const FacetId& id) const {
  return node(id).level == depth_;
}

std::vector<FacetId> Taxonomy::ancestors(const FacetId& id) const {
  std::vector<FacetId> path;
  const FacetNode* cur = &node(id);
  while (cur->parent) {
    path.push_back(*cur->parent);
    cur = &node(*cur->parent);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

const std::vector<FacetId>& Taxonomy::children(const FacetId& id) const {
  node(id);  // existence check
  static const std::vector<FacetId> kNone;
  auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

std::vector<FacetId> Taxonomy::descendant_leaves(const FacetId& id) const {
  std::vector<FacetId> out;
  std::vector<const FacetId*> stack{&id};
  while (!stack.empty()) {
    const FacetId* cur = stack.back();
    stack.pop_back();
    if (node(*cur).level == depth_) {
      out.push_back(*cur);
      continue;
    }
    for (const FacetId& child : children(*cur)) {
      stack.push_back(&child);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<const FacetNode*> Taxonomy::all_nodes() const {
  std::vector<const FacetNode*> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(&n);
  std::stable_sort(out.begin(), out.end(),
                   [](const FacetNode* a, const FacetNode* b) {
                     if (a->level != b->level) return a->level < b->level;
                     return a->id < b->id;
                   });
  return out;
}

namespace {

json parse_json_or_throw(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw DataError(std::string(what) + ": malformed JSON");
  }
  return doc;
}

}  // namespace

Taxonomy parse_taxonomy(const std::string& json_text, int max_depth) {
  json doc = parse_json_or_throw(json_text, "taxonomy");
  if (!doc.is_array()) {
    throw DataError("taxonomy: expected a JSON array of node objects");
  }
  std::vector<FacetNode> nodes;
  nodes.reserve(doc.size());
  for (const json& obj : doc) {
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("label") || !obj["label"].is_string() ||
        !obj.contains("parent") || !obj.contains("level") ||
        !obj["level"].is_number_integer()) {
      throw DataError("taxonomy: node object must have string id, string "
                      "label, parent, integer level");
    }
    FacetNode n;
    n.id = obj["id"].get<std::string>();
    n.label = obj["label"].get<std::string>();
    n.level = obj["level"].get<int>();
    if (obj["parent"].is_string()) {
      n.parent = obj["parent"].get<std::string>();
    } else if (!obj["parent"].is_null()) {
      throw DataError("taxonomy node '" + n.id + "': parent must be string or null");
    }
    if (max_depth > 0 && n.level > max_depth) continue;
    nodes.push_back(std::move(n));
  }
  return Taxonomy::from_nodes(std::move(nodes));
}

std::string serialize_taxonomy(const Taxonomy& taxonomy) {
  json arr = json::array();
  for (const FacetNode* n : taxonomy.all_nodes()) {
    json obj;
    obj["id"] = n->id;
    obj["label"] = n->label;
    obj["parent"] = n->parent ? json(*n->parent) : json(nullptr);
    obj["level"] = n->level;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

namespace {

void flatten_category(const json& obj, const std::optional<FacetId>& parent,
                      int level, std::vector<FacetNode>& out) {
  if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
      !obj.contains("name") || !obj["name"].is_string()) {
    throw DataError("category export: entries need string id and name");
  }
  FacetNode n;
  n.id = obj["id"].get<std::string>();
  n.label = obj["name"].get<std::string>();
  n.parent = parent;
  n.level = level;
  FacetId id = n.id;
  out.push_back(std::move(n));
  if (obj.contains("categories")) {
    if (!obj["categories"].is_array()) {
      throw DataError("category export: node '" + id +
                      "': categories must be an array");
    }
    for (const json& child : obj["categories"]) {
      flatten_category(child, id, level + 1, out);
    }
  }
}

}  // namespace

Taxonomy flatten_category_export(const std::string& json_text, int max_depth) {
  json doc = parse_json_or_throw(json_text, "category export");
  if (!doc.is_array()) {
    throw DataError("category export: expected a JSON array");
  }
  std::vector<FacetNode> nodes;
  for (const json& obj : doc) {
    flatten_category(obj, std::nullopt, 1, nodes);
  }
  if (max_depth > 0) {
    std::erase_if(nodes, [&](const FacetNode& n) { return n.level > max_depth; });
  }
  return Taxonomy::from_nodes(std::move(nodes));
}

Taxonomy parse_taxonomy_any(const std::string& json_text, int max_depth) {
  json doc = parse_json_or_throw(json_text, "taxonomy");
  if (doc.is_array() && !doc.empty() && doc.front().is_object() &&
      doc.front().contains("name") && !doc.front().contains("level")) {
    return flatten_category_export(json_text, max_depth);
  }
  return parse_taxonomy(json_text, max_depth);
}

}  // namespace facetrank
