#include "facetrank/coverage.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "facetrank/errors.hpp"
#include "facetrank/util.hpp"

namespace facetrank {

Coverage Coverage::exact() { return Coverage{}; }

Coverage Coverage::cosine(EmbeddingTable table) {
  auto state = std::make_shared<CosineState>();
  state->table = std::move(table);
  for (const auto& [facet, vec] : state->table.vectors) {
    double sq = 0.0;
    for (double x : vec) sq += x * x;
    state->norms[facet] = std::sqrt(sq);
  }
  Coverage c;
  c.state_ = std::move(state);
  return c;
}

double Coverage::operator()(const FacetId& fu, const FacetId& fi) const {
  if (!state_) {
    return fu == fi ? 1.0 : 0.0;
  }
  if (fu == fi) {
    if (!state_->table.has(fu)) {
      throw DataError("no embedding for facet '" + fu + "'");
    }
    return 1.0;
  }
  auto u = state_->table.vectors.find(fu);
  if (u == state_->table.vectors.end()) {
    throw DataError("no embedding for facet '" + fu + "'");
  }
  auto v = state_->table.vectors.find(fi);
  if (v == state_->table.vectors.end()) {
    throw DataError("no embedding for facet '" + fi + "'");
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < u->second.size(); ++k) {
    dot += u->second[k] * v->second[k];
  }
  double cosine = dot / (state_->norms.at(fu) * state_->norms.at(fi));
  return std::clamp(cosine, 0.0, 1.0);
}

namespace {

void validate_vector(const FacetId& facet, const std::vector<double>& vec) {
  bool all_zero = true;
  for (double x : vec) {
    if (!std::isfinite(x)) {
      throw DataError("embedding for '" + facet + "' has a non-finite component");
    }
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) {
    throw DataError("embedding for '" + facet + "' is the zero vector");
  }
}

}  // namespace

EmbeddingTable parse_embeddings(const std::string& text) {
  EmbeddingTable table;
  std::size_t lineno = 0;
  for (const std::string& line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("embeddings line " + std::to_string(lineno) +
                      ": expected facet_id<TAB>components");
    }
    FacetId facet = line.substr(0, tab);
    if (facet.empty()) {
      throw DataError("embeddings line " + std::to_string(lineno) +
                      ": empty facet id");
    }
    std::vector<double> vec;
    for (const std::string& tok : split(line.substr(tab + 1), ' ')) {
      std::string t = trim(tok);
      if (t.empty()) continue;
      try {
        std::size_t used = 0;
        vec.push_back(std::stod(t, &used));
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        throw DataError("embeddings line " + std::to_string(lineno) +
                        ": bad component '" + t + "'");
      }
    }
    if (vec.empty()) {
      throw DataError("embeddings line " + std::to_string(lineno) +
                      ": no components");
    }
    if (table.dim == 0) {
      table.dim = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dim) {
      throw DataError("embeddings line " + std::to_string(lineno) +
                      ": dimension mismatch (" + std::to_string(vec.size()) +
                      " vs " + std::to_string(table.dim) + ")");
    }
    validate_vector(facet, vec);
    if (!table.vectors.emplace(std::move(facet), std::move(vec)).second) {
      throw DataError("embeddings line " + std::to_string(lineno) +
                      ": duplicate facet");
    }
  }
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  return parse_embeddings(read_file(path));
}

std::string serialize_embeddings(const EmbeddingTable& table) {
  std::string out;
  for (const auto& [facet, vec] : table.vectors) {
    out += facet;
    out += '\t';
    for (std::size_t i = 0; i < vec.size(); ++i) {
      if (i > 0) out += ' ';
      out += format_score(vec[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> label_tokens(const std::string& label) {
  std::string lower;
  lower.reserve(label.size());
  for (unsigned char c : label) {
    lower.push_back(static_cast<char>(std::tolower(c)));
  }
  std::vector<std::string> words;
  std::string cur;
  for (char c : lower) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);

  std::vector<std::string> tokens;
  for (const std::string& w : words) {
    tokens.push_back(w);
    for (std::size_t i = 0; i + 3 <= w.size(); ++i) {
      tokens.push_back(w.substr(i, 3));
    }
  }
  if (tokens.empty()) {
    // Label with no alphanumeric content; keep the vector non-zero.
    tokens.push_back(lower);
  }
  return tokens;
}

}  // namespace

EmbeddingTable fallback_embeddings(const Taxonomy& taxonomy, int dim) {
  if (dim < 8) {
    throw ConfigError("fallback embeddings need dim >= 8");
  }
  EmbeddingTable table;
  table.dim = dim;
  for (const FacetNode* n : taxonomy.all_nodes()) {
    std::vector<double> vec(dim, 0.0);
    for (const std::string& tok : label_tokens(n->label)) {
      vec[fnv1a64(tok) % static_cast<std::uint64_t>(dim)] += 1.0;
    }
    double sq = 0.0;
    for (double x : vec) sq += x * x;
    double norm = std::sqrt(sq);
    for (double& x : vec) x /= norm;
    table.vectors.emplace(n->id, std::move(vec));
  }
  return table;
}

}  // namespace facetrank
