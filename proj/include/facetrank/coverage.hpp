#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "facetrank/taxonomy.hpp"

namespace facetrank {

struct EmbeddingTable {
  int dim = 0;
  std::map<FacetId, std::vector<double>> vectors;

  bool has(const FacetId& f) const { return vectors.find(f) != vectors.end(); }
};

// The probability that one facet is covered by another. Exact match is the
// indicator; the cosine variant clamps negative label-vector similarities to
// zero so the value stays a probability. Pure and thread-safe.
class Coverage {
 public:
  static Coverage exact();
  static Coverage cosine(EmbeddingTable table);

  // Symmetric, in [0,1], 1 on identical facets. Throws DataError for a
  // facet without a vector (cosine only).
  double operator()(const FacetId& fu, const FacetId& fi) const;

  bool is_cosine() const { return state_ != nullptr; }
  const char* kind_name() const { return is_cosine() ? "cosine" : "exact"; }

 private:
  struct CosineState {
    EmbeddingTable table;
    std::map<FacetId, double> norms;
  };
  std::shared_ptr<const CosineState> state_;  // null means exact match
};

// One row per facet: `facet_id<TAB>v1 v2 ... vd`. Unknown facets are allowed
// in the file; missing ones only fail when queried.
EmbeddingTable parse_embeddings(const std::string& text);
EmbeddingTable load_embeddings(const std::string& path);
std::string serialize_embeddings(const EmbeddingTable& table);

// Deterministic substitute for pretrained label vectors: hashed bag of word
// tokens and character trigrams of each node label, L2-normalized. Labels
// sharing tokens get positive cosine. Requires dim >= 8.
EmbeddingTable fallback_embeddings(const Taxonomy& taxonomy, int dim);

}  // namespace facetrank
