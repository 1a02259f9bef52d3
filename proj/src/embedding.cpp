#include "storyreel/embedding.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <cmath>

namespace storyreel {

EmbeddingVector embed(std::string_view s, std::size_t dim) {
    if (dim == 0) throw ContractViolation("embedding dimension must be positive");
    EmbeddingVector v{std::vector<double>(dim, 0.0)};
    for (const auto& token : text::tokenize(s)) v.dims[fnv1a64(token) % dim] += 1.0;
    double norm = 0.0;
    for (double x : v.dims) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v.dims) x /= norm;
    }
    return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dims.size() != b.dims.size()) throw ContractViolation("embedding dimensions differ");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dims.size(); ++i) {
        dot += a.dims[i] * b.dims[i];
        na += a.dims[i] * a.dims[i];
        nb += b.dims[i] * b.dims[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace storyreel
