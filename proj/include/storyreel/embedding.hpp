#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace storyreel {

inline constexpr std::size_t kDefaultEmbeddingDim = 64;

/// Fixed-length text embedding. Feature hashed, L2-normalised; all zeros for empty text.
struct EmbeddingVector {
    std::vector<double> dims;
    bool operator==(const EmbeddingVector&) const = default;
};

/// Tokens (lowercase, split on non-word bytes) are hashed with FNV-1a into `dim` buckets.
EmbeddingVector embed(std::string_view text, std::size_t dim = kDefaultEmbeddingDim);

/// Cosine similarity; defined as 0 when either side is the zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

} // namespace storyreel
