#pragma once

#include <cstdint>
#include <vector>

#include "seqlab/matrix.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

struct KMeansResult {
  std::vector<std::int32_t> assignments;  // length T, values in [0, k)
  DenseMatrix centroids;                  // k x d
  std::vector<double> sse_trace;          // within-cluster SSE after each iteration
};

// Lloyd's algorithm with k-means++ seeding. Ties in nearest-centroid go to the
// lowest centroid index. An emptied centroid is reseeded at the point farthest
// from its assigned centroid. Requires T >= k >= 1 and d >= 1.
KMeansResult kmeans(const DenseMatrix& points, std::size_t k, RandomSource& rng,
                    std::size_t max_iters = 100);

}  // namespace seqlab
