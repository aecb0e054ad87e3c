#include "seqlab/kmeans.hpp"

#include <cmath>
#include <limits>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

KMeansResult kmeans(const DenseMatrix& points, std::size_t k, RandomSource& rng,
                    std::size_t max_iters) {
  const std::size_t t_len = points.rows;
  const std::size_t d = points.cols;
  if (k < 1) throw NumericError("kmeans: k must be >= 1");
  if (k > t_len) throw NumericError("kmeans: k exceeds number of points");
  if (d == 0) throw NumericError("kmeans: zero-dimensional points");

  KMeansResult res;
  res.centroids = DenseMatrix(k, d);
  res.assignments.assign(t_len, 0);

  // k-means++ seeding
  std::vector<double> min_d2(t_len, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng.uniform_index(t_len);
    for (std::size_t c = 0; c < d; ++c) res.centroids(0, c) = points(first, c);
    for (std::size_t j = 1; j < k; ++j) {
      for (std::size_t t = 0; t < t_len; ++t) {
        const double d2 = sq_dist(points.row(t), res.centroids.row(j - 1), d);
        if (d2 < min_d2[t]) min_d2[t] = d2;
      }
      double total = 0.0;
      for (double v : min_d2) total += v;
      std::size_t pick;
      if (total > 0.0) {
        pick = rng.categorical(min_d2.data(), t_len);
      } else {
        pick = rng.uniform_index(t_len);  // all points coincide with centroids
      }
      for (std::size_t c = 0; c < d; ++c) res.centroids(j, c) = points(pick, c);
    }
  }

  std::vector<std::size_t> counts(k, 0);
  std::vector<double> dist_to_own(t_len, 0.0);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // assignment step
    bool changed = false;
    for (std::size_t t = 0; t < t_len; ++t) {
      double best = std::numeric_limits<double>::infinity();
      std::int32_t best_j = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d2 = sq_dist(points.row(t), res.centroids.row(j), d);
        if (d2 < best) {
          best = d2;
          best_j = static_cast<std::int32_t>(j);
        }
      }
      dist_to_own[t] = best;
      if (res.assignments[t] != best_j) {
        res.assignments[t] = best_j;
        changed = true;
      }
    }

    // reseed empty clusters at the point farthest from its assigned centroid
    counts.assign(k, 0);
    for (std::size_t t = 0; t < t_len; ++t)
      ++counts[static_cast<std::size_t>(res.assignments[t])];
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      std::size_t far_t = 0;
      double far_d = -1.0;
      for (std::size_t t = 0; t < t_len; ++t) {
        const std::size_t owner = static_cast<std::size_t>(res.assignments[t]);
        if (counts[owner] <= 1) continue;  // do not strand another cluster
        if (dist_to_own[t] > far_d) {
          far_d = dist_to_own[t];
          far_t = t;
        }
      }
      if (far_d < 0.0) continue;  // nothing movable
      --counts[static_cast<std::size_t>(res.assignments[far_t])];
      res.assignments[far_t] = static_cast<std::int32_t>(j);
      ++counts[j];
      for (std::size_t c = 0; c < d; ++c) res.centroids(j, c) = points(far_t, c);
      dist_to_own[far_t] = 0.0;
      changed = true;
    }

    // update step: centroids = cluster means
    DenseMatrix sums(k, d, 0.0);
    for (std::size_t t = 0; t < t_len; ++t) {
      const std::size_t j = static_cast<std::size_t>(res.assignments[t]);
      const double* p = points.row(t);
      double* s = sums.row(j);
      for (std::size_t c = 0; c < d; ++c) s[c] += p[c];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      for (std::size_t c = 0; c < d; ++c)
        res.centroids(j, c) = sums(j, c) / static_cast<double>(counts[j]);
    }

    double sse = 0.0;
    for (std::size_t t = 0; t < t_len; ++t)
      sse += sq_dist(points.row(t),
                     res.centroids.row(static_cast<std::size_t>(res.assignments[t])), d);
    res.sse_trace.push_back(sse);

    if (!changed) break;
  }
  return res;
}

}  // namespace seqlab
