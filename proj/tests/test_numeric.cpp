#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "seqlab/errors.hpp"
#include "seqlab/kmeans.hpp"
#include "seqlab/linalg.hpp"
#include "seqlab/numeric.hpp"
#include "seqlab/pca.hpp"
#include "seqlab/rng.hpp"

using namespace seqlab;

TEST_CASE("softmax_rows hand values") {
  DenseMatrix m(1, 2);
  m(0, 0) = 0.0;
  m(0, 1) = 0.0;
  auto s = softmax_rows(m);
  CHECK(s(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  m(0, 0) = 1000.0;
  m(0, 1) = 1000.0;
  s = softmax_rows(m);
  CHECK(s(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  DenseMatrix m3(1, 3);
  m3(0, 0) = 0.0;
  m3(0, 1) = std::log(2.0);
  m3(0, 2) = std::log(4.0);
  s = softmax_rows(m3);
  // e^0 = 1, e^ln2 = 2, e^ln4 = 4; total 7
  CHECK(s(0, 0) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  CHECK(s(0, 1) == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(s(0, 2) == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("softmax_rows rejects non-finite input naming the row") {
  DenseMatrix m(3, 2, 0.0);
  m(2, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(softmax_rows(m), doctest::Contains("row 2"), NumericError);
}

TEST_CASE("softmax_rows rows sum to 1 for extreme random matrices") {
  RandomSource rng(11);
  DenseMatrix m(40, 7);
  for (auto& v : m.data) v = rng.uniform(-1000.0, 1000.0);
  auto s = softmax_rows(m);
  for (std::size_t r = 0; r < s.rows; ++r) {
    double total = 0.0;
    double mn = 1.0;
    for (std::size_t c = 0; c < s.cols; ++c) {
      total += s(r, c);
      mn = std::min(mn, s(r, c));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mn >= 0.0);
  }
}

TEST_CASE("logsumexp hand values and stability") {
  std::vector<double> single{0.0};
  CHECK(logsumexp(single) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> deep{-700.0, -700.0};
  CHECK(logsumexp(deep) == doctest::Approx(-700.0 + std::log(2.0)).epsilon(1e-12));

  std::vector<double> v{std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(logsumexp(v) == doctest::Approx(std::log(6.0)).epsilon(1e-12));

  std::vector<double> empty;
  CHECK_THROWS_AS(logsumexp(empty), NumericError);
}

TEST_CASE("logsumexp bounded by max and max + ln n") {
  RandomSource rng(5);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng.uniform_index(6);
    std::vector<double> v(n);
    double mx = -1e300;
    for (auto& x : v) {
      x = rng.uniform(-50.0, 50.0);
      mx = std::max(mx, x);
    }
    const double l = logsumexp(v);
    CHECK(l >= mx - 1e-12);
    CHECK(l <= mx + std::log(static_cast<double>(n)) + 1e-12);
  }
}

TEST_CASE("kmeans separates well-separated blobs") {
  DenseMatrix pts(20, 2);
  for (int i = 0; i < 10; ++i) {
    pts(i, 0) = 0.0;
    pts(i, 1) = 0.0;
    pts(10 + i, 0) = 100.0;
    pts(10 + i, 1) = 100.0;
  }
  RandomSource rng(3);
  auto res = kmeans(pts, 2, rng);
  // one centroid at each blob, in some order
  const bool a0 =
      std::fabs(res.centroids(0, 0)) < 1e-9 && std::fabs(res.centroids(0, 1)) < 1e-9;
  const std::size_t zero_c = a0 ? 0 : 1;
  const std::size_t far_c = 1 - zero_c;
  CHECK(std::fabs(res.centroids(zero_c, 0) - 0.0) < 1e-9);
  CHECK(std::fabs(res.centroids(far_c, 0) - 100.0) < 1e-9);
  CHECK(std::fabs(res.centroids(far_c, 1) - 100.0) < 1e-9);
  for (int i = 0; i < 10; ++i) CHECK(res.assignments[i] == res.assignments[0]);
  for (int i = 10; i < 20; ++i) CHECK(res.assignments[i] == res.assignments[10]);
  CHECK(res.assignments[0] != res.assignments[10]);
}

TEST_CASE("kmeans k=1 returns the coordinate-wise mean") {
  RandomSource rng(7);
  DenseMatrix pts(17, 3);
  for (auto& v : pts.data) v = rng.uniform(-5.0, 5.0);
  auto res = kmeans(pts, 1, rng);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < 17; ++t) mean += pts(t, c);
    mean /= 17.0;
    CHECK(res.centroids(0, c) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("kmeans k=T gives zero SSE") {
  RandomSource rng(9);
  DenseMatrix pts(8, 2);
  for (auto& v : pts.data) v = rng.uniform(0.0, 1.0);
  auto res = kmeans(pts, 8, rng);
  CHECK(res.sse_trace.back() == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("kmeans SSE trace is non-increasing") {
  RandomSource rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    DenseMatrix pts(60, 4);
    for (auto& v : pts.data) v = rng.uniform(-1.0, 1.0);
    auto res = kmeans(pts, 5, rng);
    for (std::size_t i = 1; i < res.sse_trace.size(); ++i)
      CHECK(res.sse_trace[i] <= res.sse_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("kmeans input validation") {
  RandomSource rng(1);
  DenseMatrix pts(3, 2, 0.0);
  CHECK_THROWS_AS(kmeans(pts, 4, rng), NumericError);
  DenseMatrix empty_dim(3, 0);
  CHECK_THROWS_AS(kmeans(empty_dim, 1, rng), NumericError);
}

TEST_CASE("kmeans survives heavy duplicates (empty-cluster reseeding)") {
  // 3 distinct locations, many exact duplicates, k close to T: seeding can
  // duplicate centroids, which the reseed rule must repair
  DenseMatrix pts(12, 2, 0.0);
  for (int i = 0; i < 6; ++i) pts(i, 0) = 0.0;
  for (int i = 6; i < 11; ++i) {
    pts(i, 0) = 5.0;
    pts(i, 1) = 5.0;
  }
  pts(11, 0) = 20.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomSource rng(seed);
    auto res = kmeans(pts, 5, rng);
    CHECK(res.assignments.size() == 12);
    for (auto a : res.assignments) {
      CHECK(a >= 0);
      CHECK(a < 5);
    }
    for (std::size_t i = 1; i < res.sse_trace.size(); ++i)
      CHECK(res.sse_trace[i] <= res.sse_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("kmeans deterministic under a fixed seed") {
  DenseMatrix pts(30, 2);
  RandomSource fill(21);
  for (auto& v : pts.data) v = fill.uniform(0.0, 10.0);
  RandomSource r1(77), r2(77);
  auto a = kmeans(pts, 3, r1);
  auto b = kmeans(pts, 3, r2);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centroids.data == b.centroids.data);
}

TEST_CASE("pca collinear data is rank one") {
  DenseMatrix pts(50, 2);
  for (int i = 0; i < 50; ++i) {
    pts(i, 0) = static_cast<double>(i);
    pts(i, 1) = 2.0 * static_cast<double>(i);
  }
  auto ratios = pca_explained_variance(pts);
  CHECK(ratios[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::fabs(ratios[1]) < 1e-10);
}

TEST_CASE("pca isotropic data splits variance evenly") {
  RandomSource rng(123);
  DenseMatrix pts(10000, 3);
  for (auto& v : pts.data) v = rng.gaussian();
  auto ratios = pca_explained_variance(pts);
  for (double r : ratios) CHECK(r == doctest::Approx(1.0 / 3.0).epsilon(0.06));
  double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::is_sorted(ratios.begin(), ratios.end(), std::greater<double>()));
}

TEST_CASE("pca degenerate inputs") {
  DenseMatrix constant(5, 2, 3.0);
  CHECK_THROWS_AS(pca_explained_variance(constant), NumericError);
  DenseMatrix one_row(1, 2, 0.0);
  CHECK_THROWS_AS(pca_explained_variance(one_row), NumericError);
}

TEST_CASE("finite differences match analytic derivatives") {
  auto square = [](const std::vector<double>& x) { return x[0] * x[0]; };
  auto g = finite_diff_grad(square, {3.0}, 1e-5);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-8));

  auto constant = [](const std::vector<double>&) { return 42.0; };
  g = finite_diff_grad(constant, {1.0, -2.0, 0.5}, 1e-5);
  for (double v : g) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));

  auto cubes = [](const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v * v;
    return acc;
  };
  g = finite_diff_grad(cubes, {1.0, 2.0}, 1e-5);
  CHECK(g[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(12.0).epsilon(1e-6));

  auto bad = [](const std::vector<double>& x) {
    return x[0] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_WITH_AS(finite_diff_grad(bad, {1.0}, 1e-3),
                       doctest::Contains("coordinate 0"), NumericError);
}

TEST_CASE("RandomSource replay and substream isolation") {
  RandomSource a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  for (int i = 0; i < 100; ++i) CHECK(a.gaussian() == b.gaussian());
  for (int i = 0; i < 100; ++i) CHECK(a.gamma(0.7) == b.gamma(0.7));

  // substreams depend on (seed, name) only, not on parent draw position
  RandomSource p1(9), p2(9);
  (void)p1.next_u64();
  (void)p1.next_u64();
  auto s1 = p1.substream("ffbs");
  auto s2 = p2.substream("ffbs");
  for (int i = 0; i < 50; ++i) CHECK(s1.next_u64() == s2.next_u64());
  auto other = p1.substream("kmeans");
  CHECK(other.next_u64() != p1.substream("ffbs").next_u64());
}

TEST_CASE("RandomSource distribution sanity") {
  RandomSource rng(4242);
  // uniform_index stays in range and covers values
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) ++hits[rng.uniform_index(5)];
  for (int h : hits) CHECK(h > 800);

  // dirichlet mean approximately alpha / sum(alpha)
  std::vector<double> alpha{2.0, 1.0, 1.0};
  std::vector<double> mean(3, 0.0);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto d = rng.dirichlet(alpha);
    for (int j = 0; j < 3; ++j) mean[j] += d[j];
  }
  for (auto& m : mean) m /= n;
  CHECK(mean[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(mean[1] == doctest::Approx(0.25).epsilon(0.04));

  // gamma(3) has mean 3, variance 3
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double g = rng.gamma(3.0);
    s += g;
    s2 += g * g;
  }
  s /= 20000.0;
  s2 = s2 / 20000.0 - s * s;
  CHECK(s == doctest::Approx(3.0).epsilon(0.05));
  CHECK(s2 == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("chi-square survival matches closed forms") {
  // df=2: sf(x) = exp(-x/2)
  for (double x : {0.5, 1.0, 3.0, 10.0})
    CHECK(chi_square_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-10));
  // df=1: sf(x) = erfc(sqrt(x/2))
  for (double x : {0.25, 1.0, 4.0})
    CHECK(chi_square_sf(x, 1.0) ==
          doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));
}

TEST_CASE("cholesky round trip and SPD inverse") {
  RandomSource rng(99);
  const std::size_t d = 4;
  // A = B B^T + I is SPD
  DenseMatrix b(d, d);
  for (auto& v : b.data) v = rng.uniform(-1.0, 1.0);
  DenseMatrix a(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += b(i, k) * b(j, k);
      a(i, j) = acc;
    }
  auto l = cholesky(a);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += l(i, k) * l(j, k);
      CHECK(acc == doctest::Approx(a(i, j)).epsilon(1e-10));
    }
  auto inv = spd_inverse(a);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += a(i, k) * inv(k, j);
      CHECK(acc == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }
  DenseMatrix not_pd(2, 2, 0.0);
  not_pd(0, 0) = 1.0;
  not_pd(1, 1) = -1.0;
  CHECK_THROWS_AS(cholesky(not_pd), NumericError);
}
