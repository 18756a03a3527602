#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "treebandit/rng.hpp"

using namespace treebandit;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive_seed separates streams and is order-sensitive") {
  CHECK(derive_seed(1, {kUserStream, 5, 7}) == derive_seed(1, {kUserStream, 5, 7}));
  CHECK(derive_seed(1, {kUserStream, 5, 7}) != derive_seed(1, {kUserStream, 7, 5}));
  CHECK(derive_seed(1, {kUserStream, 5, 7}) != derive_seed(2, {kUserStream, 5, 7}));
  CHECK(derive_seed(1, {kOrderStream, 5}) != derive_seed(1, {kUserStream, 5}));
}

TEST_CASE("uniform stays in [0,1) and covers the range") {
  Rng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 20000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform_int covers all residues roughly evenly") {
  Rng rng(3);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i) ++counts[rng.uniform_int(10)];
  for (int c : counts) {
    CHECK(c > 9000);
    CHECK(c < 11000);
  }
}

TEST_CASE("normal has near-zero mean and unit variance") {
  Rng rng(11);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("sample_indices returns distinct sorted indices, full range when k >= n") {
  Rng rng(5);
  auto idx = rng.sample_indices(1000, 50);
  CHECK(idx.size() == 50);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(std::set<std::size_t>(idx.begin(), idx.end()).size() == 50);
  for (auto i : idx) CHECK(i < 1000);

  auto all = rng.sample_indices(30, 50);
  CHECK(all.size() == 30);
  for (std::size_t i = 0; i < 30; ++i) CHECK(all[i] == i);
}

TEST_CASE("sample_indices is uniform over subsets (element inclusion rate)") {
  Rng rng(9);
  std::vector<int> hits(20, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    for (auto i : rng.sample_indices(20, 5)) ++hits[i];
  }
  // Each element should appear with probability 1/4.
  for (int h : hits) {
    CHECK(h > trials * 0.25 * 0.9);
    CHECK(h < trials * 0.25 * 1.1);
  }
}
