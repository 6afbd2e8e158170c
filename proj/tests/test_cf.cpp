#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "socrec/cf.hpp"

using namespace socrec;

namespace {

RatingMatrix pair_matrix(const std::vector<int>& a, const std::vector<int>& b) {
  RatingMatrix m(2, a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.set(UserId(0), ItemId(i), a[i]);
    m.set(UserId(1), ItemId(i), b[i]);
  }
  return m;
}

RatingMatrix random_matrix(std::mt19937_64& rng, std::size_t users, std::size_t items, double density) {
  RatingMatrix m(users, items);
  std::bernoulli_distribution keep(density);
  std::uniform_int_distribution<int> level(0, 5);
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t i = 0; i < items; ++i)
      if (keep(rng)) m.set(UserId(u), ItemId(i), level(rng));
  return m;
}

}  // namespace

TEST(Pearson, PerfectCorrelation) {
  EXPECT_NEAR(*pearson_similarity(UserId(0), UserId(1), pair_matrix({1, 3, 5}, {1, 3, 5})), 1.0, 1e-12);
  EXPECT_NEAR(*pearson_similarity(UserId(0), UserId(1), pair_matrix({1, 3, 5}, {5, 3, 1})), -1.0, 1e-12);
}

TEST(Pearson, HandEvaluatedValue) {
  // centred dot 2, norms sqrt(2) and 2*sqrt(6)/3
  const double expected = 2.0 / (std::sqrt(2.0) * (2.0 * std::sqrt(6.0) / 3.0));
  EXPECT_NEAR(*pearson_similarity(UserId(0), UserId(1), pair_matrix({1, 2, 3}, {2, 2, 4})), expected, 1e-12);
  EXPECT_NEAR(expected, 0.8660254037844386, 1e-12);
}

TEST(Pearson, ZeroVarianceIsUndefined) {
  EXPECT_FALSE(pearson_similarity(UserId(0), UserId(1), pair_matrix({2, 2, 2}, {1, 3, 5})));
  EXPECT_FALSE(pearson_similarity(UserId(1), UserId(0), pair_matrix({2, 2, 2}, {1, 3, 5})));
}

TEST(Pearson, TooFewCoRatedItemsIsUndefined) {
  RatingMatrix m(2, 3);
  m.set(UserId(0), ItemId(0), 1);
  m.set(UserId(0), ItemId(1), 4);
  m.set(UserId(1), ItemId(1), 2);
  m.set(UserId(1), ItemId(2), 5);
  EXPECT_FALSE(pearson_similarity(UserId(0), UserId(1), m));
  EXPECT_THROW(pearson_similarity(UserId(0), UserId(0), m), std::invalid_argument);
  // co_rate_min above the co-rated count
  EXPECT_FALSE(pearson_similarity(UserId(0), UserId(1), pair_matrix({1, 2, 3}, {1, 2, 4}), 4));
}

TEST(Pearson, MeansUseCoRatedItemsOnly) {
  // User 0 also rated item 3 (a 5) which must not shift its centre.
  RatingMatrix m(2, 4);
  for (int i = 0; i < 3; ++i) {
    m.set(UserId(0), ItemId(i), i + 1);
    m.set(UserId(1), ItemId(i), i + 1);
  }
  m.set(UserId(0), ItemId(3), 5);
  EXPECT_NEAR(*pearson_similarity(UserId(0), UserId(1), m), 1.0, 1e-12);
}

TEST(Pearson, SymmetricAndBoundedOnRandomVectors) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(2, 10), level(0, 5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(len(rng)), b;
    for (auto& x : a) x = level(rng);
    for (std::size_t k = 0; k < a.size(); ++k) b.push_back(level(rng));
    auto ab = pearson(a, b), ba = pearson(b, a);
    ASSERT_EQ(ab.has_value(), ba.has_value());
    if (!ab) continue;
    EXPECT_EQ(*ab, *ba);
    EXPECT_GE(*ab, -1.0 - 1e-12);
    EXPECT_LE(*ab, 1.0 + 1e-12);
    auto ref = oracle::pearson_moments(a, b);
    ASSERT_TRUE(ref);
    EXPECT_NEAR(*ab, *ref, 1e-9);
  }
}

TEST(Pearson, ShiftAndScaleInvariance) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> val(-10, 10), shift(-100, 100), scale(0.1, 50);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> a(6), b(6);
    for (auto& x : a) x = val(rng);
    for (auto& x : b) x = val(rng);
    auto base = pearson(a, b);
    ASSERT_TRUE(base);
    const double s = shift(rng), k = scale(rng);
    std::vector<double> shifted = a, scaled = a;
    for (auto& x : shifted) x += s;
    for (auto& x : scaled) x *= k;
    EXPECT_NEAR(*pearson(shifted, b), *base, 1e-9);
    EXPECT_NEAR(*pearson(scaled, b), *base, 1e-9);
  }
}

TEST(SimilarityCache, SymmetricAndMatchesDirectComputation) {
  std::mt19937_64 rng(3);
  auto m = random_matrix(rng, 12, 8, 0.7);
  SimilarityCache cache(m, CfConfig{});
  for (std::size_t a = 0; a < 12; ++a)
    for (std::size_t b = 0; b < 12; ++b) {
      EXPECT_EQ(cache.get(UserId(a), UserId(b)), cache.get(UserId(b), UserId(a)));
      if (a != b) EXPECT_EQ(cache.get(UserId(a), UserId(b)), pearson_similarity(UserId(a), UserId(b), m));
    }
}

TEST(SelectNeighbors, EmptyWhenNobodyElseRatedTheItem) {
  RatingMatrix m(3, 2);
  m.set(UserId(0), ItemId(0), 3);
  auto cache = SimilarityCache::empty(3);
  EXPECT_TRUE(select_neighbors(UserId(0), ItemId(1), m, cache, CfConfig{}).empty());
}

TEST(SelectNeighbors, KeepsPositiveSimilaritiesInOrder) {
  RatingMatrix m(4, 1);
  for (std::size_t u = 1; u < 4; ++u) m.set(UserId(u), ItemId(0), 3);
  auto cache = SimilarityCache::empty(4);
  cache.set(UserId(0), UserId(1), 0.5);
  cache.set(UserId(0), UserId(2), -0.2);
  cache.set(UserId(0), UserId(3), 0.9);
  auto n = select_neighbors(UserId(0), ItemId(0), m, cache, CfConfig{});
  ASSERT_EQ(n.size(), 2u);
  EXPECT_EQ(n[0], (Neighbor{UserId(3), 0.9}));
  EXPECT_EQ(n[1], (Neighbor{UserId(1), 0.5}));
}

TEST(SelectNeighbors, TiesBreakByIndexAndCapApplies) {
  RatingMatrix m(10, 1);
  auto cache = SimilarityCache::empty(10);
  for (std::size_t u : {9, 4, 6}) {
    m.set(UserId(u), ItemId(0), 2);
    cache.set(UserId(0), UserId(u), 0.7);
  }
  auto n = select_neighbors(UserId(0), ItemId(0), m, cache, CfConfig{});
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].user, UserId(4));
  EXPECT_EQ(n[1].user, UserId(6));
  EXPECT_EQ(n[2].user, UserId(9));
  CfConfig two;
  two.neighbor_k = 2;
  EXPECT_EQ(select_neighbors(UserId(0), ItemId(0), m, cache, two).size(), 2u);
}

TEST(SelectNeighbors, FriendsOnlyScope) {
  RatingMatrix m(4, 1);
  auto cache = SimilarityCache::empty(4);
  for (std::size_t u = 1; u < 4; ++u) {
    m.set(UserId(u), ItemId(0), 2);
    cache.set(UserId(0), UserId(u), 0.5);
  }
  RelationshipGraph g(4);
  g.set_edge(UserId(0), UserId(1), 2);
  g.set_edge(UserId(0), UserId(2), 0);  // dislike does not make a friend
  CfConfig cfg;
  cfg.neighbor_scope = NeighborScope::FriendsOnly;
  auto n = select_neighbors(UserId(0), ItemId(0), m, cache, cfg, &g);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].user, UserId(1));
  EXPECT_THROW(select_neighbors(UserId(0), ItemId(0), m, cache, cfg), std::invalid_argument);
}

TEST(PredictCf, HandEvaluatedTwoNeighbours) {
  // u mean 2; n1 rates 4 with mean 3; n2 rates 2 with mean 2; both sims 0.5.
  RatingMatrix m(3, 2);
  m.set(UserId(0), ItemId(1), 2);
  m.set(UserId(1), ItemId(0), 4);
  m.set(UserId(1), ItemId(1), 2);
  m.set(UserId(2), ItemId(0), 2);
  m.set(UserId(2), ItemId(1), 2);
  auto cache = SimilarityCache::empty(3);
  cache.set(UserId(0), UserId(1), 0.5);
  cache.set(UserId(0), UserId(2), 0.5);
  auto p = predict_cf(UserId(0), ItemId(0), m, cache, CfConfig{});
  EXPECT_DOUBLE_EQ(p.value, 2.5);
  EXPECT_FALSE(p.fallback);
  EXPECT_EQ(p.neighbors, 2u);
}

TEST(PredictCf, NeighbourAtItsOwnMeanLeavesUserMean) {
  RatingMatrix m(2, 2);
  m.set(UserId(0), ItemId(1), 4);
  m.set(UserId(1), ItemId(0), 3);
  m.set(UserId(1), ItemId(1), 3);
  auto cache = SimilarityCache::empty(2);
  cache.set(UserId(0), UserId(1), 1.0);
  EXPECT_DOUBLE_EQ(predict_cf(UserId(0), ItemId(0), m, cache, CfConfig{}).value, 4.0);
}

TEST(PredictCf, NoNeighboursFallsBackToUserMean) {
  RatingMatrix m(2, 3);
  m.set(UserId(0), ItemId(1), 1);
  m.set(UserId(0), ItemId(2), 4);
  auto p = predict_cf(UserId(0), ItemId(0), m, SimilarityCache(m, CfConfig{}), CfConfig{});
  EXPECT_DOUBLE_EQ(p.value, 2.5);
  EXPECT_TRUE(p.fallback);
}

TEST(PredictCf, ColdStartThrows) {
  RatingMatrix m(2, 2);
  m.set(UserId(1), ItemId(0), 3);
  try {
    predict_cf(UserId(0), ItemId(0), m, SimilarityCache(m, CfConfig{}), CfConfig{});
    FAIL();
  } catch (const ColdStartError& e) {
    EXPECT_EQ(e.user(), UserId(0));
  }
}

TEST(PredictCf, UniformCentredNeighboursGiveMeanPlusOffset) {
  // Whatever the similarity magnitudes, equal centred ratings c yield mean(u) + c.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> sim(0.01, 1.0);
  for (int t = 0; t < 50; ++t) {
    RatingMatrix m(5, 3);
    m.set(UserId(0), ItemId(1), 1);
    m.set(UserId(0), ItemId(2), 2);
    // Every neighbour: rating 3 on item 0, 1 on item 1 -> mean 2, centred +1.
    auto cache = SimilarityCache::empty(5);
    for (std::size_t n = 1; n < 5; ++n) {
      m.set(UserId(n), ItemId(0), 3);
      m.set(UserId(n), ItemId(1), 1);
      cache.set(UserId(0), UserId(n), sim(rng) * (t + 1));
    }
    EXPECT_NEAR(predict_cf(UserId(0), ItemId(0), m, cache, CfConfig{}).value, 1.5 + 1.0, 1e-12);
  }
}

TEST(PredictCf, MatchesBruteForceOnSmallInstances) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> users(2, 5), items(2, 4);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    auto m = random_matrix(rng, users(rng), items(rng), 0.8);
    CfModel model(m, RelationshipGraph(m.n_users()), CfConfig{});
    auto grid = oracle::to_grid(m);
    for (std::size_t u = 0; u < m.n_users(); ++u)
      for (std::size_t i = 0; i < m.n_items(); ++i) {
        auto ref = oracle::cf_predict(grid, u, i);
        if (!ref) {
          EXPECT_THROW(model.predict(UserId(u), ItemId(i)), ColdStartError);
          continue;
        }
        EXPECT_NEAR(model.predict(UserId(u), ItemId(i)).value, *ref, 1e-9);
        ++checked;
      }
  }
  EXPECT_GT(checked, 500);
}

TEST(RoundRating, HalfAwayFromZeroThenClamp) {
  EXPECT_EQ(round_rating(2.5).value(), 3);
  EXPECT_EQ(round_rating(2.49).value(), 2);
  EXPECT_EQ(round_rating(-0.4).value(), 0);
  EXPECT_EQ(round_rating(-3.0).value(), 0);
  EXPECT_EQ(round_rating(5.7).value(), 5);
  EXPECT_THROW(round_rating(std::nan("")), std::domain_error);
  EXPECT_THROW(round_rating(INFINITY), std::domain_error);
}

TEST(CfConfig, Bounds) {
  CfConfig c;
  c.neighbor_k = 0;
  EXPECT_THROW(check_config(c), std::invalid_argument);
  c = {};
  c.co_rate_min = 1;
  EXPECT_THROW(check_config(c), std::invalid_argument);
}
