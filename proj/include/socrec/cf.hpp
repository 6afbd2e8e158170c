#ifndef SOCREC_CF_HPP_
#define SOCREC_CF_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "socrec/core.hpp"

namespace socrec {

/// The user to predict for has no ratings at all.
class ColdStartError : public Error {
 public:
  explicit ColdStartError(UserId u) : Error("cold start: " + u.label() + " has no ratings"), user_(u) {}
  UserId user() const { return user_; }

 private:
  UserId user_;
};

enum class NeighborScope { AllUsers, FriendsOnly };

struct CfConfig {
  std::size_t neighbor_k = 20;
  std::size_t co_rate_min = 2;
  NeighborScope neighbor_scope = NeighborScope::AllUsers;
};

inline void check_config(const CfConfig& cfg) {
  if (cfg.neighbor_k < 1) throw std::invalid_argument("neighbor_k must be >= 1");
  if (cfg.co_rate_min < 2) throw std::invalid_argument("co_rate_min must be >= 2");
}

/// Pearson correlation of two equally long vectors, each centred on its own
/// mean. nullopt when either vector has zero variance or fewer than two
/// entries. The result is clamped to [-1, 1] against rounding drift.
inline std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double dot = 0.0, ss_a = 0.0, ss_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a, db = b[i] - mean_b;
    dot += da * db;
    ss_a += da * da;
    ss_b += db * db;
  }
  if (ss_a == 0.0 || ss_b == 0.0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(ss_a) * std::sqrt(ss_b)), -1.0, 1.0);
}

/// Pearson similarity over the items both users rated; means are taken over
/// those co-rated items only.
inline std::optional<double> pearson_similarity(UserId u, UserId n, const RatingMatrix& ratings,
                                                std::size_t co_rate_min = 2) {
  if (u == n) throw std::invalid_argument("pearson_similarity: users must differ");
  std::vector<double> ru, rn;
  for (std::size_t i = 0; i < ratings.n_items(); ++i) {
    auto a = ratings.get(u, ItemId(i));
    auto b = ratings.get(n, ItemId(i));
    if (a && b) {
      ru.push_back(*a);
      rn.push_back(*b);
    }
  }
  if (ru.size() < co_rate_min) return std::nullopt;
  return pearson(ru, rn);
}

/// Symmetric table of pairwise user similarities, computed once.
class SimilarityCache {
 public:
  SimilarityCache() = default;

  SimilarityCache(const RatingMatrix& ratings, const CfConfig& cfg)
      : n_(ratings.n_users()), sims_(n_ * n_) {
    check_config(cfg);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = a + 1; b < n_; ++b) {
        auto s = pearson_similarity(UserId(a), UserId(b), ratings, cfg.co_rate_min);
        sims_[a * n_ + b] = s;
        sims_[b * n_ + a] = s;
      }
  }

  std::size_t n_users() const { return n_; }

  std::optional<double> get(UserId a, UserId b) const {
    if (a.value >= n_ || b.value >= n_) throw std::out_of_range("similarity lookup out of bounds");
    return sims_[a.value * n_ + b.value];
  }

  void set(UserId a, UserId b, std::optional<double> s) {
    if (a.value >= n_ || b.value >= n_) throw std::out_of_range("similarity lookup out of bounds");
    sims_[a.value * n_ + b.value] = s;
    sims_[b.value * n_ + a.value] = s;
  }

  /// Cache with every similarity undefined; filled via set().
  static SimilarityCache empty(std::size_t n_users) {
    SimilarityCache c;
    c.n_ = n_users;
    c.sims_.assign(n_users * n_users, std::nullopt);
    return c;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::optional<double>> sims_;
};

struct Neighbor {
  UserId user;
  double similarity;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Positive-similarity users who rated `i`, best first, ties by index,
/// capped at neighbor_k. In friends-only scope a neighbour must also share an
/// edge of strength >= 1 with `u`.
inline std::vector<Neighbor> select_neighbors(UserId u, ItemId i, const RatingMatrix& ratings,
                                              const SimilarityCache& cache, const CfConfig& cfg,
                                              const RelationshipGraph* graph = nullptr) {
  if (cfg.neighbor_scope == NeighborScope::FriendsOnly && graph == nullptr)
    throw std::invalid_argument("friends-only neighbour scope needs a relationship graph");
  std::vector<Neighbor> out;
  for (std::size_t n = 0; n < ratings.n_users(); ++n) {
    const UserId v(n);
    if (v == u || !ratings.has(v, i)) continue;
    auto s = cache.get(u, v);
    if (!s || *s <= 0.0) continue;
    if (cfg.neighbor_scope == NeighborScope::FriendsOnly) {
      auto strength = graph->strength(u, v);
      if (!strength || *strength < 1) continue;
    }
    out.push_back({v, *s});
  }
  std::stable_sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.user < b.user;
  });
  if (out.size() > cfg.neighbor_k) out.resize(cfg.neighbor_k);
  return out;
}

struct CfPrediction {
  double value = 0.0;
  bool fallback = false;  // no neighbours; value is the user's own mean
  std::size_t neighbors = 0;
};

/// Mean-centred, similarity-normalised neighbour average:
///
///   pred(u,i) = mean(u) + sum_n sim(u,n) (r_ni - mean(n)) / sum_n sim(u,n)
///
/// with means over each user's full rating row. Not rounded or clamped.
/// Throws ColdStartError when `u` has no ratings.
inline CfPrediction predict_cf(UserId u, ItemId i, const RatingMatrix& ratings, const SimilarityCache& cache,
                               const CfConfig& cfg, const RelationshipGraph* graph = nullptr) {
  auto mean_u = ratings.user_mean(u);
  if (!mean_u) throw ColdStartError(u);
  auto neighbors = select_neighbors(u, i, ratings, cache, cfg, graph);
  if (neighbors.empty()) return {*mean_u, true, 0};

  double num = 0.0, den = 0.0;
  for (const auto& nb : neighbors) {
    // A neighbour has rated i, so its mean exists.
    const double centred = *ratings.get(nb.user, i) - *ratings.user_mean(nb.user);
    num += nb.similarity * centred;
    den += nb.similarity;
  }
  return {*mean_u + num / den, false, neighbors.size()};
}

/// Round half away from zero, then clamp to 0..5.
inline RatingLevel round_rating(double x) {
  if (!std::isfinite(x)) throw std::domain_error("round_rating: non-finite input");
  return RatingLevel(static_cast<int>(std::clamp(std::round(x), double(kMinLevel), double(kMaxLevel))));
}

/// Training ratings, graph and similarity cache bundled for repeated queries.
class CfModel {
 public:
  CfModel(RatingMatrix ratings, RelationshipGraph graph, CfConfig cfg)
      : ratings_(std::move(ratings)), graph_(std::move(graph)), cfg_(cfg), cache_(ratings_, cfg_) {}

  CfPrediction predict(UserId u, ItemId i) const { return predict_cf(u, i, ratings_, cache_, cfg_, &graph_); }

  const RatingMatrix& ratings() const { return ratings_; }
  const SimilarityCache& cache() const { return cache_; }
  const CfConfig& config() const { return cfg_; }

 private:
  RatingMatrix ratings_;
  RelationshipGraph graph_;
  CfConfig cfg_;
  SimilarityCache cache_;
};

}  // namespace socrec

#endif  // SOCREC_CF_HPP_
