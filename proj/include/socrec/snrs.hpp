#ifndef SOCREC_SNRS_HPP_
#define SOCREC_SNRS_HPP_

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "socrec/core.hpp"

namespace socrec {

/// Probability vector over rating levels 0..5.
class RatingDistribution {
 public:
  using Array = std::array<double, kNumLevels>;

  static RatingDistribution uniform() {
    Array a;
    a.fill(1.0 / static_cast<double>(kNumLevels));
    return RatingDistribution(a);
  }

  static RatingDistribution point(int level) {
    Array a{};
    a.at(static_cast<std::size_t>(level)) = 1.0;
    return RatingDistribution(a);
  }

  /// Normalises non-negative weights. Throws std::domain_error if they sum to zero.
  static RatingDistribution from_weights(const Array& w) {
    double z = 0.0;
    for (double x : w) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("distribution weights must be finite and >= 0");
      z += x;
    }
    if (z <= 0.0) throw std::domain_error("distribution weights sum to zero");
    Array p;
    for (std::size_t k = 0; k < kNumLevels; ++k) p[k] = w[k] / z;
    return RatingDistribution(p);
  }

  double operator[](std::size_t k) const { return prob_.at(k); }
  const Array& probs() const { return prob_; }

  double sum() const { return std::accumulate(prob_.begin(), prob_.end(), 0.0); }

  bool is_valid(double tol = 1e-9) const {
    for (double x : prob_)
      if (!(x >= 0.0)) return false;
    return std::abs(sum() - 1.0) <= tol;
  }

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(prob_.begin(), prob_.end()) - prob_.begin());
  }

 private:
  RatingDistribution() = default;
  explicit RatingDistribution(const Array& p) : prob_(p) {}

  Array prob_{};
};

/// combine() got three distributions with no level in common.
class DegenerateEvidenceError : public Error {
 public:
  DegenerateEvidenceError() : Error("combined evidence is zero at every rating level") {}
};

struct SnrsConfig {
  double laplace_alpha = 1.0;
  int friend_min_strength = 1;
  std::vector<int> prediction_levels = {0, 1, 2, 3, 4, 5};
};

inline void check_config(const SnrsConfig& cfg) {
  if (!(cfg.laplace_alpha > 0.0)) throw std::invalid_argument("laplace_alpha must be > 0");
  if (cfg.prediction_levels.empty()) throw std::invalid_argument("prediction_levels must not be empty");
  for (int k : cfg.prediction_levels)
    if (!in_level_range(k)) throw std::invalid_argument("prediction level outside 0..5");
}

// Smoothed estimate (count(k) + a) / (N + 6a) for every level.
inline RatingDistribution smoothed(const std::array<double, kNumLevels>& counts, double alpha) {
  std::array<double, kNumLevels> w;
  for (std::size_t k = 0; k < kNumLevels; ++k) w[k] = counts[k] + alpha;
  return RatingDistribution::from_weights(w);
}

/// Per-user naive-Bayes model: rating prior plus P(category bit = 1 | level).
struct UserPreferenceModel {
  struct User {
    RatingDistribution prior = RatingDistribution::uniform();
    // bit_one[c][k] = P(bit_c = 1 | rated k)
    std::vector<std::array<double, kNumLevels>> bit_one;
  };
  std::vector<User> users;
};

/// Per-item rating distribution over every training rating the item received.
struct ItemAcceptanceModel {
  std::vector<RatingDistribution> items;
};

/// Per ordered friend pair (u, v): table[k][j] = P(R_u = k | R_v = j).
struct FriendConditionalTable {
  using Table = std::array<std::array<double, kNumLevels>, kNumLevels>;
  std::map<std::pair<std::size_t, std::size_t>, Table> pairs;

  const Table* find(UserId u, UserId v) const {
    auto it = pairs.find({u.value, v.value});
    return it == pairs.end() ? nullptr : &it->second;
  }
};

/// Everything learned from a training dataset.
struct SnrsModel {
  UserPreferenceModel preference;
  ItemAcceptanceModel acceptance;
  FriendConditionalTable friends;
  Dataset train;
  SnrsConfig cfg;
};

/// Counts every training rating cell; throws Error when there are none.
inline SnrsModel learn_models(const Dataset& train, const SnrsConfig& cfg) {
  check_config(cfg);
  if (auto v = validate_dataset(train); !v.empty())
    throw std::invalid_argument("learn_models: invalid training dataset: " + v.front().message);
  if (train.ratings.filled() == 0) throw Error("learn_models: empty training set");

  const double a = cfg.laplace_alpha;
  const std::size_t n_users = train.n_users(), n_items = train.n_items(), n_cats = train.n_categories();
  const auto& R = train.ratings;

  SnrsModel m;
  m.train = train;
  m.cfg = cfg;

  m.preference.users.resize(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    std::array<double, kNumLevels> level_counts{};
    std::vector<std::array<double, kNumLevels>> ones(n_cats, std::array<double, kNumLevels>{});
    for (std::size_t i = 0; i < n_items; ++i) {
      auto r = R.get(UserId(u), ItemId(i));
      if (!r) continue;
      level_counts[*r] += 1.0;
      for (std::size_t c = 0; c < n_cats; ++c)
        if (train.categories.get(ItemId(i), CategoryId(c)) == 1) ones[c][*r] += 1.0;
    }
    auto& user = m.preference.users[u];
    user.prior = smoothed(level_counts, a);
    user.bit_one.resize(n_cats);
    for (std::size_t c = 0; c < n_cats; ++c)
      for (std::size_t k = 0; k < kNumLevels; ++k)
        user.bit_one[c][k] = (ones[c][k] + a) / (level_counts[k] + 2.0 * a);
  }

  m.acceptance.items.reserve(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    std::array<double, kNumLevels> counts{};
    for (std::size_t u = 0; u < n_users; ++u)
      if (auto r = R.get(UserId(u), ItemId(i))) counts[*r] += 1.0;
    m.acceptance.items.push_back(smoothed(counts, a));
  }

  for (std::size_t u = 0; u < n_users; ++u) {
    for (const auto& [v, s] : train.graph.neighbors(UserId(u))) {
      if (s < cfg.friend_min_strength) continue;
      std::array<std::array<double, kNumLevels>, kNumLevels> joint{};  // [k][j]
      std::array<double, kNumLevels> col{};                             // count(j)
      for (std::size_t i = 0; i < n_items; ++i) {
        auto ru = R.get(UserId(u), ItemId(i));
        auto rv = R.get(UserId(v), ItemId(i));
        if (!ru || !rv) continue;
        joint[*ru][*rv] += 1.0;
        col[*rv] += 1.0;
      }
      FriendConditionalTable::Table t;
      for (std::size_t k = 0; k < kNumLevels; ++k)
        for (std::size_t j = 0; j < kNumLevels; ++j)
          t[k][j] = (joint[k][j] + a) / (col[j] + 6.0 * a);
      m.friends.pairs.emplace(std::make_pair(u, v), t);
    }
  }
  return m;
}

/// Naive-Bayes user preference: prior(k) * prod_c P(bit_c = b(i,c) | k), normalised over k.
inline RatingDistribution user_preference_prob(UserId u, ItemId i, const UserPreferenceModel& model,
                                               const ItemCategoryMatrix& categories) {
  const auto& user = model.users.at(u.value);
  std::array<double, kNumLevels> w;
  for (std::size_t k = 0; k < kNumLevels; ++k) {
    double p = user.prior[k];
    for (std::size_t c = 0; c < categories.n_categories(); ++c) {
      const double one = user.bit_one.at(c)[k];
      p *= categories.get(i, CategoryId(c)) == 1 ? one : 1.0 - one;
    }
    w[k] = p;
  }
  return RatingDistribution::from_weights(w);
}

// Reviewer attributes are not part of the dataset, so acceptance is the
// item's smoothed rating prior alone.
inline RatingDistribution item_acceptance_prob(ItemId i, const ItemAcceptanceModel& model) {
  return model.items.at(i.value);
}

/// Product over friends v who rated i of P(R_u = k | R_v = r_v(i)), normalised.
/// Uniform when no friend rated the item.
inline RatingDistribution friend_inference_prob(UserId u, ItemId i, const FriendConditionalTable& tables,
                                                const RelationshipGraph& graph, const RatingMatrix& train,
                                                const SnrsConfig& cfg) {
  std::array<double, kNumLevels> w;
  w.fill(1.0);
  bool any = false;
  for (const auto& [v, s] : graph.neighbors(u)) {
    if (s < cfg.friend_min_strength) continue;
    auto rv = train.get(UserId(v), i);
    if (!rv) continue;
    const auto* t = tables.find(u, UserId(v));
    if (!t) continue;
    any = true;
    for (std::size_t k = 0; k < kNumLevels; ++k) w[k] *= (*t)[k][*rv];
    // Keep the running product away from underflow; only ratios matter.
    const double peak = *std::max_element(w.begin(), w.end());
    if (peak > 0.0)
      for (double& x : w) x /= peak;
  }
  if (!any) return RatingDistribution::uniform();
  return RatingDistribution::from_weights(w);
}

/// Per-level product of the three factors divided by their total Z.
inline RatingDistribution combine(const RatingDistribution& pu, const RatingDistribution& pi,
                                  const RatingDistribution& pff) {
  std::array<double, kNumLevels> w;
  double z = 0.0;
  for (std::size_t k = 0; k < kNumLevels; ++k) {
    w[k] = pu[k] * pi[k] * pff[k];
    z += w[k];
  }
  if (!(z > 0.0)) throw DegenerateEvidenceError();
  return RatingDistribution::from_weights(w);
}

/// Expected rating over `levels`, after renormalising the distribution to them.
inline double expected_rating(const RatingDistribution& pf, const std::vector<int>& levels) {
  double mass = 0.0, acc = 0.0;
  for (int k : levels) {
    const double p = pf[static_cast<std::size_t>(k)];
    mass += p;
    acc += p * k;
  }
  if (!(mass > 0.0)) throw DegenerateEvidenceError();
  return acc / mass;
}

struct SnrsPrediction {
  RatingDistribution user_preference = RatingDistribution::uniform();
  RatingDistribution item_acceptance = RatingDistribution::uniform();
  RatingDistribution friend_inference = RatingDistribution::uniform();
  RatingDistribution combined = RatingDistribution::uniform();
  double value = 0.0;
  bool fallback = false;  // combine was degenerate and a uniform distribution was used
};

/// Full prediction with every intermediate distribution exposed.
inline SnrsPrediction predict_snrs_detail(UserId u, ItemId i, const SnrsModel& m) {
  SnrsPrediction p;
  p.user_preference = user_preference_prob(u, i, m.preference, m.train.categories);
  p.item_acceptance = item_acceptance_prob(i, m.acceptance);
  p.friend_inference = friend_inference_prob(u, i, m.friends, m.train.graph, m.train.ratings, m.cfg);
  try {
    p.combined = combine(p.user_preference, p.item_acceptance, p.friend_inference);
  } catch (const DegenerateEvidenceError&) {
    p.combined = RatingDistribution::uniform();
    p.fallback = true;
  }
  p.value = expected_rating(p.combined, m.cfg.prediction_levels);
  return p;
}

/// Weighted mean of rating levels under the combined distribution.
inline double predict_snrs(UserId u, ItemId i, const SnrsModel& m) { return predict_snrs_detail(u, i, m).value; }

}  // namespace socrec

#endif  // SOCREC_SNRS_HPP_
