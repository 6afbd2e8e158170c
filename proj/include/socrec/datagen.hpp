#ifndef SOCREC_DATAGEN_HPP_
#define SOCREC_DATAGEN_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "socrec/core.hpp"

namespace socrec {

struct GenConfig {
  std::size_t n_users = 100;
  std::size_t n_items = 10;
  std::size_t n_categories = 10;
  double edge_density = 0.1;
  double seed_rating_fraction = 0.1;
  std::size_t fill_passes = 3;
  std::uint64_t rng_seed = 42;
};

/// Throws std::invalid_argument when a count is zero or a fraction is outside (0,1].
inline void check_config(const GenConfig& cfg) {
  auto fraction = [](double f, const char* name) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in (0,1]");
  };
  if (cfg.n_users == 0) throw std::invalid_argument("n_users must be >= 1");
  if (cfg.n_items == 0) throw std::invalid_argument("n_items must be >= 1");
  if (cfg.n_categories == 0) throw std::invalid_argument("n_categories must be >= 1");
  if (cfg.fill_passes == 0) throw std::invalid_argument("fill_passes must be >= 1");
  fraction(cfg.edge_density, "edge_density");
  fraction(cfg.seed_rating_fraction, "seed_rating_fraction");
}

/// Where a generated rating came from.
struct CellOrigin {
  enum class Kind { Seeded, Propagated, Random };
  Kind kind = Kind::Random;
  std::size_t pass = 0;  // 1-based sweep that set the cell; only for Propagated
};

/// Origins laid out row-major like RatingMatrix (user * n_items + item).
struct FillTrace {
  std::size_t n_items = 0;
  std::vector<CellOrigin> origins;

  const CellOrigin& at(UserId u, ItemId i) const { return origins.at(u.value * n_items + i.value); }
};

namespace detail {

// Each table draws from its own stream so that the generators are
// independently deterministic in the seed.
enum class Stream : std::uint32_t { Relationships = 1, Categories = 2, Seeds = 3, Fill = 4 };

inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

inline int draw_level(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(kMinLevel, kMaxLevel)(rng);
}

inline int round_half_away_clamped(double x) {
  return static_cast<int>(std::clamp(std::round(x), double(kMinLevel), double(kMaxLevel)));
}

}  // namespace detail

/// Each unordered pair gets an edge with probability edge_density; strengths
/// are uniform over 0..5.
inline RelationshipGraph generate_relationships(const GenConfig& cfg) {
  check_config(cfg);
  auto rng = detail::make_engine(cfg.rng_seed, detail::Stream::Relationships);
  std::bernoulli_distribution has_edge(cfg.edge_density);
  RelationshipGraph g(cfg.n_users);
  for (std::size_t a = 0; a < cfg.n_users; ++a)
    for (std::size_t b = a + 1; b < cfg.n_users; ++b)
      if (has_edge(rng)) g.set_edge(UserId(a), UserId(b), detail::draw_level(rng));
  return g;
}

/// Independent fair coin per (item, category).
inline ItemCategoryMatrix generate_categories(const GenConfig& cfg) {
  check_config(cfg);
  auto rng = detail::make_engine(cfg.rng_seed, detail::Stream::Categories);
  std::bernoulli_distribution coin(0.5);
  ItemCategoryMatrix m(cfg.n_items, cfg.n_categories);
  for (std::size_t i = 0; i < cfg.n_items; ++i)
    for (std::size_t c = 0; c < cfg.n_categories; ++c) m.set(ItemId(i), CategoryId(c), coin(rng) ? 1 : 0);
  return m;
}

/// Sparse random seed ratings. At least one cell is always filled.
inline RatingMatrix seed_ratings(const GenConfig& cfg) {
  check_config(cfg);
  auto rng = detail::make_engine(cfg.rng_seed, detail::Stream::Seeds);
  std::bernoulli_distribution seeded(cfg.seed_rating_fraction);
  RatingMatrix m(cfg.n_users, cfg.n_items);
  for (std::size_t u = 0; u < cfg.n_users; ++u)
    for (std::size_t i = 0; i < cfg.n_items; ++i)
      if (seeded(rng)) m.set(UserId(u), ItemId(i), detail::draw_level(rng));
  if (m.filled() == 0) {
    auto u = std::uniform_int_distribution<std::size_t>(0, cfg.n_users - 1)(rng);
    auto i = std::uniform_int_distribution<std::size_t>(0, cfg.n_items - 1)(rng);
    m.set(UserId(u), ItemId(i), detail::draw_level(rng));
  }
  return m;
}

/// Friend-weighted propagation of the seed ratings into a dense matrix.
///
/// Each sweep visits empty cells in (user, item) order and fills a cell from
/// the ratings that existed at the start of the sweep:
///
///   K(u,i) = round( sum_j s(u,x_j) * K(x_j,i) / sum_j s(u,x_j) )
///
/// over friends x_j with strength >= 1 who rated i. A zero total weight counts
/// as no eligible friends. After fill_passes sweeps the remaining holes get
/// uniform random ratings. If `trace` is non-null it receives each cell's origin.
inline RatingMatrix friend_weighted_fill(const RelationshipGraph& graph, const RatingMatrix& seeded,
                                         const GenConfig& cfg, FillTrace* trace = nullptr) {
  check_config(cfg);
  if (graph.n_users() != seeded.n_users())
    throw std::invalid_argument("graph and rating matrix disagree on the number of users");

  const std::size_t n_users = seeded.n_users(), n_items = seeded.n_items();
  RatingMatrix current = seeded;
  std::vector<CellOrigin> origins(n_users * n_items);
  for (std::size_t u = 0; u < n_users; ++u)
    for (std::size_t i = 0; i < n_items; ++i)
      if (seeded.has(UserId(u), ItemId(i))) origins[u * n_items + i] = {CellOrigin::Kind::Seeded, 0};

  for (std::size_t pass = 1; pass <= cfg.fill_passes; ++pass) {
    const RatingMatrix snapshot = current;
    bool changed = false;
    for (std::size_t u = 0; u < n_users; ++u) {
      for (std::size_t i = 0; i < n_items; ++i) {
        if (snapshot.has(UserId(u), ItemId(i))) continue;
        long weight = 0, weighted = 0;
        for (const auto& [friend_idx, s] : graph.neighbors(UserId(u))) {
          if (s < 1) continue;
          if (auto r = snapshot.get(UserId(friend_idx), ItemId(i))) {
            weight += s;
            weighted += static_cast<long>(s) * *r;
          }
        }
        if (weight == 0) continue;
        current.set(UserId(u), ItemId(i),
                    detail::round_half_away_clamped(static_cast<double>(weighted) / static_cast<double>(weight)));
        origins[u * n_items + i] = {CellOrigin::Kind::Propagated, pass};
        changed = true;
      }
    }
    if (!changed) break;
  }

  auto rng = detail::make_engine(cfg.rng_seed, detail::Stream::Fill);
  for (std::size_t u = 0; u < n_users; ++u)
    for (std::size_t i = 0; i < n_items; ++i)
      if (!current.has(UserId(u), ItemId(i))) current.set(UserId(u), ItemId(i), detail::draw_level(rng));

  if (trace) *trace = FillTrace{n_items, std::move(origins)};
  return current;
}

/// Full three-table dataset; ratings are dense.
inline Dataset generate_dataset(const GenConfig& cfg, FillTrace* trace = nullptr) {
  check_config(cfg);
  Dataset d;
  d.graph = generate_relationships(cfg);
  d.categories = generate_categories(cfg);
  d.ratings = friend_weighted_fill(d.graph, seed_ratings(cfg), cfg, trace);
  d.meta = DatasetMeta{cfg.rng_seed, cfg.edge_density, cfg.seed_rating_fraction, cfg.fill_passes};
  return d;
}

}  // namespace socrec

#endif  // SOCREC_DATAGEN_HPP_
