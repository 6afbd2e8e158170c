#ifndef SOCREC_CORE_HPP_
#define SOCREC_CORE_HPP_

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace socrec {

inline constexpr int kMinLevel = 0;
inline constexpr int kMaxLevel = 5;
inline constexpr std::size_t kNumLevels = 6;

// Base for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

struct UserTag { static constexpr char prefix = 'U'; };
struct ItemTag { static constexpr char prefix = 'I'; };
struct CategoryTag { static constexpr char prefix = 'C'; };

/// Dense 0-based index with a 1-based display label ("U51" is index 50).
template <class Tag>
struct Id {
  std::size_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::size_t v) : value(v) {}

  std::string label() const { return Tag::prefix + std::to_string(value + 1); }

  /// Parses "U51" (or a bare "51") into index 50. Returns nullopt on anything else.
  static std::optional<Id> parse(std::string_view text, bool allow_bare = false) {
    if (!text.empty() && text.front() == Tag::prefix) {
      text.remove_prefix(1);
    } else if (!allow_bare) {
      return std::nullopt;
    }
    if (text.empty() || text.front() == '0') return std::nullopt;
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return Id(n - 1);
  }

  friend constexpr auto operator<=>(const Id&, const Id&) = default;
};

using UserId = Id<UserTag>;
using ItemId = Id<ItemTag>;
using CategoryId = Id<CategoryTag>;

/// Integer rating (or relationship strength) in 0..5.
class RatingLevel {
 public:
  constexpr RatingLevel() = default;
  explicit RatingLevel(int v) : value_(v) {
    if (v < kMinLevel || v > kMaxLevel)
      throw std::out_of_range("rating level " + std::to_string(v) + " outside 0..5");
  }
  constexpr int value() const { return value_; }
  friend constexpr auto operator<=>(const RatingLevel&, const RatingLevel&) = default;

 private:
  int value_ = 0;
};

constexpr bool in_level_range(int v) { return v >= kMinLevel && v <= kMaxLevel; }

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

// Adjacency is stored per direction so that validation can observe (and
// report) asymmetric input. set_edge() always writes both directions.
class RelationshipGraph {
 public:
  RelationshipGraph() = default;
  explicit RelationshipGraph(std::size_t n_users) : adj_(n_users) {}

  std::size_t n_users() const { return adj_.size(); }

  void set_edge(UserId a, UserId b, int strength) {
    set_directed(a, b, strength);
    set_directed(b, a, strength);
  }

  // Raw single-direction write; used when ingesting untrusted data.
  void set_directed(UserId from, UserId to, int strength) {
    adj_.at(from.value)[to.value] = strength;
  }

  std::optional<int> strength(UserId a, UserId b) const {
    const auto& row = adj_.at(a.value);
    auto it = row.find(b.value);
    if (it == row.end()) return std::nullopt;
    return it->second;
  }

  bool knows(UserId a, UserId b) const { return strength(a, b).has_value(); }

  /// Neighbours of `u` ordered by index, with their strengths.
  const std::map<std::size_t, int>& neighbors(UserId u) const { return adj_.at(u.value); }

  /// Number of unordered pairs with an edge in at least one direction.
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (std::size_t a = 0; a < adj_.size(); ++a)
      for (const auto& [b, s] : adj_[a])
        if (a < b || !adj_[b].contains(a)) ++n;
    return n;
  }

  friend bool operator==(const RelationshipGraph&, const RelationshipGraph&) = default;

 private:
  std::vector<std::map<std::size_t, int>> adj_;
};

class RatingMatrix {
 public:
  RatingMatrix() = default;
  RatingMatrix(std::size_t n_users, std::size_t n_items)
      : n_users_(n_users), n_items_(n_items), cells_(n_users * n_items) {}

  std::size_t n_users() const { return n_users_; }
  std::size_t n_items() const { return n_items_; }

  std::optional<int> get(UserId u, ItemId i) const { return cells_.at(index(u, i)); }
  bool has(UserId u, ItemId i) const { return get(u, i).has_value(); }
  void set(UserId u, ItemId i, int rating) { cells_.at(index(u, i)) = rating; }
  void erase(UserId u, ItemId i) { cells_.at(index(u, i)).reset(); }

  std::size_t filled() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); }));
  }

  double density() const {
    return cells_.empty() ? 0.0 : static_cast<double>(filled()) / static_cast<double>(cells_.size());
  }

  /// Mean over the user's full rating row, or nullopt for an empty row.
  std::optional<double> user_mean(UserId u) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < n_items_; ++i) {
      if (auto r = get(u, ItemId(i))) {
        sum += *r;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }

  std::optional<double> global_mean() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& c : cells_) {
      if (c) {
        sum += *c;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }

  friend bool operator==(const RatingMatrix&, const RatingMatrix&) = default;

 private:
  std::size_t index(UserId u, ItemId i) const {
    if (u.value >= n_users_ || i.value >= n_items_)
      throw std::out_of_range("rating cell (" + u.label() + "," + i.label() + ") out of bounds");
    return u.value * n_items_ + i.value;
  }

  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::vector<std::optional<int>> cells_;
};

class ItemCategoryMatrix {
 public:
  ItemCategoryMatrix() = default;
  ItemCategoryMatrix(std::size_t n_items, std::size_t n_categories)
      : n_items_(n_items), n_categories_(n_categories), bits_(n_items * n_categories, 0) {}

  std::size_t n_items() const { return n_items_; }
  std::size_t n_categories() const { return n_categories_; }

  int get(ItemId i, CategoryId c) const { return bits_.at(index(i, c)); }
  void set(ItemId i, CategoryId c, int bit) { bits_.at(index(i, c)) = bit; }

  friend bool operator==(const ItemCategoryMatrix&, const ItemCategoryMatrix&) = default;

 private:
  std::size_t index(ItemId i, CategoryId c) const {
    if (i.value >= n_items_ || c.value >= n_categories_)
      throw std::out_of_range("category cell (" + i.label() + "," + c.label() + ") out of bounds");
    return i.value * n_categories_ + c.value;
  }

  std::size_t n_items_ = 0;
  std::size_t n_categories_ = 0;
  std::vector<int> bits_;
};

/// Generation parameters carried alongside a dataset. Absent for hand-built
/// or externally sourced data.
struct DatasetMeta {
  std::optional<std::uint64_t> seed;
  std::optional<double> edge_density;
  std::optional<double> seed_rating_fraction;
  std::optional<std::size_t> fill_passes;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Dataset {
  RelationshipGraph graph;
  RatingMatrix ratings;
  ItemCategoryMatrix categories;
  DatasetMeta meta;

  std::size_t n_users() const { return ratings.n_users(); }
  std::size_t n_items() const { return ratings.n_items(); }
  std::size_t n_categories() const { return categories.n_categories(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Empty dataset of the given shape.
inline Dataset make_dataset(std::size_t n_users, std::size_t n_items, std::size_t n_categories) {
  return Dataset{RelationshipGraph(n_users), RatingMatrix(n_users, n_items),
                 ItemCategoryMatrix(n_items, n_categories), {}};
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind { Dimension, Symmetry, SelfEdge, Range };
  Kind kind;
  std::string message;
};

/// Every invariant violation in `d`; empty iff the dataset is well formed.
inline std::vector<Violation> validate_dataset(const Dataset& d) {
  using K = Violation::Kind;
  std::vector<Violation> out;

  if (d.graph.n_users() != d.ratings.n_users())
    out.push_back({K::Dimension, "graph has " + std::to_string(d.graph.n_users()) +
                                     " users but ratings have " + std::to_string(d.ratings.n_users())});
  if (d.ratings.n_items() != d.categories.n_items())
    out.push_back({K::Dimension, "ratings have " + std::to_string(d.ratings.n_items()) +
                                     " items but categories have " + std::to_string(d.categories.n_items())});

  const std::size_t n = d.graph.n_users();
  for (std::size_t a = 0; a < n; ++a) {
    for (const auto& [b, s] : d.graph.neighbors(UserId(a))) {
      const UserId ua(a), ub(b);
      if (b >= n) {
        out.push_back({K::Dimension, "edge " + ua.label() + "-" + ub.label() + " references unknown user"});
        continue;
      }
      if (a == b) {
        out.push_back({K::SelfEdge, "self edge on " + ua.label()});
        continue;
      }
      if (!in_level_range(s))
        out.push_back({K::Range, "strength " + std::to_string(s) + " on " + ua.label() + "->" + ub.label()});
      // Report each asymmetric pair once, from its lower endpoint (or from
      // whichever side exists when the reverse direction is missing).
      auto back = d.graph.strength(ub, ua);
      if (!back) {
        out.push_back({K::Symmetry, ua.label() + "->" + ub.label() + " has no reverse edge"});
      } else if (*back != s && a < b) {
        out.push_back({K::Symmetry, "strength(" + ua.label() + "," + ub.label() + ")=" + std::to_string(s) +
                                        " but strength(" + ub.label() + "," + ua.label() +
                                        ")=" + std::to_string(*back)});
      }
    }
  }

  for (std::size_t u = 0; u < d.ratings.n_users(); ++u)
    for (std::size_t i = 0; i < d.ratings.n_items(); ++i)
      if (auto r = d.ratings.get(UserId(u), ItemId(i)); r && !in_level_range(*r))
        out.push_back({K::Range, "rating " + std::to_string(*r) + " at (" + UserId(u).label() + "," +
                                     ItemId(i).label() + ")"});

  for (std::size_t i = 0; i < d.categories.n_items(); ++i)
    for (std::size_t c = 0; c < d.categories.n_categories(); ++c)
      if (int b = d.categories.get(ItemId(i), CategoryId(c)); b != 0 && b != 1)
        out.push_back({K::Range, "membership " + std::to_string(b) + " at (" + ItemId(i).label() + "," +
                                     CategoryId(c).label() + ")"});
  return out;
}

}  // namespace socrec

#endif  // SOCREC_CORE_HPP_
