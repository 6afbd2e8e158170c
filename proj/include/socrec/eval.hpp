#ifndef SOCREC_EVAL_HPP_
#define SOCREC_EVAL_HPP_

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "socrec/cf.hpp"
#include "socrec/core.hpp"
#include "socrec/io.hpp"
#include "socrec/snrs.hpp"

namespace socrec {

/// Test region: every (user, item) in test_users x test_items; the rest trains.
struct SplitSpec {
  std::vector<std::size_t> test_users;
  std::vector<std::size_t> test_items;

  static std::vector<std::size_t> range(std::size_t first, std::size_t last_inclusive) {
    std::vector<std::size_t> v(last_inclusive - first + 1);
    std::iota(v.begin(), v.end(), first);
    return v;
  }

  /// U51..U100 x I1..I5: 250 observations on the default 100x10 dataset.
  static SplitSpec defaults() { return {range(50, 99), range(0, 4)}; }

  /// U51..U100 x I6..I10, the second reference region.
  static SplitSpec upper_items() { return {range(50, 99), range(5, 9)}; }
};

struct TestCell {
  UserId user;
  ItemId item;
  RatingLevel actual;

  friend bool operator==(const TestCell&, const TestCell&) = default;
};

struct Split {
  Dataset train;
  std::vector<TestCell> test;  // ordered by (user, item)
};

/// Removes the test cells from the rating matrix; graph and categories are kept.
inline Split split(const Dataset& d, const SplitSpec& spec) {
  std::vector<std::size_t> users = spec.test_users, items = spec.test_items;
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  for (auto u : users)
    if (u >= d.n_users()) throw std::out_of_range("split: test user " + UserId(u).label() + " not in dataset");
  for (auto i : items)
    if (i >= d.n_items()) throw std::out_of_range("split: test item " + ItemId(i).label() + " not in dataset");

  Split out{d, {}};
  for (auto u : users)
    for (auto i : items) {
      auto r = d.ratings.get(UserId(u), ItemId(i));
      if (!r) throw Error("split: test cell (" + UserId(u).label() + "," + ItemId(i).label() + ") is empty");
      out.test.push_back({UserId(u), ItemId(i), RatingLevel(*r)});
      out.train.ratings.erase(UserId(u), ItemId(i));
    }
  return out;
}

namespace detail {
inline void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
  if (a == 0) throw std::invalid_argument(std::string(what) + ": empty input");
}
}  // namespace detail

/// Mean absolute error between integer predictions and actual ratings.
inline double mae(std::span<const RatingLevel> pred, std::span<const RatingLevel> actual) {
  detail::check_lengths(pred.size(), actual.size(), "mae");
  long total = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) total += std::abs(pred[k].value() - actual[k].value());
  return static_cast<double>(total) / static_cast<double>(pred.size());
}

/// Same metric on unrounded predictions.
inline double mae_real(std::span<const double> pred, std::span<const RatingLevel> actual) {
  detail::check_lengths(pred.size(), actual.size(), "mae_real");
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) total += std::abs(pred[k] - actual[k].value());
  return total / static_cast<double>(pred.size());
}

/// Percentage of exact matches.
inline double accuracy(std::span<const RatingLevel> pred, std::span<const RatingLevel> actual) {
  detail::check_lengths(pred.size(), actual.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) hits += pred[k] == actual[k] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

enum class Fallback { None, UserMean, GlobalMean, Uniform };

inline const char* to_string(Fallback f) {
  switch (f) {
    case Fallback::None: return "none";
    case Fallback::UserMean: return "user-mean";
    case Fallback::GlobalMean: return "global-mean";
    case Fallback::Uniform: return "uniform";
  }
  return "?";
}

struct CellRecord {
  UserId user;
  ItemId item;
  RatingLevel actual;
  double pred_real = 0.0;
  RatingLevel pred_rounded;
  Fallback fallback = Fallback::None;
};

struct EvaluationReport {
  std::string method;
  std::vector<CellRecord> records;
  double mae = 0.0;       // on rounded predictions
  double mae_real = 0.0;  // on raw predictions
  double accuracy_percent = 0.0;

  std::size_t n_observations() const { return records.size(); }

  std::size_t fallback_count() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                  [](const CellRecord& r) { return r.fallback != Fallback::None; }));
  }
};

/// Fills the summary numbers from the per-cell records.
inline void summarize(EvaluationReport& report) {
  std::vector<RatingLevel> pred, actual;
  std::vector<double> raw;
  for (const auto& r : report.records) {
    pred.push_back(r.pred_rounded);
    actual.push_back(r.actual);
    raw.push_back(r.pred_real);
  }
  report.mae = mae(pred, actual);
  report.mae_real = mae_real(raw, actual);
  report.accuracy_percent = accuracy(pred, actual);
}

/// User-based CF over the training matrix. A user with no training ratings is
/// predicted with the training global mean.
inline EvaluationReport evaluate_cf(const Dataset& train, std::span<const TestCell> test, const CfConfig& cfg) {
  CfModel model(train.ratings, train.graph, cfg);
  const auto global = train.ratings.global_mean();
  EvaluationReport report{"CF", {}, 0, 0, 0};
  for (const auto& cell : test) {
    CellRecord rec{cell.user, cell.item, cell.actual, 0.0, RatingLevel(0), Fallback::None};
    try {
      auto p = model.predict(cell.user, cell.item);
      rec.pred_real = p.value;
      rec.fallback = p.fallback ? Fallback::UserMean : Fallback::None;
    } catch (const ColdStartError&) {
      if (!global) throw;
      rec.pred_real = *global;
      rec.fallback = Fallback::GlobalMean;
    }
    rec.pred_rounded = round_rating(rec.pred_real);
    report.records.push_back(rec);
  }
  summarize(report);
  return report;
}

inline EvaluationReport evaluate_snrs(const Dataset& train, std::span<const TestCell> test, const SnrsConfig& cfg) {
  const SnrsModel model = learn_models(train, cfg);
  EvaluationReport report{"SNRS", {}, 0, 0, 0};
  for (const auto& cell : test) {
    auto p = predict_snrs_detail(cell.user, cell.item, model);
    CellRecord rec{cell.user, cell.item, cell.actual, p.value, round_rating(p.value),
                   p.fallback ? Fallback::Uniform : Fallback::None};
    report.records.push_back(rec);
  }
  summarize(report);
  return report;
}

/// Both methods trained on the same split and scored on the same test cells.
inline std::pair<EvaluationReport, EvaluationReport> run_comparison(const Dataset& d, const SplitSpec& spec,
                                                                    const CfConfig& cf_cfg,
                                                                    const SnrsConfig& snrs_cfg) {
  const Split s = split(d, spec);
  if (s.test.empty()) throw std::invalid_argument("run_comparison: empty test set");
  return {evaluate_cf(s.train, s.test, cf_cfg), evaluate_snrs(s.train, s.test, snrs_cfg)};
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

inline constexpr std::string_view kDetailHeader = "method,user,item,actual,pred_real,pred_rounded";
inline constexpr std::string_view kSummaryHeader = "method,n,mae_rounded,mae_real,accuracy_percent";

inline void write_detail_csv(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << kDetailHeader << '\n';
  for (const auto& rep : reports)
    for (const auto& r : rep.records)
      out << rep.method << ',' << r.user.label() << ',' << r.item.label() << ',' << r.actual.value() << ','
          << detail::format_double(r.pred_real) << ',' << r.pred_rounded.value() << '\n';
}

inline void write_summary_csv(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << kSummaryHeader << '\n';
  for (const auto& rep : reports)
    out << rep.method << ',' << rep.n_observations() << ',' << detail::format_double(rep.mae) << ','
        << detail::format_double(rep.mae_real) << ',' << detail::format_double(rep.accuracy_percent) << '\n';
}

}  // namespace socrec

#endif  // SOCREC_EVAL_HPP_
