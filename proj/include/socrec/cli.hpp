#ifndef SOCREC_CLI_HPP_
#define SOCREC_CLI_HPP_

// Command-line front end. Kept in a header so tests can drive it in-process;
// tools/socrec.cpp is a thin main() around run_cli().

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include "socrec/cf.hpp"
#include "socrec/datagen.hpp"
#include "socrec/eval.hpp"
#include "socrec/io.hpp"
#include "socrec/snrs.hpp"

namespace socrec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag values detected after CLI11 has parsed them.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Parses "51-100", "U51-U100", "I1,I3,I5" or mixtures into 0-based indices.
/// Bare numbers are 1-based labels.
template <class IdT>
std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    std::string part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    start = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (part.empty()) continue;
    auto dash = part.find('-');
    auto first = IdT::parse(part.substr(0, dash), true);
    auto last = dash == std::string::npos ? first : IdT::parse(part.substr(dash + 1), true);
    if (!first || !last || last->value < first->value) throw UsageError("bad index range '" + part + "'");
    for (std::size_t k = first->value; k <= last->value; ++k) out.push_back(k);
  }
  if (out.empty()) throw UsageError("empty index list '" + text + "'");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Parses rating levels such as "0-5", "1-5" or "0,2,4".
inline std::vector<int> parse_levels(const std::string& text) {
  auto level = [&](const std::string& t) {
    auto v = socrec::detail::parse_int(t);
    if (!v || !in_level_range(*v)) throw UsageError("bad rating level '" + t + "' in '" + text + "'");
    return *v;
  };
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-');
    const int first = level(part.substr(0, dash));
    const int last = dash == std::string::npos ? first : level(part.substr(dash + 1));
    if (last < first) throw UsageError("bad level range '" + part + "'");
    for (int k = first; k <= last; ++k) out.push_back(k);
  }
  if (out.empty()) throw UsageError("empty level list '" + text + "'");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

struct CfFlags {
  std::size_t neighbors = CfConfig{}.neighbor_k;
  std::size_t co_rate_min = CfConfig{}.co_rate_min;
  std::string scope = "all";

  void add(CLI::App* app) {
    app->add_option("--neighbors", neighbors, "CF: maximum neighbours per prediction")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--co-rate-min", co_rate_min, "CF: minimum co-rated items for a defined similarity")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    app->add_option("--scope", scope, "CF: neighbour scope")
        ->check(CLI::IsMember({"all", "friends"}))
        ->capture_default_str();
  }

  CfConfig config() const {
    return {neighbors, co_rate_min, scope == "friends" ? NeighborScope::FriendsOnly : NeighborScope::AllUsers};
  }
};

struct SnrsFlags {
  double alpha = SnrsConfig{}.laplace_alpha;
  int friend_min_strength = SnrsConfig{}.friend_min_strength;
  std::string levels = "0-5";

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "SNRS: Laplace smoothing pseudo-count (> 0)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--friend-min-strength", friend_min_strength, "SNRS: minimum edge strength counted as a friend")
        ->check(CLI::Range(0, 5))
        ->capture_default_str();
    app->add_option("--levels", levels, "SNRS: rating levels in the final weighted mean, e.g. 0-5 or 1-5")
        ->capture_default_str();
  }

  SnrsConfig config() const { return {alpha, friend_min_strength, parse_levels(levels)}; }
};

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("write failed: " + path.string());
}

inline void write_reports(const std::filesystem::path& dir, std::span<const EvaluationReport> reports) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream detail, summary;
  write_detail_csv(detail, reports);
  write_summary_csv(summary, reports);
  write_file(dir / "detail.csv", detail.str());
  write_file(dir / "summary.csv", summary.str());
}

inline void print_summary(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << std::left << std::setw(8) << "method" << std::right << std::setw(6) << "n" << std::setw(10) << "MAE"
      << std::setw(11) << "MAE(real)" << std::setw(11) << "accuracy" << std::setw(11) << "fallbacks" << '\n';
  for (const auto& r : reports)
    out << std::left << std::setw(8) << r.method << std::right << std::setw(6) << r.n_observations()
        << std::setw(10) << fixed(r.mae, 3) << std::setw(11) << fixed(r.mae_real, 3) << std::setw(10)
        << fixed(r.accuracy_percent, 1) << '%' << std::setw(11) << r.fallback_count() << '\n';
}

}  // namespace detail

/// Runs the CLI on `args` (args[0] is the program name). Returns the exit status:
/// 0 success, 1 runtime failure, 2 usage error.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Social-network recommender workbench: dataset generation, CF and SNRS prediction, evaluation",
               "socrec"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Optional key=value file of defaults (flags override it)");

  // gen
  GenConfig gen_cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic three-table dataset");
  gen->add_option("--users", gen_cfg.n_users, "Number of users")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--items", gen_cfg.n_items, "Number of items")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--categories", gen_cfg.n_categories, "Number of item categories")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--edge-density", gen_cfg.edge_density, "Fraction of user pairs that get a relationship, (0,1]")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--seed-fraction", gen_cfg.seed_rating_fraction,
                  "Fraction of rating cells seeded at random before propagation, (0,1]")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--fill-passes", gen_cfg.fill_passes, "Friend-weighted propagation sweeps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--seed", gen_cfg.rng_seed, "Random seed")->capture_default_str();
  gen->add_option("--out,--data", gen_out, "Output directory")->required();

  // predict
  std::string data_dir, method, user_label, item_label;
  std::uint64_t unused_seed = 0;
  detail::CfFlags cf_flags;
  detail::SnrsFlags snrs_flags;
  auto* predict = app.add_subcommand("predict", "Predict one rating, training on every other cell");
  predict->add_option("--data", data_dir, "Dataset directory")->required();
  predict->add_option("--method", method, "cf or snrs")->required()->check(CLI::IsMember({"cf", "snrs"}));
  predict->add_option("--user", user_label, "User label, e.g. U51")->required();
  predict->add_option("--item", item_label, "Item label, e.g. I3")->required();
  predict->add_option("--seed", unused_seed, "Accepted for uniformity; prediction is deterministic");
  cf_flags.add(predict);
  snrs_flags.add(predict);

  // eval / compare share split flags
  std::string test_users = "51-100", test_items = "I1-I5", out_dir;
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--data", data_dir, "Dataset directory")->required();
    sub->add_option("--test-users", test_users, "Test users, e.g. 51-100 or U51-U60,U70")->capture_default_str();
    sub->add_option("--test-items", test_items, "Test items, e.g. I1-I5")->capture_default_str();
    sub->add_option("--out", out_dir, "Directory for detail.csv and summary.csv (default: the data directory)");
    sub->add_option("--seed", unused_seed, "Accepted for uniformity; evaluation is deterministic");
    cf_flags.add(sub);
    snrs_flags.add(sub);
  };
  auto* eval = app.add_subcommand("eval", "Evaluate one method on a train/test split");
  add_split(eval);
  eval->add_option("--method", method, "cf or snrs")->required()->check(CLI::IsMember({"cf", "snrs"}));
  auto* compare = app.add_subcommand("compare", "Evaluate CF and SNRS side by side on the same split");
  add_split(compare);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      Dataset d = generate_dataset(gen_cfg);
      save_dataset(d, gen_out);
      out << "users=" << d.n_users() << " items=" << d.n_items() << " categories=" << d.n_categories()
          << " edges=" << d.graph.edge_count() << " ratings=" << d.ratings.filled() << " seed=" << gen_cfg.rng_seed
          << " -> " << gen_out << '\n';
      return kExitOk;
    }

    const Dataset data = load_dataset(data_dir);
    const CfConfig cf_cfg = cf_flags.config();
    const SnrsConfig snrs_cfg = snrs_flags.config();

    if (predict->parsed()) {
      auto u = UserId::parse(user_label);
      auto i = ItemId::parse(item_label);
      if (!u || u->value >= data.n_users()) throw UsageError("unknown user label '" + user_label + "'");
      if (!i || i->value >= data.n_items()) throw UsageError("unknown item label '" + item_label + "'");

      Dataset train = data;
      train.ratings.erase(*u, *i);
      double value = 0.0;
      std::string marker;
      if (method == "cf") {
        CfModel model(train.ratings, train.graph, cf_cfg);
        try {
          auto p = model.predict(*u, *i);
          value = p.value;
          if (p.fallback) marker = "user-mean";
        } catch (const ColdStartError&) {
          auto g = train.ratings.global_mean();
          if (!g) throw Error("cold start: " + u->label() + " has no ratings and the dataset has no global mean");
          value = *g;
          marker = "global-mean";
        }
      } else {
        auto p = predict_snrs_detail(*u, *i, learn_models(train, snrs_cfg));
        value = p.value;
        if (p.fallback) marker = "uniform";
      }
      out << "method=" << (method == "cf" ? "CF" : "SNRS") << " user=" << u->label() << " item=" << i->label()
          << " predicted=" << detail::fixed(value, 6) << " rounded=" << round_rating(value).value();
      if (!marker.empty()) out << " fallback=" << marker;
      if (auto actual = data.ratings.get(*u, *i)) out << " actual=" << *actual;
      out << '\n';
      return kExitOk;
    }

    SplitSpec spec{parse_index_list<UserId>(test_users), parse_index_list<ItemId>(test_items)};
    for (auto k : spec.test_users)
      if (k >= data.n_users()) throw UsageError("test user " + UserId(k).label() + " not in dataset");
    for (auto k : spec.test_items)
      if (k >= data.n_items()) throw UsageError("test item " + ItemId(k).label() + " not in dataset");
    const std::filesystem::path dest(out_dir.empty() ? data_dir : out_dir);

    std::vector<EvaluationReport> reports;
    if (compare->parsed()) {
      auto [cf, snrs] = run_comparison(data, spec, cf_cfg, snrs_cfg);
      reports = {std::move(cf), std::move(snrs)};
    } else {
      const Split s = split(data, spec);
      reports.push_back(method == "cf" ? evaluate_cf(s.train, s.test, cf_cfg)
                                       : evaluate_snrs(s.train, s.test, snrs_cfg));
    }
    detail::write_reports(dest, reports);
    detail::print_summary(out, reports);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace socrec::cli

#endif  // SOCREC_CLI_HPP_
