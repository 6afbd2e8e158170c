#ifndef SOCREC_IO_HPP_
#define SOCREC_IO_HPP_

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "socrec/core.hpp"

namespace socrec {

inline constexpr std::string_view kRelationshipsFile = "relationships.csv";
inline constexpr std::string_view kRatingsFile = "ratings.csv";
inline constexpr std::string_view kCategoriesFile = "categories.csv";
inline constexpr std::string_view kMetaFile = "meta.cfg";

inline constexpr std::string_view kRelationshipsHeader = "user_a,user_b,strength";
inline constexpr std::string_view kRatingsHeader = "user,item,rating";
inline constexpr std::string_view kCategoriesHeader = "item,category";

/// Raised by load_dataset/save_dataset. `line` is 0 when the problem is not
/// tied to a particular row.
class DatasetError : public Error {
 public:
  DatasetError(std::string file, std::size_t line, const std::string& reason)
      : Error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + reason),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

// Reads a CSV file, checks the header and the column count, drops blank lines.
inline std::vector<CsvRow> read_csv(const std::filesystem::path& path, std::string_view header) {
  const std::string name = path.filename().string();
  std::ifstream in(path);
  if (!in) throw DatasetError(name, 0, "cannot open " + path.string());

  std::vector<CsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t columns = split_commas(header).size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != header) throw DatasetError(name, 1, "expected header '" + std::string(header) + "'");
      continue;
    }
    if (line.empty()) continue;
    auto parts = split_commas(line);
    if (parts.size() != columns)
      throw DatasetError(name, line_no, "expected " + std::to_string(columns) + " fields, got " +
                                            std::to_string(parts.size()));
    rows.push_back({line_no, {parts.begin(), parts.end()}});
  }
  if (line_no == 0) throw DatasetError(name, 0, "empty file (missing header)");
  return rows;
}

template <class IdT>
IdT parse_label(const std::string& file, std::size_t line, const std::string& text) {
  auto id = IdT::parse(text);
  if (!id) throw DatasetError(file, line, "malformed label '" + text + "'");
  return *id;
}

inline int parse_level(const std::string& file, std::size_t line, const std::string& text,
                       std::string_view what) {
  auto v = parse_int(text);
  if (!v) throw DatasetError(file, line, "malformed " + std::string(what) + " '" + text + "'");
  if (!in_level_range(*v))
    throw DatasetError(file, line, std::string(what) + " " + text + " outside 0..5");
  return *v;
}

struct MetaFile {
  std::optional<std::size_t> n_users, n_items, n_categories;
  DatasetMeta meta;
};

inline MetaFile read_meta(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  std::ifstream in(path);
  if (!in) throw DatasetError(name, 0, "cannot open " + path.string());
  MetaFile out;
  std::string line;
  std::size_t line_no = 0;
  auto count = [&](const std::string& v) -> std::size_t {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
      throw DatasetError(name, line_no, "malformed count '" + v + "'");
    return n;
  };
  auto real = [&](const std::string& v) -> double {
    double x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
      throw DatasetError(name, line_no, "malformed number '" + v + "'");
    return x;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DatasetError(name, line_no, "expected key=value");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "n_users") out.n_users = count(value);
    else if (key == "n_items") out.n_items = count(value);
    else if (key == "n_categories") out.n_categories = count(value);
    else if (key == "seed") {
      std::uint64_t s = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
      if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size())
        throw DatasetError(name, line_no, "malformed seed '" + value + "'");
      out.meta.seed = s;
    } else if (key == "edge_density") out.meta.edge_density = real(value);
    else if (key == "seed_rating_fraction") out.meta.seed_rating_fraction = real(value);
    else if (key == "fill_passes") out.meta.fill_passes = count(value);
    else throw DatasetError(name, line_no, "unknown key '" + key + "'");
  }
  return out;
}

}  // namespace detail

/// Reads relationships.csv, ratings.csv and categories.csv from `dir`.
///
/// Table dimensions come from the optional meta.cfg written by save_dataset;
/// without it they are inferred from the largest label present. Rows may
/// appear in any order and pairs in either orientation. Duplicate rows that
/// disagree are rejected.
inline Dataset load_dataset(const std::filesystem::path& dir) {
  using detail::parse_label;
  using detail::parse_level;

  for (auto f : {kRelationshipsFile, kRatingsFile, kCategoriesFile})
    if (!std::filesystem::is_regular_file(dir / f))
      throw DatasetError(std::string(f), 0, "missing file in " + dir.string());

  const std::string rel_name(kRelationshipsFile), rat_name(kRatingsFile), cat_name(kCategoriesFile);
  auto rel_rows = detail::read_csv(dir / kRelationshipsFile, kRelationshipsHeader);
  auto rat_rows = detail::read_csv(dir / kRatingsFile, kRatingsHeader);
  auto cat_rows = detail::read_csv(dir / kCategoriesFile, kCategoriesHeader);

  struct Edge { UserId a, b; int s; std::size_t line; };
  struct Rating { UserId u; ItemId i; int r; std::size_t line; };
  struct Member { ItemId i; CategoryId c; };
  std::vector<Edge> edges;
  std::vector<Rating> ratings;
  std::vector<Member> members;
  std::size_t max_user = 0, max_item = 0, max_cat = 0;

  for (const auto& row : rel_rows) {
    auto a = parse_label<UserId>(rel_name, row.line, row.fields[0]);
    auto b = parse_label<UserId>(rel_name, row.line, row.fields[1]);
    int s = parse_level(rel_name, row.line, row.fields[2], "strength");
    if (a == b) throw DatasetError(rel_name, row.line, "self relationship on " + a.label());
    if (b < a) std::swap(a, b);
    edges.push_back({a, b, s, row.line});
    max_user = std::max(max_user, b.value + 1);
  }
  for (const auto& row : rat_rows) {
    auto u = parse_label<UserId>(rat_name, row.line, row.fields[0]);
    auto i = parse_label<ItemId>(rat_name, row.line, row.fields[1]);
    int r = parse_level(rat_name, row.line, row.fields[2], "rating");
    ratings.push_back({u, i, r, row.line});
    max_user = std::max(max_user, u.value + 1);
    max_item = std::max(max_item, i.value + 1);
  }
  for (const auto& row : cat_rows) {
    auto i = parse_label<ItemId>(cat_name, row.line, row.fields[0]);
    auto c = parse_label<CategoryId>(cat_name, row.line, row.fields[1]);
    members.push_back({i, c});
    max_item = std::max(max_item, i.value + 1);
    max_cat = std::max(max_cat, c.value + 1);
  }

  DatasetMeta meta;
  std::size_t n_users = max_user, n_items = max_item, n_cats = max_cat;
  if (std::filesystem::is_regular_file(dir / kMetaFile)) {
    auto m = detail::read_meta(dir / kMetaFile);
    const std::string meta_name(kMetaFile);
    auto take = [&](std::optional<std::size_t> declared, std::size_t& n, const char* what) {
      if (!declared) return;
      if (*declared < n)
        throw DatasetError(meta_name, 0, std::string(what) + "=" + std::to_string(*declared) +
                                             " is smaller than the data requires (" + std::to_string(n) + ")");
      n = *declared;
    };
    take(m.n_users, n_users, "n_users");
    take(m.n_items, n_items, "n_items");
    take(m.n_categories, n_cats, "n_categories");
    meta = m.meta;
  }

  Dataset d = make_dataset(n_users, n_items, n_cats);
  d.meta = meta;
  for (const auto& e : edges) {
    if (auto prev = d.graph.strength(e.a, e.b); prev && *prev != e.s)
      throw DatasetError(rel_name, e.line, "conflicting strengths for pair " + e.a.label() + "," + e.b.label() +
                                               " (" + std::to_string(*prev) + " vs " + std::to_string(e.s) + ")");
    d.graph.set_edge(e.a, e.b, e.s);
  }
  for (const auto& r : ratings) {
    if (auto prev = d.ratings.get(r.u, r.i); prev && *prev != r.r)
      throw DatasetError(rat_name, r.line, "conflicting ratings for cell " + r.u.label() + "," + r.i.label());
    d.ratings.set(r.u, r.i, r.r);
  }
  for (const auto& m : members) d.categories.set(m.i, m.c, 1);

  if (auto v = validate_dataset(d); !v.empty()) {
    std::string msg = "dataset failed validation:";
    for (const auto& x : v) msg += " " + x.message + ";";
    throw DatasetError(dir.string(), 0, msg);
  }
  return d;
}

/// Writes the three CSV tables plus meta.cfg. Rows are sorted by index, so
/// equal datasets produce byte-identical files.
inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
  if (auto v = validate_dataset(d); !v.empty())
    throw DatasetError(dir.string(), 0, "refusing to save invalid dataset: " + v.front().message);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DatasetError(dir.string(), 0, "cannot create directory: " + ec.message());

  auto write = [&](std::string_view file, const std::string& body) {
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    if (!out) throw DatasetError(std::string(file), 0, "cannot open for writing in " + dir.string());
    out << body;
    if (!out) throw DatasetError(std::string(file), 0, "write failed");
  };

  std::ostringstream rel, rat, cat, meta;
  rel << kRelationshipsHeader << '\n';
  for (std::size_t a = 0; a < d.graph.n_users(); ++a)
    for (const auto& [b, s] : d.graph.neighbors(UserId(a)))
      if (a < b) rel << UserId(a).label() << ',' << UserId(b).label() << ',' << s << '\n';

  rat << kRatingsHeader << '\n';
  for (std::size_t u = 0; u < d.ratings.n_users(); ++u)
    for (std::size_t i = 0; i < d.ratings.n_items(); ++i)
      if (auto r = d.ratings.get(UserId(u), ItemId(i)))
        rat << UserId(u).label() << ',' << ItemId(i).label() << ',' << *r << '\n';

  cat << kCategoriesHeader << '\n';
  for (std::size_t i = 0; i < d.categories.n_items(); ++i)
    for (std::size_t c = 0; c < d.categories.n_categories(); ++c)
      if (d.categories.get(ItemId(i), CategoryId(c)) == 1)
        cat << ItemId(i).label() << ',' << CategoryId(c).label() << '\n';

  meta << "n_users=" << d.n_users() << '\n'
       << "n_items=" << d.n_items() << '\n'
       << "n_categories=" << d.n_categories() << '\n';
  if (d.meta.seed) meta << "seed=" << *d.meta.seed << '\n';
  if (d.meta.edge_density) meta << "edge_density=" << detail::format_double(*d.meta.edge_density) << '\n';
  if (d.meta.seed_rating_fraction)
    meta << "seed_rating_fraction=" << detail::format_double(*d.meta.seed_rating_fraction) << '\n';
  if (d.meta.fill_passes) meta << "fill_passes=" << *d.meta.fill_passes << '\n';

  write(kRelationshipsFile, rel.str());
  write(kRatingsFile, rat.str());
  write(kCategoriesFile, cat.str());
  write(kMetaFile, meta.str());
}

}  // namespace socrec

#endif  // SOCREC_IO_HPP_
