#include "nterm/sequence.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nterm/errors.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

std::string universe_name(Universe u) {
  switch (u) {
    case Universe::Integer: return "integer";
    case Universe::Cube: return "cube";
    case Universe::Rectangle: return "rectangle";
    case Universe::Pair: return "pair";
  }
  return "?";
}

BasisIndex BasisIndex::integer(std::int64_t k) {
  BasisIndex b;
  b.key_[0] = k;
  b.len_ = 1;
  return b;
}

BasisIndex BasisIndex::cube(std::int64_t level, const std::vector<std::int64_t>& offset) {
  if (offset.empty() || offset.size() + 1 > kMaxKey) throw ParamError("cube dimension out of range");
  BasisIndex b;
  b.key_[0] = level;
  for (std::size_t i = 0; i < offset.size(); ++i) b.key_[i + 1] = offset[i];
  b.len_ = static_cast<std::uint8_t>(offset.size() + 1);
  return b;
}

BasisIndex BasisIndex::cube1(std::int64_t level, std::int64_t offset) {
  BasisIndex b;
  b.key_[0] = level;
  b.key_[1] = offset;
  b.len_ = 2;
  return b;
}

BasisIndex BasisIndex::rect(const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals) {
  if (intervals.empty() || 2 * intervals.size() > kMaxKey) throw ParamError("rectangle dimension out of range");
  BasisIndex b;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    b.key_[2 * i] = intervals[i].first;
    b.key_[2 * i + 1] = intervals[i].second;
  }
  b.len_ = static_cast<std::uint8_t>(2 * intervals.size());
  return b;
}

BasisIndex BasisIndex::pair(std::int64_t component, std::int64_t index) {
  BasisIndex b;
  b.key_[0] = component;
  b.key_[1] = index;
  b.len_ = 2;
  return b;
}

std::strong_ordering BasisIndex::operator<=>(const BasisIndex& o) const {
  std::size_t n = std::min(len_, o.len_);
  for (std::size_t i = 0; i < n; ++i) {
    if (key_[i] != o.key_[i]) return key_[i] <=> o.key_[i];
  }
  return len_ <=> o.len_;
}

bool BasisIndex::operator==(const BasisIndex& o) const {
  if (len_ != o.len_) return false;
  for (std::size_t i = 0; i < len_; ++i)
    if (key_[i] != o.key_[i]) return false;
  return true;
}

std::size_t BasisIndexHash::operator()(const BasisIndex& b) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < b.size(); ++i) {
    h ^= static_cast<std::uint64_t>(b[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string BasisIndex::to_string(Universe u) const {
  std::ostringstream os;
  switch (u) {
    case Universe::Integer: os << key_[0]; break;
    case Universe::Cube:
      os << key_[0] << ':';
      for (std::size_t i = 1; i < len_; ++i) os << (i > 1 ? "," : "") << key_[i];
      break;
    case Universe::Rectangle:
      for (std::size_t i = 0; i < len_; i += 2) os << (i > 0 ? "|" : "") << key_[i] << ':' << key_[i + 1];
      break;
    case Universe::Pair: os << key_[0] << '/' << key_[1]; break;
  }
  return os.str();
}

namespace {

std::int64_t parse_int(const std::string& tok, const std::string& whole) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw 0;
    return v;
  } catch (...) {
    throw ParseError("bad integer '" + tok + "' in index '" + whole + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t\r\"");
  return s.substr(a, b - a + 1);
}

}  // namespace

BasisIndex BasisIndex::parse(const std::string& raw, Universe u) {
  std::string text = trim(raw);
  switch (u) {
    case Universe::Integer: return integer(parse_int(text, text));
    case Universe::Cube: {
      auto colon = text.find(':');
      if (colon == std::string::npos) throw ParseError("cube index '" + text + "' must look like j:k1,...,kd");
      std::vector<std::int64_t> off;
      for (auto& t : split(text.substr(colon + 1), ',')) off.push_back(parse_int(trim(t), text));
      return cube(parse_int(text.substr(0, colon), text), off);
    }
    case Universe::Rectangle: {
      std::vector<std::pair<std::int64_t, std::int64_t>> iv;
      for (auto& part : split(text, '|')) {
        auto colon = part.find(':');
        if (colon == std::string::npos) throw ParseError("rectangle index '" + text + "' must look like j1:k1|j2:k2");
        iv.emplace_back(parse_int(trim(part.substr(0, colon)), text), parse_int(trim(part.substr(colon + 1)), text));
      }
      return rect(iv);
    }
    case Universe::Pair: {
      auto slash = text.find('/');
      if (slash == std::string::npos) throw ParseError("pair index '" + text + "' must look like c/i");
      return pair(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
    }
  }
  throw ParseError("unknown universe");
}

namespace {

void check_fits(const BasisIndex& b, Universe u, std::size_t dim) {
  bool ok = true;
  switch (u) {
    case Universe::Integer: ok = b.size() == 1; break;
    case Universe::Cube: ok = b.size() == dim + 1; break;
    case Universe::Rectangle: ok = b.size() == 2 * dim; break;
    case Universe::Pair: ok = b.size() == 2 && (b[0] == 0 || b[0] == 1); break;
  }
  if (!ok) throw ParamError("index " + b.to_string(u) + " does not fit universe " + universe_name(u));
}

}  // namespace

CoefficientSequence::CoefficientSequence(Universe u, std::size_t dim, std::vector<Entry> entries)
    : universe_(u), dim_(dim), entries_(std::move(entries)) {
  for (const auto& e : entries_) check_fits(e.index, u, dim);
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].index == entries_[i - 1].index)
      throw ParamError("duplicate index " + entries_[i].index.to_string(u));
  }
}

CoefficientSequence CoefficientSequence::from_sorted(Universe u, std::size_t dim, std::vector<Entry> entries) {
  CoefficientSequence out(u, dim);
  out.entries_ = std::move(entries);
  return out;
}

CoefficientSequence CoefficientSequence::from_values(const std::vector<double>& values) {
  std::vector<Entry> e;
  e.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) e.push_back({BasisIndex::integer(static_cast<std::int64_t>(i + 1)), values[i]});
  return CoefficientSequence(Universe::Integer, 1, std::move(e));
}

CoefficientSequence CoefficientSequence::indicator(Universe u, std::size_t dim,
                                                   const std::vector<BasisIndex>& indices, double value) {
  std::vector<Entry> e;
  e.reserve(indices.size());
  for (const auto& i : indices) e.push_back({i, value});
  return CoefficientSequence(u, dim, std::move(e));
}

CoefficientSequence CoefficientSequence::stripped() const {
  CoefficientSequence out(universe_, dim_);
  for (const auto& e : entries_)
    if (e.coef != 0.0) out.entries_.push_back(e);
  return out;
}

CoefficientSequence CoefficientSequence::subset(const std::vector<std::size_t>& positions) const {
  CoefficientSequence out(universe_, dim_);
  out.entries_.reserve(positions.size());
  std::vector<std::size_t> sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  for (auto p : sorted) out.entries_.push_back(entries_.at(p));
  return out;
}

CoefficientSequence CoefficientSequence::complement(const std::vector<char>& keep) const {
  CoefficientSequence out(universe_, dim_);
  out.entries_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!keep[i]) out.entries_.push_back(entries_[i]);
  return out;
}

CoefficientSequence CoefficientSequence::scaled(double lambda) const {
  CoefficientSequence out = *this;
  for (auto& e : out.entries_) e.coef *= lambda;
  return out;
}

double CoefficientSequence::coef_at(const BasisIndex& idx) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), idx,
                             [](const Entry& e, const BasisIndex& b) { return e.index < b; });
  if (it != entries_.end() && it->index == idx) return it->coef;
  return 0.0;
}

CoefficientSequence CoefficientSequence::parse_csv(const std::string& text, Universe u, std::size_t dim) {
  std::istringstream in(text);
  std::string line;
  std::vector<Entry> entries;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    // Coefficient is after the last comma; cube indices contain commas themselves.
    auto comma = t.rfind(',');
    if (comma == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected index,coefficient");
    std::string idx = trim(t.substr(0, comma));
    std::string val = trim(t.substr(comma + 1));
    if (lineno == 1 && (idx == "index" || val == "coefficient")) continue;
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(val, &used);
      if (used != val.size()) throw 0;
    } catch (...) {
      throw ParseError("line " + std::to_string(lineno) + ": bad coefficient '" + val + "'");
    }
    entries.push_back({BasisIndex::parse(idx, u), c});
  }
  try {
    return CoefficientSequence(u, dim, std::move(entries));
  } catch (const ParamError& e) {
    throw ParseError(e.what());
  }
}

CoefficientSequence CoefficientSequence::load_csv(const std::string& path, Universe u, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sequence file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), u, dim);
}

std::string CoefficientSequence::to_csv() const {
  std::ostringstream os;
  os << "index,coefficient\n";
  for (const auto& e : entries_) {
    std::string idx = e.index.to_string(universe_);
    if (idx.find(',') != std::string::npos) idx = "\"" + idx + "\"";
    os << idx << ',' << fmt_double(e.coef) << '\n';
  }
  return os.str();
}

CoefficientSequence add(const CoefficientSequence& x, const CoefficientSequence& y) {
  if (x.universe() != y.universe() || x.dim() != y.dim()) throw TypeError("cannot add sequences over different universes");
  std::vector<Entry> out;
  const auto& a = x.entries();
  const auto& b = y.entries();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].index < b[j].index)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].index < a[i].index) {
      out.push_back(b[j++]);
    } else {
      out.push_back({a[i].index, a[i].coef + b[j].coef});
      ++i;
      ++j;
    }
  }
  return CoefficientSequence(x.universe(), x.dim(), std::move(out));
}

}  // namespace nterm
