#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nterm {

enum class Universe { Integer, Cube, Rectangle, Pair };

std::string universe_name(Universe u);

// One basis index. The key layout per universe:
//   Integer    {k}
//   Cube       {j, k1, ..., kd}      cube 2^-j([0,1)^d + k)
//   Rectangle  {j1, k1, ..., jd, kd} product of 1-d dyadic intervals
//   Pair       {component, index}
// Lexicographic order on the key is the canonical tie-break order.
class BasisIndex {
 public:
  static constexpr std::size_t kMaxKey = 9;

  BasisIndex() = default;
  static BasisIndex integer(std::int64_t k);
  static BasisIndex cube(std::int64_t level, const std::vector<std::int64_t>& offset);
  static BasisIndex cube1(std::int64_t level, std::int64_t offset);
  static BasisIndex rect(const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals);
  static BasisIndex pair(std::int64_t component, std::int64_t index);

  std::size_t size() const { return len_; }
  std::int64_t operator[](std::size_t i) const { return key_[i]; }

  // Cube accessors.
  std::int64_t level() const { return key_[0]; }
  std::int64_t offset(std::size_t axis) const { return key_[1 + axis]; }
  std::size_t cube_dim() const { return len_ - 1; }
  // Rectangle accessors.
  std::size_t rect_dim() const { return len_ / 2; }
  std::int64_t rect_level(std::size_t axis) const { return key_[2 * axis]; }
  std::int64_t rect_offset(std::size_t axis) const { return key_[2 * axis + 1]; }

  std::strong_ordering operator<=>(const BasisIndex& o) const;
  bool operator==(const BasisIndex& o) const;

  std::string to_string(Universe u) const;
  static BasisIndex parse(const std::string& text, Universe u);

 private:
  std::array<std::int64_t, kMaxKey> key_{};
  std::uint8_t len_ = 0;
};

struct BasisIndexHash {
  std::size_t operator()(const BasisIndex& b) const;
};

struct Entry {
  BasisIndex index;
  double coef = 0.0;
};

// Finitely supported coefficient map, stored sorted by canonical index order.
class CoefficientSequence {
 public:
  CoefficientSequence() = default;
  CoefficientSequence(Universe u, std::size_t dim) : universe_(u), dim_(dim) {}
  // Sorts; throws ParamError on duplicates or a key that does not fit the universe.
  CoefficientSequence(Universe u, std::size_t dim, std::vector<Entry> entries);

  // Entries must already be in canonical order with distinct indices.
  static CoefficientSequence from_sorted(Universe u, std::size_t dim, std::vector<Entry> entries);
  static CoefficientSequence from_values(const std::vector<double>& values);  // indices 1..n
  static CoefficientSequence indicator(Universe u, std::size_t dim,
                                       const std::vector<BasisIndex>& indices, double value = 1.0);

  Universe universe() const { return universe_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Drops stored zeros.
  CoefficientSequence stripped() const;
  // Keeps the entries at the given positions (positions refer to entries()).
  CoefficientSequence subset(const std::vector<std::size_t>& positions) const;
  // Entries at positions not flagged in keep.
  CoefficientSequence complement(const std::vector<char>& keep) const;
  CoefficientSequence scaled(double lambda) const;
  double coef_at(const BasisIndex& idx) const;  // 0 if absent

  static CoefficientSequence load_csv(const std::string& path, Universe u, std::size_t dim);
  static CoefficientSequence parse_csv(const std::string& text, Universe u, std::size_t dim);
  std::string to_csv() const;

 private:
  Universe universe_ = Universe::Integer;
  std::size_t dim_ = 1;
  std::vector<Entry> entries_;
};

// x + y with union support.
CoefficientSequence add(const CoefficientSequence& x, const CoefficientSequence& y);

}  // namespace nterm
