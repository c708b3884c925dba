#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nterm {

// Neumaier compensated accumulator.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_ = 0;
  T comp_ = 0;
};

// C(n, k) as a double (exact below 2^53).
double binomial(std::uint64_t n, std::uint64_t k);

// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
// fn returns false to stop early.
void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& fn);

// The k-subsets whose smallest element is `first`, in lexicographic order.
// Lets callers split an enumeration across workers by first element.
void for_each_combination_from(std::size_t n, std::size_t k, std::size_t first,
                               const std::function<bool(std::span<const std::size_t>)>& fn);

// Worker count used by enumeration-heavy routines (default 1).
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n) over thread_count() workers. Each index runs
// exactly once; callers write into per-index slots and reduce afterwards.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

// Shortest round-trip decimal form of a double.
std::string fmt_double(double v);

}  // namespace nterm
