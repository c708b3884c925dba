#include "nterm/numeric.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <thread>

namespace nterm {

double binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

namespace {

// Advance idx to the next k-subset of {0..n-1} keeping positions < fixed
// untouched. Returns false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n, std::size_t fixed) {
  std::size_t k = idx.size();
  std::size_t i = k;
  while (i > fixed) {
    --i;
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::atomic<unsigned> g_threads{1};

}  // namespace

void for_each_combination(std::size_t n, std::size_t k,
                          const std::function<bool(std::span<const std::size_t>)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  do {
    if (!fn(idx)) return;
  } while (next_combination(idx, n, 0));
}

void for_each_combination_from(std::size_t n, std::size_t k, std::size_t first,
                               const std::function<bool(std::span<const std::size_t>)>& fn) {
  if (k == 0) {
    if (first == 0) fn({});
    return;
  }
  if (first + k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = first + i;
  do {
    if (!fn(idx)) return;
  } while (next_combination(idx, n, 1));
}

void set_thread_count(unsigned n) { g_threads = n == 0 ? 1 : n; }
unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned t = thread_count();
  if (t <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(t, n));
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace nterm
