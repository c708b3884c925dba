#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nterm {

constexpr std::uint64_t kDefaultWeightRange = 1000000;
constexpr double kPlusMargin = 1e-3;

// Positive nondecreasing integer-indexed sequence eta(k), k >= 1.
class Weight {
 public:
  enum class Kind { PowerLog, Table, Product };

  // eta(k) = k^a * ln(k+1)^b
  static Weight power_log(double a, double b);
  // values[0] is eta(1).
  static Weight table(std::vector<double> values, std::string source = "");
  static Weight product(const Weight& lhs, const Weight& rhs);
  // "pow:a,b" or "table:<path>"
  static Weight parse(const std::string& text);

  double operator()(std::uint64_t k) const;
  // Largest k this weight can be evaluated at (UINT64_MAX for symbolic kinds).
  std::uint64_t max_index() const;

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& values() const { return *table_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::PowerLog;
  double a_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;
  std::string source_;
  std::shared_ptr<const Weight> lhs_;
  std::shared_ptr<const Weight> rhs_;
};

double eval_weight(const Weight& w, std::uint64_t k);

// max over 1 <= k <= K of eta(k)/eta(m k); K is clipped so that m K stays
// inside a table-backed range.
double m_eta(const Weight& w, std::uint64_t m, std::uint64_t K = kDefaultWeightRange);

// M_eta(m) extrapolated to an infinite range. The finite-range maximum is
// evaluated at sqrt(K) and K and fitted as c0 + c1 / ln(m K); c0 is returned
// (clamped to [finite value, 1]). Exact for pure powers.
double m_eta_limit(const Weight& w, std::uint64_t m, std::uint64_t K = kDefaultWeightRange);

// max over 2 <= m <= M of log M_eta(m) / (-log m), using the range value.
double lower_dilation_index_range(const Weight& w, std::uint64_t M,
                                  std::uint64_t K = kDefaultWeightRange);
// Same quantity from the extrapolated M_eta.
double lower_dilation_index(const Weight& w, std::uint64_t M = 16,
                            std::uint64_t K = kDefaultWeightRange);

struct WeightClassification {
  double doubling_constant = 0.0;
  std::map<std::uint64_t, double> M_table;        // finite-range M_eta(m)
  std::map<std::uint64_t, double> M_limit_table;  // extrapolated
  double i_eta = 0.0;        // from extrapolated values
  double i_eta_range = 0.0;  // raw finite-range value
  std::optional<std::uint64_t> kappa;
  bool in_W = false;
  bool in_W_plus = false;
  std::uint64_t range = 0;
};

// Throws ParamError naming the first k with eta(k+1) < eta(k).
WeightClassification classify(const Weight& w, std::uint64_t K = kDefaultWeightRange);

struct GeometricSumResult {
  double constant = 0.0;          // max over n of the ratio
  std::vector<double> per_n;      // ratio at n = 0..n_max
};

// max over 0 <= n <= n_max of sum_{j<=n} eta(kappa^j) / eta(kappa^n).
// Throws NumericError when kappa^n_max does not fit in 64 bits.
GeometricSumResult geometric_sum_check(const Weight& w, std::uint64_t kappa, unsigned n_max);

}  // namespace nterm
