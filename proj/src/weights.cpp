#include "nterm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nterm/errors.hpp"
#include "nterm/numeric.hpp"

namespace nterm {

Weight Weight::power_log(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw ParamError("weight exponents must be finite");
  Weight w;
  w.kind_ = Kind::PowerLog;
  w.a_ = a;
  w.b_ = b;
  return w;
}

Weight Weight::table(std::vector<double> values, std::string source) {
  if (values.empty()) throw ParamError("table weight needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw ParamError("table weight value at k=" + std::to_string(i + 1) + " is not positive");
  }
  Weight w;
  w.kind_ = Kind::Table;
  w.table_ = std::make_shared<const std::vector<double>>(std::move(values));
  w.source_ = std::move(source);
  return w;
}

Weight Weight::product(const Weight& lhs, const Weight& rhs) {
  Weight w;
  w.kind_ = Kind::Product;
  w.lhs_ = std::make_shared<const Weight>(lhs);
  w.rhs_ = std::make_shared<const Weight>(rhs);
  return w;
}

namespace {

double parse_real(const std::string& tok, const std::string& whole) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw ParseError("");
    return v;
  } catch (...) {
    throw ParseError("bad number '" + tok + "' in '" + whole + "'");
  }
}

}  // namespace

Weight Weight::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("weight '" + text + "' lacks a kind prefix");
  std::string kind = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  if (kind == "pow") {
    auto comma = rest.find(',');
    if (comma == std::string::npos) return power_log(parse_real(rest, text), 0.0);
    return power_log(parse_real(rest.substr(0, comma), text),
                     parse_real(rest.substr(comma + 1), text));
  }
  if (kind == "table") {
    std::ifstream in(rest);
    if (!in) throw ParseError("cannot open weight table '" + rest + "'");
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
      auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      auto last = line.find_last_not_of(" \t\r");
      vals.push_back(parse_real(line.substr(first, last - first + 1), rest));
    }
    return table(std::move(vals), rest);
  }
  throw ParseError("unknown weight kind '" + kind + "'");
}

double Weight::operator()(std::uint64_t k) const {
  if (k == 0) throw ParamError("weights are indexed from k = 1");
  switch (kind_) {
    case Kind::PowerLog: {
      double kd = static_cast<double>(k);
      double v = 1.0;
      if (a_ != 0.0) v *= std::pow(kd, a_);
      if (b_ != 0.0) v *= std::pow(std::log1p(kd), b_);
      return v;
    }
    case Kind::Table:
      if (k > table_->size())
        throw NumericError("table weight queried at k=" + std::to_string(k) + " beyond length " +
                           std::to_string(table_->size()));
      return (*table_)[k - 1];
    case Kind::Product:
      return (*lhs_)(k) * (*rhs_)(k);
  }
  return 0.0;
}

std::uint64_t Weight::max_index() const {
  switch (kind_) {
    case Kind::PowerLog: return std::numeric_limits<std::uint64_t>::max();
    case Kind::Table: return table_->size();
    case Kind::Product: return std::min(lhs_->max_index(), rhs_->max_index());
  }
  return 0;
}

std::string Weight::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::PowerLog: os << "pow:" << fmt_double(a_) << "," << fmt_double(b_); break;
    case Kind::Table: os << "table:" << source_; break;
    case Kind::Product: os << "(" << lhs_->describe() << ")*(" << rhs_->describe() << ")"; break;
  }
  return os.str();
}

double eval_weight(const Weight& w, std::uint64_t k) { return w(k); }

namespace {

struct RangeMax {
  double at_checkpoint = 0.0;
  double at_end = 0.0;
  std::uint64_t checkpoint = 0;
  std::uint64_t end = 0;
};

std::uint64_t effective_range(const Weight& w, std::uint64_t m, std::uint64_t K) {
  std::uint64_t cap = w.max_index() / m;
  std::uint64_t r = std::min(K, cap);
  if (r == 0) throw NumericError("weight range too short for dilation by " + std::to_string(m));
  return r;
}

// Running max of eta(k)/eta(mk) with a recorded value at sqrt(range).
RangeMax scan_dilation(const Weight& w, std::uint64_t m, std::uint64_t K) {
  RangeMax r;
  r.end = effective_range(w, m, K);
  r.checkpoint = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::sqrt(static_cast<double>(r.end))));
  if (w.kind() == Weight::Kind::PowerLog && w.b() == 0.0) {
    double v = std::pow(static_cast<double>(m), -w.a());
    r.at_checkpoint = r.at_end = v;
    return r;
  }
  double best = 0.0;
  for (std::uint64_t k = 1; k <= r.end; ++k) {
    best = std::max(best, w(k) / w(m * k));
    if (k == r.checkpoint) r.at_checkpoint = best;
  }
  r.at_end = best;
  return r;
}

double extrapolate(const RangeMax& r, std::uint64_t m) {
  if (r.checkpoint >= r.end) return r.at_end;
  double u1 = 1.0 / std::log(static_cast<double>(m) * static_cast<double>(r.checkpoint) + 1.0);
  double u2 = 1.0 / std::log(static_cast<double>(m) * static_cast<double>(r.end) + 1.0);
  double c0 = r.at_end + (r.at_end - r.at_checkpoint) * u2 / (u1 - u2);
  return std::clamp(c0, r.at_end, 1.0);
}

}  // namespace

double m_eta(const Weight& w, std::uint64_t m, std::uint64_t K) {
  if (m < 2) throw ParamError("m_eta needs m >= 2");
  if (K < 1) throw ParamError("m_eta needs K >= 1");
  return scan_dilation(w, m, K).at_end;
}

double m_eta_limit(const Weight& w, std::uint64_t m, std::uint64_t K) {
  if (m < 2) throw ParamError("m_eta needs m >= 2");
  return extrapolate(scan_dilation(w, m, K), m);
}

double lower_dilation_index_range(const Weight& w, std::uint64_t M, std::uint64_t K) {
  if (M < 2) throw ParamError("dilation index needs M >= 2");
  double best = 0.0;
  for (std::uint64_t m = 2; m <= M; ++m) {
    double v = m_eta(w, m, K);
    best = std::max(best, std::log(v) / -std::log(static_cast<double>(m)));
  }
  return best;
}

double lower_dilation_index(const Weight& w, std::uint64_t M, std::uint64_t K) {
  if (M < 2) throw ParamError("dilation index needs M >= 2");
  double best = 0.0;
  for (std::uint64_t m = 2; m <= M; ++m) {
    double v = m_eta_limit(w, m, K);
    best = std::max(best, std::log(v) / -std::log(static_cast<double>(m)));
  }
  return best;
}

WeightClassification classify(const Weight& w, std::uint64_t K) {
  if (K < 2) throw ParamError("classify needs K >= 2");
  WeightClassification c;
  c.range = std::min(K, w.max_index());

  std::uint64_t mono_end = std::min<std::uint64_t>(w.max_index(), K > UINT64_MAX / 16 ? UINT64_MAX : 16 * K);
  double prev = w(1);
  for (std::uint64_t k = 2; k <= mono_end; ++k) {
    double cur = w(k);
    if (cur < prev) {
      throw ParamError("weight " + w.describe() + " decreases at k=" + std::to_string(k - 1) + " -> " +
                       std::to_string(k));
    }
    prev = cur;
  }

  std::uint64_t dbl_end = effective_range(w, 2, K);
  double dbl = 0.0;
  for (std::uint64_t k = 1; k <= dbl_end; ++k) dbl = std::max(dbl, w(2 * k) / w(k));
  c.doubling_constant = dbl;

  for (std::uint64_t m = 2; m <= 16; ++m) {
    RangeMax r = scan_dilation(w, m, K);
    double lim = extrapolate(r, m);
    if (m == 2 || m == 3 || m == 4 || m == 8 || m == 16) {
      c.M_table[m] = r.at_end;
      c.M_limit_table[m] = lim;
    }
    c.i_eta_range = std::max(c.i_eta_range, std::log(r.at_end) / -std::log(static_cast<double>(m)));
    c.i_eta = std::max(c.i_eta, std::log(lim) / -std::log(static_cast<double>(m)));
    if (!c.kappa && r.at_end < 1.0 - kPlusMargin && lim < 1.0 - kPlusMargin) c.kappa = m;
  }
  c.in_W = w(c.range) > w(1) && std::isfinite(dbl);
  c.in_W_plus = c.in_W && c.kappa.has_value();
  return c;
}

GeometricSumResult geometric_sum_check(const Weight& w, std::uint64_t kappa, unsigned n_max) {
  if (kappa < 2) throw ParamError("geometric_sum_check needs kappa >= 2");
  GeometricSumResult res;
  std::uint64_t pw = 1;
  CompensatedSum<double> acc;
  for (unsigned n = 0; n <= n_max; ++n) {
    if (n > 0) {
      if (pw > std::numeric_limits<std::uint64_t>::max() / kappa)
        throw NumericError("kappa^" + std::to_string(n) + " overflows 64-bit range");
      pw *= kappa;
    }
    if (pw > w.max_index())
      throw NumericError("kappa^" + std::to_string(n) + " exceeds weight range");
    double eta = w(pw);
    acc.add(eta);
    double ratio = acc.value() / eta;
    res.per_n.push_back(ratio);
    res.constant = std::max(res.constant, ratio);
  }
  return res;
}

}  // namespace nterm
