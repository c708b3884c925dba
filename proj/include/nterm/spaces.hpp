#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nterm/sequence.hpp"

namespace nterm {

using real = long double;

// Young function family for the Orlicz evaluator.
//   pow<p>        u^p
//   ulog          u log(1+u)
//   plog<p>       u^p log(e+u)
//   maxpow<p>,<q> max(u^p, u^q)
class OrliczPhi {
 public:
  enum class Kind { Pow, ULog, PLog, MaxPow };
  static OrliczPhi parse(const std::string& name);
  static OrliczPhi power(double p);

  real operator()(real u) const;
  // Inverse by closed form for powers, bisection otherwise.
  real inverse(real y) const;
  // Fundamental function 1 / Phi^{-1}(1/t).
  real fundamental(real t) const;
  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::Pow;
  double p_ = 2.0;
  double q_ = 2.0;
  std::string name_ = "pow2";
};

enum class SpaceTag { Lp, LpLq, Fpr, LorentzFn, Orlicz, Hyp, Bmo };

struct SpaceSpec {
  SpaceTag tag = SpaceTag::Lp;
  double p = 2.0;
  double q = 2.0;
  double r = 2.0;
  double s = 0.0;
  std::size_t d = 1;     // 0 means "taken from the sequence" (lpq, orlicz)
  OrliczPhi phi;
  double rho = 1.0;

  static SpaceSpec parse(const std::string& text);
  static SpaceSpec lp(double p);
  static SpaceSpec lplq(double p, double q);
  static SpaceSpec fpr(double s, double p, double r, std::size_t d);
  static SpaceSpec lpq(double p, double q, std::size_t d = 0);
  static SpaceSpec orlicz(const std::string& name, std::size_t d = 0);
  static SpaceSpec hyp(double p, std::size_t d);
  static SpaceSpec bmo(double r);

  std::string to_string() const;
  Universe universe() const;
  // Dimension used for universe construction (1 when unspecified).
  std::size_t geometry_dim() const { return d == 0 ? 1 : d; }
  // Greedy selection is optimal (sigma_N = gamma_N) for this space.
  bool greedy_optimal() const { return tag == SpaceTag::Lp; }
};

struct Atom {
  real measure = 0;
  real value = 0;
};

// Nonnegative step function on disjoint atoms. Atom regions are not kept;
// only measures and values enter the norms.
struct PiecewiseConstant {
  std::vector<Atom> atoms;
  real total_measure() const;
};

// g = (sum_Q (|Q|^{-smooth/d - 1/2} |s_Q|)^r chi_Q)^{1/r} over cubes (tree
// refinement) or rectangles (endpoint grid).
PiecewiseConstant square_function(const CoefficientSequence& s, double r, double smooth = 0.0);

real lp_step_norm(const PiecewiseConstant& f, double p);
real lorentz_step_norm(const PiecewiseConstant& f, double p, double q);
real orlicz_luxemburg_norm(const PiecewiseConstant& f, const OrliczPhi& phi);

// sup over dyadic I of ((1/|I|) sum_{J subset I} |s_J|^r |J|)^{1/r}.
double bmo_norm(const CoefficientSequence& s, double r);

// Throws TypeError when the sequence universe does not match the space.
double space_norm(const SpaceSpec& spec, const CoefficientSequence& s);

// ||e_idx|| in the space.
double basis_norm(const SpaceSpec& spec, const BasisIndex& idx);

// Sum over indices of e_idx / ||e_idx||, times value.
CoefficientSequence normalized_indicator(const SpaceSpec& spec, const std::vector<BasisIndex>& indices,
                                         double value = 1.0);

// Rescales every coefficient by 1/||e_idx||.
CoefficientSequence normalize_coefficients(const SpaceSpec& spec, const CoefficientSequence& s);

}  // namespace nterm
