#pragma once
// Exact angular-momentum algebra: Wigner 3j/6j symbols, Clebsch-Gordan
// coefficients, relative dipole weights and excited->ground branching ratios
// for alkali D-lines.
//
// All quantum numbers are carried as doubled integers (AngMom stores 2j) so
// half-integer momenta are exact.  The Racah sums are evaluated with exact
// rational arithmetic (boost::multiprecision) and converted to double at the
// very end, so rounding never enters intermediate terms.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace eit::angular {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Angular momentum stored as 2j (so j = twice/2 may be half-integer).
struct AngMom {
  int twice = 0;
  constexpr AngMom() = default;
  constexpr explicit AngMom(int twice_j) : twice(twice_j) {}
  // Convenience for integer j.
  static constexpr AngMom integer(int j) { return AngMom(2 * j); }
  static constexpr AngMom half(int twice_j) { return AngMom(twice_j); }
};

struct BranchingRatio {
  double value = 0.0;  // probability in [0, 1]
};

namespace detail {

inline cpp_int factorial(int n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  cpp_int r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// factorial of a doubled-even value x (= (x/2)!)
inline cpp_int fact2(int x) {
  if (x % 2 != 0) throw std::domain_error("half-integer factorial argument");
  return factorial(x / 2);
}

inline bool triangle_ok(int a, int b, int c) {
  return std::abs(a - b) <= c && c <= a + b && (a + b + c) % 2 == 0;
}

inline void check_valid(int twice_j, int twice_m) {
  if (twice_j < 0) throw std::domain_error("negative angular momentum");
  if ((twice_j + twice_m) % 2 != 0)
    throw std::domain_error("m parity inconsistent with j");
}

// Convert sign * sqrt(|r|) with exact rational r >= 0.
inline double signed_sqrt(int sign, const cpp_rational& r) {
  if (r == 0) return 0.0;
  long double v = sqrtl(static_cast<long double>(cpp_rational(r).convert_to<long double>()));
  return static_cast<double>(sign * v);
}

// Exact square of the Wigner 3j symbol together with its overall sign.
// Returns {sign, value^2 as rational}.
struct ExactSigned {
  int sign = 0;
  cpp_rational square;
};

inline ExactSigned w3j_exact(int j1, int j2, int j3, int m1, int m2, int m3) {
  check_valid(j1, m1);
  check_valid(j2, m2);
  check_valid(j3, m3);
  if (m1 + m2 + m3 != 0 || !triangle_ok(j1, j2, j3)) return {};
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return {};
  const cpp_rational pref2 =
      cpp_rational(fact2(j1 + j2 - j3) * fact2(j1 - j2 + j3) *
                       fact2(-j1 + j2 + j3) * fact2(j1 + m1) * fact2(j1 - m1) *
                       fact2(j2 + m2) * fact2(j2 - m2) * fact2(j3 + m3) *
                       fact2(j3 - m3),
                   fact2(j1 + j2 + j3 + 2));
  cpp_rational s = 0;
  const int tmin = std::max({0, (j2 - j3 - m1) / 2, (j1 - j3 + m2) / 2});
  const int tmax =
      std::min({(j1 + j2 - j3) / 2, (j1 - m1) / 2, (j2 + m2) / 2});
  for (int t = tmin; t <= tmax; ++t) {
    cpp_int den = factorial(t) * fact2(j3 - j2 + m1 + 2 * t) *
                  fact2(j3 - j1 - m2 + 2 * t) * fact2(j1 + j2 - j3 - 2 * t) *
                  fact2(j1 - m1 - 2 * t) * fact2(j2 + m2 - 2 * t);
    cpp_rational term = cpp_rational(1, den);
    s += (t % 2 == 0) ? term : -term;
  }
  if (s == 0) return {};
  int sign = (s > 0) ? 1 : -1;
  const int phase_exp = (j1 - j2 - m3) / 2;
  if (((phase_exp % 2) + 2) % 2 == 1) sign = -sign;
  return {sign, pref2 * s * s};
}

inline ExactSigned w6j_exact(int a, int b, int c, int d, int e, int f) {
  for (int j : {a, b, c, d, e, f})
    if (j < 0) throw std::domain_error("negative angular momentum");
  if (!triangle_ok(a, b, c) || !triangle_ok(a, e, f) || !triangle_ok(d, b, f) ||
      !triangle_ok(d, e, c))
    return {};
  auto delta2 = [](int x, int y, int z) {
    return cpp_rational(
        fact2(x + y - z) * fact2(x - y + z) * fact2(-x + y + z),
        fact2(x + y + z + 2));
  };
  const cpp_rational pref2 =
      delta2(a, b, c) * delta2(a, e, f) * delta2(d, b, f) * delta2(d, e, c);
  cpp_rational s = 0;
  const int tmin = std::max(
      {(a + b + c) / 2, (a + e + f) / 2, (d + b + f) / 2, (d + e + c) / 2});
  const int tmax = std::min(
      {(a + b + d + e) / 2, (b + c + e + f) / 2, (a + c + d + f) / 2});
  for (int t = tmin; t <= tmax; ++t) {
    cpp_int den = factorial(t - (a + b + c) / 2) * factorial(t - (a + e + f) / 2) *
                  factorial(t - (d + b + f) / 2) * factorial(t - (d + e + c) / 2) *
                  factorial((a + b + d + e) / 2 - t) *
                  factorial((b + c + e + f) / 2 - t) *
                  factorial((a + c + d + f) / 2 - t);
    cpp_rational term = cpp_rational(factorial(t + 1), den);
    s += (t % 2 == 0) ? term : -term;
  }
  if (s == 0) return {};
  const int sign = (s > 0) ? 1 : -1;
  return {sign, pref2 * s * s};
}

}  // namespace detail

// Wigner 3j symbol.  m arguments are doubled as well.
inline double wigner3j(AngMom j1, AngMom j2, AngMom j3, int twice_m1,
                       int twice_m2, int twice_m3) {
  auto r = detail::w3j_exact(j1.twice, j2.twice, j3.twice, twice_m1, twice_m2,
                             twice_m3);
  return detail::signed_sqrt(r.sign, r.square);
}

// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
inline double wigner6j(AngMom j1, AngMom j2, AngMom j3, AngMom j4, AngMom j5,
                       AngMom j6) {
  auto r = detail::w6j_exact(j1.twice, j2.twice, j3.twice, j4.twice, j5.twice,
                             j6.twice);
  return detail::signed_sqrt(r.sign, r.square);
}

// Clebsch-Gordan coefficient <j1 m1, j2 m2 | J M> (Condon-Shortley phases).
inline double clebsch_gordan(AngMom j1, int twice_m1, AngMom j2, int twice_m2,
                             AngMom J, int twice_M) {
  if (twice_M != twice_m1 + twice_m2) {
    detail::check_valid(j1.twice, twice_m1);
    detail::check_valid(j2.twice, twice_m2);
    detail::check_valid(J.twice, twice_M);
    return 0.0;
  }
  auto r = detail::w3j_exact(j1.twice, j2.twice, J.twice, twice_m1, twice_m2,
                             -twice_M);
  if (r.sign == 0) return 0.0;
  int sign = r.sign;
  const int phase_exp = (j1.twice - j2.twice + twice_M) / 2;
  if (((phase_exp % 2) + 2) % 2 == 1) sign = -sign;
  return detail::signed_sqrt(sign,
                             r.square * cpp_rational(J.twice + 1, 1));
}

// Quantum numbers of the Cs D2 line (defaults for the six-level scheme).
struct FineStructure {
  AngMom J_ground{1};   // 2J = 1  (J = 1/2)
  AngMom J_excited{3};  // 2J' = 3 (J' = 3/2)
  AngMom I{7};          // 2I = 7  (I = 7/2, 133Cs)
};

// Probability of spontaneous decay |F',k> -> |F,n>.  Exact rational until the
// final conversion, so 25/60 etc. come out bit-exact.
inline BranchingRatio branching_ratio(int Fp, int k, int F, int n,
                                      FineStructure fs = {}) {
  const int q = k - n;
  if (std::abs(q) > 1 || std::abs(n) > F || std::abs(k) > Fp) return {0.0};
  auto cg = detail::w3j_exact(2 * F, 2, 2 * Fp, 2 * n, 2 * q, -2 * k);
  if (cg.sign == 0) return {0.0};
  // C^2 = (2F'+1) * 3j^2
  cpp_rational C2 = cg.square * cpp_rational(2 * Fp + 1, 1);
  auto sj = detail::w6j_exact(fs.J_ground.twice, fs.I.twice, 2 * F, 2 * Fp, 2,
                              fs.J_excited.twice);
  if (sj.sign == 0) return {0.0};
  cpp_rational p = cpp_rational((fs.J_excited.twice + 1) * (2 * F + 1), 1) *
                   C2 * sj.square;
  return {static_cast<double>(p.convert_to<long double>())};
}

// Sign of the reduced dipole element <F||d||F'> in the fixed phase
// convention used throughout (see relative_dipole below).
inline int reduced_sign(int F, int Fp, FineStructure fs = {}) {
  const double sj =
      wigner6j(fs.J_ground, fs.J_excited, AngMom(2), AngMom(2 * Fp),
               AngMom(2 * F), fs.I);
  if (sj == 0.0) return 0;
  int s = (sj > 0) ? 1 : -1;
  if (F % 2 == 1) s = -s;
  return s;
}

// Signed dimensionless dipole weight for |F,n> <-> |F',k> with polarization
// q = k - n, proportional to d_{F'k,Fn} / <reduced dipole>.
//
//   reld = sign(<F||d||F'>) * C^{F'k}_{Fn,1q} * sqrt((2F'+1)/(2F+1))
//
// The convention is fixed so that the six-level scheme reproduces the
// relative Rabi ladder 1 : 3.5 : 4.5 on the control transitions, the probe
// weights 1 : -0.7 : 0.3 (with the sign alternation responsible for the
// multi-Lambda interference), and the g-e weight 6.1481704...
inline double relative_dipole(int F, int n, int Fp, int k,
                              FineStructure fs = {}) {
  const int q = k - n;
  if (std::abs(q) > 1 || std::abs(n) > F || std::abs(k) > Fp) return 0.0;
  if (!detail::triangle_ok(2 * F, 2, 2 * Fp)) return 0.0;
  const double C =
      clebsch_gordan(AngMom(2 * F), 2 * n, AngMom(2), 2 * q, AngMom(2 * Fp),
                     2 * k);
  return reduced_sign(F, Fp, fs) * C *
         std::sqrt(double(2 * Fp + 1) / double(2 * F + 1));
}

}  // namespace eit::angular
