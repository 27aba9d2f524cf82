#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "bnfstab/birkhoff.hpp"
#include "bnfstab/graded_series.hpp"
#include "bnfstab/polynomial.hpp"

namespace testing {

using namespace bnfstab;

inline Polynomial mono(int n, std::vector<int> j, std::vector<int> k, Complex c = 1.0) {
  return Polynomial::monomial(n, j, k, c);
}

// Every monomial of degree d in n pairs, visited in no particular order.
template <class F>
void for_each_exponent(int n, int d, F&& f) {
  std::vector<int> e(2 * n, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == 2 * n - 1) {
      e[pos] = left;
      f(std::vector<int>(e.begin(), e.begin() + n), std::vector<int>(e.begin() + n, e.end()));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      e[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, d);
}

// Random real homogeneous polynomial with roughly `density` of the monomials.
inline Polynomial random_homogeneous(std::mt19937_64& rng, int n, int d, double density = 0.6) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Term> terms;
  for_each_exponent(n, d, [&](const std::vector<int>& j, const std::vector<int>& k) {
    if (coin(rng) < density) terms.push_back({MultiIndex::from_exponents(j, k), coeff(rng)});
  });
  return Polynomial::from_terms(n, Field::real, std::move(terms));
}

inline double max_diff(const Polynomial& a, const Polynomial& b) { return (a - b).max_abs(); }

// H = oscillator(omega) + extra, as a series of degree dmax.
inline GradedSeries series_with(std::span<const double> omega, const Polynomial& extra, int dmax) {
  Polynomial h2(static_cast<int>(omega.size()));
  for (std::size_t i = 0; i < omega.size(); ++i) h2 += omega[i] * Polynomial::action(static_cast<int>(omega.size()), static_cast<int>(i));
  return GradedSeries::from_polynomial(h2 + extra, dmax);
}

inline double worst_residual(const NormalFormState& s) {
  double w = 0.0;
  for (double r : s.homological_residual) w = std::max(w, r);
  return w;
}

}  // namespace testing
