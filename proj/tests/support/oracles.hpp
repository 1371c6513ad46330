#pragma once

// Independent reference computations used only by tests. Nothing here calls
// the solver or generator code it is used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "bftavail/ctmc_model.hpp"

namespace bftavail::oracle {

// Stationary law of the single-repairer birth-death chain on {0..h} with
// up-rate eta and down-rate i*xi. Detailed balance gives
// P_i proportional to rho^i / i! with rho = eta/xi; evaluated in log-space.
inline std::vector<double> birth_death_stationary(int h, double rho) {
  std::vector<double> logs(static_cast<std::size_t>(h) + 1);
  for (int i = 0; i <= h; ++i) logs[static_cast<std::size_t>(i)] = i * std::log(rho) - std::lgamma(i + 1.0);
  const double shift = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double& v : logs) {
    v = std::exp(v - shift);
    total += v;
  }
  for (double& v : logs) v /= total;
  return logs;
}

// Honest and Byzantine dimensions evolve independently (no rate in one
// depends on the other), so A_{h,f} is a tail of the honest birth-death law.
inline double closed_form_availability(int n, int f, double ratio) {
  const int h = n - f;
  const int threshold = (2 * n) / 3 + 1;
  if (threshold > h) return 0.0;
  const auto p = birth_death_stationary(h, 1.0 / ratio);
  double tail = 0.0;
  for (int i = threshold; i <= h; ++i) tail += p[static_cast<std::size_t>(i)];
  return tail;
}

// Product-form stationary vector in the flat (i outer, j inner) layout.
inline std::vector<double> closed_form_stationary(int h, int f, double rho) {
  const auto honest = birth_death_stationary(h, rho);
  const auto byzantine = birth_death_stationary(f, rho);
  std::vector<double> p;
  p.reserve(honest.size() * byzantine.size());
  for (double a : honest) {
    for (double b : byzantine) p.push_back(a * b);
  }
  return p;
}

inline int kronecker(int a, int b) { return a == b ? 1 : 0; }

// Coefficient of P_{c} in the balance equation of state r, read term by
// term from the Kronecker-delta form of the equations.
inline double balance_coefficient(int h, int f, double xi, double eta, StateIndex r, StateIndex c) {
  const int i = r.honest_up;
  const int j = r.byzantine_up;
  const int a = c.honest_up;
  const int b = c.byzantine_up;
  double value = 0.0;
  value += kronecker(a, i) * kronecker(b, j) *
           ((2 - kronecker(i, h) - kronecker(j, f)) * eta + (i + j) * xi);
  value -= eta * kronecker(a, i) * kronecker(b, j - 1) * (1 - kronecker(j, 0));
  value -= eta * kronecker(a, i - 1) * kronecker(b, j) * (1 - kronecker(i, 0));
  value -= (i + 1) * xi * kronecker(a, i + 1) * kronecker(b, j) * (1 - kronecker(i, h));
  value -= (j + 1) * xi * kronecker(a, i) * kronecker(b, j + 1) * (1 - kronecker(j, f));
  return value;
}

}  // namespace bftavail::oracle
