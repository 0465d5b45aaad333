#pragma once

// W1 on a finite metric space, two ways:
//   primal  alpha(d) = min over couplings of sum P d    (transport simplex)
//   dual    sup { mu(f) - nu(f) : |f(x) - f(z)| <= d(x, z) }   (dense LP)

#include <cstddef>
#include <utility>
#include <vector>

#include "mkdual/measure.hpp"
#include "mkdual/simplex.hpp"
#include "mkdual/transport.hpp"

namespace mkdual {

template <class S>
struct LipschitzDual {
  S value{0};
  std::vector<S> potential;  // shifted so that min f = 0
  std::size_t pivots = 0;
};

/// Solves the 1-Lipschitz dual. Since sum(mu - nu) = 0 the objective ignores
/// constant shifts, so f is searched among nonnegative vectors.
template <class S>
LipschitzDual<S> lipschitz_dual(const Matrix<S>& d, const Weights<S>& mu, const Weights<S>& nu) {
  const std::size_t n = d.rows();
  if (d.cols() != n || mu.size() != n || nu.size() != n) throw DimensionMismatch("lipschitz_dual needs square d and matching marginals");
  check_marginals(n, n, mu, nu);
  std::size_t rows = n * (n - 1);
  Matrix<S> A(rows, n);
  std::vector<S> b(rows);
  std::size_t r = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = 0; z < n; ++z) {
      if (x == z) continue;
      A(r, x) = S(1);
      A(r, z) = S(-1);
      b[r] = d(x, z);
      ++r;
    }
  std::vector<S> objective(n);
  for (std::size_t x = 0; x < n; ++x) objective[x] = mu[x] - nu[x];
  auto lp = maximize_slack_form(A, b, objective);
  if (lp.status != LpStatus::optimal) throw InfeasibleWitness("Lipschitz dual unbounded; is d a metric?");
  LipschitzDual<S> out;
  out.value = lp.value;
  out.potential = std::move(lp.x);
  out.pivots = lp.pivots;
  return out;
}

/// Largest excess |f(x) - f(z)| - d(x, z) over all pairs (<= 0 when f is 1-Lipschitz).
template <class S>
S lipschitz_excess(const std::vector<S>& f, const Matrix<S>& d) {
  S worst(0);
  bool first = true;
  for (std::size_t x = 0; x < f.size(); ++x)
    for (std::size_t z = 0; z < f.size(); ++z) {
      S e = abs_value<S>(f[x] - f[z]) - d(x, z);
      if (first || e > worst) worst = e, first = false;
    }
  return worst;
}

template <class S>
struct WassersteinReport {
  S alpha{0};  // primal transport value alpha(d)
  S beta{0};   // Lipschitz-dual value
  Coupling<S> coupling;
  std::vector<S> potential;
  S lipschitz_excess{0};

  bool potential_is_1_lipschitz() const { return approx_le<S>(lipschitz_excess, S(0)); }
  bool duality_holds() const { return approx_eq<S>(alpha, beta); }
};

template <class S>
WassersteinReport<S> wasserstein1(const Matrix<S>& d, const Weights<S>& mu, const Weights<S>& nu) {
  WassersteinReport<S> out;
  auto primal = solve_alpha(CostMatrix<S>(d), mu, nu);
  out.alpha = primal.value;
  out.coupling = *primal.coupling;
  auto dual = lipschitz_dual(d, mu, nu);
  out.beta = dual.value;
  out.potential = std::move(dual.potential);
  out.lipschitz_excess = lipschitz_excess(out.potential, d);
  return out;
}

template <class S>
WassersteinReport<S> wasserstein1(const ProbabilitySpace<S>& space, const Weights<S>& mu, const Weights<S>& nu) {
  return wasserstein1(space.distance(), mu, nu);
}

}  // namespace mkdual
