#pragma once

// Primal/dual transport solvers on finite spaces.
//
// alpha(c)  = min  sum P c      over couplings P of (mu, nu)
// alpha*(c) = max  sum P c
// beta(c)   = max  mu(f)+nu(g)  over f(x)+g(y) <= c(x,y)
// beta*(c)  = min  mu(f)+nu(g)  over f(x)+g(y) >= c(x,y)
//
// alpha and beta come out of one run of the transportation (network) simplex:
// the basis flows give the coupling, the node potentials give (f, g).
// alpha* and beta* reduce to the minimization via c -> -c.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/matrix.hpp"
#include "mkdual/measure.hpp"
#include "mkdual/scalar.hpp"

namespace mkdual {

/// Joint weights over X x Y together with the marginals it claims.
template <class S>
struct Coupling {
  Matrix<S> matrix;
  Weights<S> mu;
  Weights<S> nu;

  S integrate(const Matrix<S>& c) const {
    if (c.rows() != matrix.rows() || c.cols() != matrix.cols()) throw DimensionMismatch("cost does not fit coupling");
    S total(0);
    for (std::size_t k = 0; k < matrix.size(); ++k)
      if (matrix.flat(k) != 0) total += matrix.flat(k) * c.flat(k);
    return total;
  }

  /// P(H) for H given by a 0/1 mask over the cells.
  S mass_of(const std::vector<bool>& cells) const {
    S total(0);
    for (std::size_t k = 0; k < matrix.size(); ++k)
      if (cells[k]) total += matrix.flat(k);
    return total;
  }

  bool operator==(const Coupling&) const = default;
};

/// Empty when row sums equal mu, column sums equal nu, entries are
/// nonnegative and total mass is one (all up to the mode tolerance).
template <class S>
std::string coupling_defect(const Coupling<S>& p) {
  std::string out;
  if (p.matrix.rows() != p.mu.size() || p.matrix.cols() != p.nu.size()) return "coupling shape differs from marginals";
  auto rs = p.matrix.row_sums();
  auto cs = p.matrix.col_sums();
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (!approx_eq<S>(rs[i], p.mu[i])) out += "row " + std::to_string(i) + " sum differs from mu; ";
  for (std::size_t j = 0; j < cs.size(); ++j)
    if (!approx_eq<S>(cs[j], p.nu[j])) out += "column " + std::to_string(j) + " sum differs from nu; ";
  for (std::size_t k = 0; k < p.matrix.size(); ++k)
    if (definitely_negative<S>(p.matrix.flat(k))) out += "negative entry at " + std::to_string(k) + "; ";
  if (!approx_eq<S>(total_mass(rs), S(1))) out += "total mass differs from 1; ";
  return out;
}

enum class Objective { alpha, alpha_star, beta, beta_star };

inline std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::alpha: return "alpha";
    case Objective::alpha_star: return "alpha_star";
    case Objective::beta: return "beta";
    case Objective::beta_star: return "beta_star";
  }
  return "?";
}

template <class S>
struct SolveReport {
  S value{0};
  std::optional<Coupling<S>> coupling;
  std::optional<PotentialPair<S>> potentials;
  Objective objective = Objective::alpha;
  ArithmeticMode arithmetic_mode = mode_of<S>();
  std::size_t pivots = 0;
};

template <class S>
void check_marginals(std::size_t rows, std::size_t cols, const Weights<S>& mu, const Weights<S>& nu) {
  if (mu.size() != rows || nu.size() != cols)
    throw DimensionMismatch("cost is " + std::to_string(rows) + "x" + std::to_string(cols) + " but marginals are " +
                            std::to_string(mu.size()) + " and " + std::to_string(nu.size()));
  if (rows == 0 || cols == 0) throw DimensionMismatch("empty space");
  for (const auto* w : {&mu, &nu}) {
    for (const auto& v : *w)
      if (definitely_negative<S>(v)) throw InfeasibleMarginals("negative marginal weight");
    if (!approx_eq<S>(total_mass(*w), S(1))) throw InfeasibleMarginals("marginal weights do not sum to 1");
  }
}

namespace detail {

/// Transportation simplex with a spanning-tree basis over the bipartite graph
/// rows {0..m-1} + columns {m..m+n-1}. Cells are numbered i*n + j; Bland's
/// rule (lowest-numbered improving cell enters, lowest-numbered blocking
/// cell leaves) rules out cycling on degenerate bases.
template <class S>
class TransportSimplex {
 public:
  TransportSimplex(const Matrix<S>& cost, const Weights<S>& mu, const Weights<S>& nu)
      : c_(cost), m_(cost.rows()), n_(cost.cols()), flow_(m_, n_), basic_(m_ * n_, false) {
    northwest_corner(mu, nu);
  }

  void solve() {
    for (;;) {
      compute_potentials();
      std::optional<std::size_t> entering;
      for (std::size_t k = 0; k < m_ * n_; ++k) {
        if (basic_[k]) continue;
        const S rc = c_.flat(k) - u_[k / n_] - v_[k % n_];
        if (definitely_negative<S>(rc)) {
          entering = k;
          break;
        }
      }
      if (!entering) return;
      pivot(*entering);
      ++pivots_;
    }
  }

  const Matrix<S>& flow() const { return flow_; }
  const std::vector<S>& row_potentials() const { return u_; }
  const std::vector<S>& col_potentials() const { return v_; }
  std::size_t pivots() const { return pivots_; }

 private:
  void northwest_corner(Weights<S> a, Weights<S> b) {
    // Produces m+n-1 basic cells forming a spanning tree, zero-flow cells
    // included on degenerate steps.
    std::size_t i = 0, j = 0;
    while (i < m_ && j < n_) {
      const S x = std::min(a[i], b[j]);
      flow_(i, j) = x;
      basic_[i * n_ + j] = true;
      a[i] -= x;
      b[j] -= x;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (j + 1 == n_ || (i + 1 < m_ && a[i] <= b[j]))
        ++i;
      else
        ++j;
    }
    if constexpr (!is_exact_v<S>) {
      // rounding residue would otherwise leave negative flows later
      for (std::size_t k = 0; k < m_ * n_; ++k)
        if (flow_.flat(k) < 0) flow_.flat(k) = 0;
    }
  }

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(m_ + n_);
    for (std::size_t k = 0; k < m_ * n_; ++k)
      if (basic_[k]) {
        adj[k / n_].push_back(m_ + k % n_);
        adj[m_ + k % n_].push_back(k / n_);
      }
    return adj;
  }

  void compute_potentials() {
    u_.assign(m_, S(0));
    v_.assign(n_, S(0));
    auto adj = adjacency();
    std::vector<bool> seen(m_ + n_, false);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      const std::size_t a = q.front();
      q.pop();
      for (std::size_t b : adj[a]) {
        if (seen[b]) continue;
        seen[b] = true;
        if (a < m_)
          v_[b - m_] = c_(a, b - m_) - u_[a];
        else
          u_[b] = c_(b, a - m_) - v_[a - m_];
        q.push(b);
      }
    }
  }

  void pivot(std::size_t entering) {
    const std::size_t ei = entering / n_, ej = entering % n_;
    auto adj = adjacency();
    // tree path from column node ej to row node ei
    std::vector<std::size_t> parent(m_ + n_, std::numeric_limits<std::size_t>::max());
    std::queue<std::size_t> q;
    const std::size_t start = m_ + ej;
    parent[start] = start;
    q.push(start);
    while (!q.empty()) {
      const std::size_t a = q.front();
      q.pop();
      if (a == ei) break;
      for (std::size_t b : adj[a])
        if (parent[b] == std::numeric_limits<std::size_t>::max()) {
          parent[b] = a;
          q.push(b);
        }
    }
    // walk back from ei to start, collecting cells; first cell adjacent to
    // the column end gets "-" after the entering "+".
    std::vector<std::size_t> path_cells;
    for (std::size_t node = ei; node != start; node = parent[node]) {
      const std::size_t prev = parent[node];
      const std::size_t row = node < m_ ? node : prev;
      const std::size_t col = node < m_ ? prev - m_ : node - m_;
      path_cells.push_back(row * n_ + col);
    }
    std::reverse(path_cells.begin(), path_cells.end());  // now ordered from column ej
    std::optional<S> theta;
    std::size_t leaving = 0;
    for (std::size_t t = 0; t < path_cells.size(); t += 2) {
      const std::size_t k = path_cells[t];
      const S& x = flow_.flat(k);
      if (!theta || x < *theta) {
        theta = x;
        leaving = k;
      }
    }
    // Bland: among the blocking cells take the lowest index
    for (std::size_t t = 0; t < path_cells.size(); t += 2) {
      const std::size_t k = path_cells[t];
      if (approx_eq<S>(flow_.flat(k), *theta) && k < leaving) leaving = k;
    }
    const S step = *theta;
    flow_.flat(entering) += step;
    for (std::size_t t = 0; t < path_cells.size(); ++t) {
      if (t % 2 == 0)
        flow_.flat(path_cells[t]) -= step;
      else
        flow_.flat(path_cells[t]) += step;
    }
    basic_[entering] = true;
    basic_[leaving] = false;
    flow_.flat(leaving) = S(0);
    if constexpr (!is_exact_v<S>) {
      for (std::size_t k : path_cells)
        if (flow_.flat(k) < 0) flow_.flat(k) = 0;
    }
  }

  const Matrix<S>& c_;
  std::size_t m_, n_;
  Matrix<S> flow_;
  std::vector<bool> basic_;
  std::vector<S> u_, v_;
  std::size_t pivots_ = 0;
};

template <class S>
SolveReport<S> run_min_transport(const Matrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  check_marginals(c.rows(), c.cols(), mu, nu);
  TransportSimplex<S> simplex(c, mu, nu);
  simplex.solve();
  SolveReport<S> report;
  report.coupling = Coupling<S>{simplex.flow(), mu, nu};
  report.potentials = PotentialPair<S>{simplex.row_potentials(), simplex.col_potentials(), PotentialSide::lower};
  report.pivots = simplex.pivots();
  return report;
}

template <class S>
SolveReport<S> negate_report(SolveReport<S> r, Objective o) {
  r.value = -r.value;
  if (r.potentials) {
    for (auto& v : r.potentials->f) v = -v;
    for (auto& v : r.potentials->g) v = -v;
    r.potentials->side = r.potentials->side == PotentialSide::lower ? PotentialSide::upper : PotentialSide::lower;
  }
  r.objective = o;
  return r;
}

}  // namespace detail

/// alpha(c): optimal coupling plus lower potentials meeting it with equality.
template <class S>
SolveReport<S> solve_alpha(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  auto r = detail::run_min_transport(c.values, mu, nu);
  r.value = r.coupling->integrate(c.values);
  r.objective = Objective::alpha;
  return r;
}

/// alpha*(c) = -alpha(-c).
template <class S>
SolveReport<S> solve_alpha_star(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  return detail::negate_report(solve_alpha(c.negated(), mu, nu), Objective::alpha_star);
}

/// beta(c), read off the dual side: the value is mu(f)+nu(g) of the
/// potentials, computed independently of the coupling's objective.
template <class S>
SolveReport<S> solve_beta(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  auto r = detail::run_min_transport(c.values, mu, nu);
  r.value = r.potentials->value(mu, nu);
  r.objective = Objective::beta;
  return r;
}

/// beta*(c) = -beta(-c).
template <class S>
SolveReport<S> solve_beta_star(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  return detail::negate_report(solve_beta(c.negated(), mu, nu), Objective::beta_star);
}

template <class S>
SolveReport<S> solve(Objective o, const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  switch (o) {
    case Objective::alpha: return solve_alpha(c, mu, nu);
    case Objective::alpha_star: return solve_alpha_star(c, mu, nu);
    case Objective::beta: return solve_beta(c, mu, nu);
    case Objective::beta_star: return solve_beta_star(c, mu, nu);
  }
  throw std::invalid_argument("unknown objective");
}

template <class S>
struct OracleResult {
  S value{0};
  std::size_t bases_examined = 0;     // spanning trees with nonnegative flow
  std::size_t distinct_vertices = 0;  // distinct couplings among them
};

inline constexpr std::size_t kOracleDefaultCap = 16;

/// Brute force over every basis of the transportation polytope: each
/// spanning tree of K_{m,n} fixes a unique flow; the nonnegative ones are the
/// vertices (degenerate bases included). Returns the extreme objective.
/// Only primal objectives are accepted.
template <class S>
OracleResult<S> oracle_enumerate(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu,
                                 Objective objective, std::size_t cap = kOracleDefaultCap) {
  if (objective != Objective::alpha && objective != Objective::alpha_star)
    throw std::invalid_argument("oracle_enumerate evaluates primal objectives only");
  check_marginals(c.rows(), c.cols(), mu, nu);
  const std::size_t m = c.rows(), n = c.cols(), cells = m * n, basis = m + n - 1;
  if (cells > cap) throw InstanceTooLarge(std::to_string(cells) + " cells exceed the oracle cap of " + std::to_string(cap));

  OracleResult<S> result;
  std::optional<S> best;
  std::set<std::vector<S>> vertices;
  std::vector<std::size_t> chosen;

  auto evaluate = [&]() {
    // union-find tree check
    std::vector<std::size_t> parent(m + n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (auto k : chosen) {
      auto a = find(k / n), b = find(m + k % n);
      if (a == b) return;
      parent[a] = b;
    }
    // peel leaves: a node of degree one fixes the flow on its only cell
    std::vector<S> supply(m + n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = mu[i];
    for (std::size_t j = 0; j < n; ++j) supply[m + j] = nu[j];
    std::vector<std::size_t> degree(m + n, 0);
    for (auto k : chosen) ++degree[k / n], ++degree[m + k % n];
    std::vector<bool> done(chosen.size(), false);
    std::vector<S> x(chosen.size(), S(0));
    for (std::size_t settled = 0; settled < chosen.size();) {
      bool progress = false;
      for (std::size_t t = 0; t < chosen.size(); ++t) {
        if (done[t]) continue;
        const std::size_t r = chosen[t] / n, col = m + chosen[t] % n;
        std::size_t leaf = degree[r] == 1 ? r : (degree[col] == 1 ? col : m + n);
        if (leaf == m + n) continue;
        const std::size_t other = leaf == r ? col : r;
        x[t] = supply[leaf];
        supply[other] -= x[t];
        supply[leaf] = S(0);
        --degree[r];
        --degree[col];
        done[t] = true;
        ++settled;
        progress = true;
      }
      if (!progress) return;  // unreachable for a tree
    }
    for (const auto& v : x)
      if (definitely_negative<S>(v)) return;
    std::vector<S> dense(cells, S(0));
    S value(0);
    for (std::size_t t = 0; t < chosen.size(); ++t) {
      dense[chosen[t]] = x[t];
      value += x[t] * c.values.flat(chosen[t]);
    }
    ++result.bases_examined;
    if constexpr (is_exact_v<S>) vertices.insert(dense);
    const bool better = !best || (objective == Objective::alpha ? value < *best : value > *best);
    if (better) best = value;
  };

  // combinations of `basis` cells out of `cells`
  std::vector<std::size_t> idx(basis);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    chosen = idx;
    evaluate();
    std::size_t k = basis;
    while (k > 0 && idx[k - 1] == cells - basis + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t t = k; t < basis; ++t) idx[t] = idx[t - 1] + 1;
  }
  result.value = *best;
  result.distinct_vertices = is_exact_v<S> ? vertices.size() : result.bases_examined;
  return result;
}

template <class S>
struct Chain {
  S beta{0}, alpha{0}, alpha_star{0}, beta_star{0};

  bool holds() const {
    return approx_le<S>(beta, alpha) && approx_le<S>(alpha, alpha_star) && approx_le<S>(alpha_star, beta_star);
  }
  bool dual_gaps_closed() const { return approx_eq<S>(alpha, beta) && approx_eq<S>(alpha_star, beta_star); }
};

/// beta <= alpha <= alpha* <= beta*.
template <class S>
Chain<S> check_chain(const CostMatrix<S>& c, const Weights<S>& mu, const Weights<S>& nu) {
  Chain<S> chain;
  chain.beta = solve_beta(c, mu, nu).value;
  chain.alpha = solve_alpha(c, mu, nu).value;
  chain.alpha_star = solve_alpha_star(c, mu, nu).value;
  chain.beta_star = solve_beta_star(c, mu, nu).value;
  return chain;
}

}  // namespace mkdual
