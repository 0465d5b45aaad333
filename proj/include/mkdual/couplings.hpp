#pragma once

// Explicit couplings: the partition extension of a coarse coupling, Monge
// (graph) couplings, and the product / diagonal couplings.

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/measure.hpp"
#include "mkdual/transport.hpp"

namespace mkdual {

/// Coupling between the cell masses of a partition of X and nu on Y.
/// Row k of `matrix` belongs to partition cell k.
template <class S>
struct CoarseCoupling {
  Partition partition;
  Matrix<S> matrix;
  Weights<S> nu;
};

template <class S>
std::string coarse_defect(const CoarseCoupling<S>& t, const Weights<S>& mu) {
  std::ostringstream os;
  if (auto d = partition_defect(t.partition, mu.size()); !d.empty()) return "partition: " + d;
  if (t.matrix.rows() != t.partition.size() || t.matrix.cols() != t.nu.size()) return "coarse matrix has wrong shape";
  auto masses = cell_masses(mu, t.partition);
  auto rs = t.matrix.row_sums();
  auto cs = t.matrix.col_sums();
  for (std::size_t k = 0; k < rs.size(); ++k)
    if (!approx_eq<S>(rs[k], masses[k])) os << "row " << k << " does not sum to the cell mass; ";
  for (std::size_t j = 0; j < cs.size(); ++j)
    if (!approx_eq<S>(cs[j], t.nu[j])) os << "column " << j << " does not sum to nu; ";
  for (std::size_t k = 0; k < t.matrix.size(); ++k)
    if (definitely_negative<S>(t.matrix.flat(k))) os << "negative coarse entry; ";
  return os.str();
}

/// Fine coupling P(x, y) = mu(x | A_k) T(A_k, y) for x in A_k. Cells of
/// zero mass contribute nothing (their rows stay zero).
template <class S>
Coupling<S> extend_coupling(const CoarseCoupling<S>& t, const Weights<S>& mu) {
  if (auto d = coarse_defect(t, mu); !d.empty()) throw MarginalMismatch(d);
  Matrix<S> p(mu.size(), t.nu.size());
  for (std::size_t k = 0; k < t.partition.size(); ++k) {
    const auto& cell = t.partition.cells[k];
    if (!definitely_positive<S>(mass(mu, cell))) continue;
    const auto cond = conditional_measure(mu, cell);
    for (auto x : cell.indices())
      for (std::size_t y = 0; y < t.nu.size(); ++y) p(x, y) = cond[x] * t.matrix(k, y);
  }
  return Coupling<S>{std::move(p), mu, t.nu};
}

/// P(A_k x {y}) for every cell and column; equal to T when P extends T.
template <class S>
Matrix<S> coarsen(const Coupling<S>& p, const Partition& part) {
  Matrix<S> out(part.size(), p.matrix.cols());
  for (std::size_t k = 0; k < part.size(); ++k)
    for (auto x : part.cells[k].indices())
      for (std::size_t y = 0; y < p.matrix.cols(); ++y) out(k, y) += p.matrix(x, y);
  return out;
}

/// Coupling carried by the graph of phi: P(x, phi(x)) = mu(x).
template <class S>
Coupling<S> monge_coupling(const Weights<S>& mu, const std::vector<std::size_t>& map, const Weights<S>& nu) {
  auto image = pushforward(mu, map, nu.size());
  std::vector<double> defect(nu.size());
  bool ok = true;
  std::ostringstream os;
  for (std::size_t y = 0; y < nu.size(); ++y) {
    S diff = nu[y] - image[y];
    defect[y] = to_double(diff);
    if (!approx_eq<S>(diff, S(0))) {
      ok = false;
      if constexpr (is_exact_v<S>)
        os << " y=" << y << ": " << format_rational(diff);
      else
        os << " y=" << y << ": " << defect[y];
    }
  }
  if (!ok) throw NotMeasurePreserving(std::move(defect), "nu - mu∘phi^-1 is nonzero at" + os.str());
  Matrix<S> p(mu.size(), nu.size());
  for (std::size_t x = 0; x < mu.size(); ++x) p(x, map[x]) = mu[x];
  return Coupling<S>{std::move(p), mu, nu};
}

template <class S>
Coupling<S> monge_coupling(const ProbabilitySpace<S>& space_x, const std::vector<std::size_t>& map, const Weights<S>& nu) {
  return monge_coupling(space_x.weights, map, nu);
}

template <class S>
Coupling<S> product_coupling(const Weights<S>& mu, const Weights<S>& nu) {
  Matrix<S> p(mu.size(), nu.size());
  for (std::size_t x = 0; x < mu.size(); ++x)
    for (std::size_t y = 0; y < nu.size(); ++y) p(x, y) = mu[x] * nu[y];
  return Coupling<S>{std::move(p), mu, nu};
}

/// P(U) = mu{x : (x, x) in U}; requires X = Y.
template <class S>
Coupling<S> diagonal_coupling(const Weights<S>& mu) {
  Matrix<S> p(mu.size(), mu.size());
  for (std::size_t x = 0; x < mu.size(); ++x) p(x, x) = mu[x];
  return Coupling<S>{std::move(p), mu, mu};
}

template <class S>
Coupling<S> diagonal_coupling(const ProbabilitySpace<S>& x, const ProbabilitySpace<S>& y) {
  if (x.points != y.points) throw SpaceMismatch("diagonal coupling needs X = Y as point sets");
  if (!(x.weights == y.weights)) throw SpaceMismatch("diagonal coupling needs mu = nu");
  return diagonal_coupling(x.weights);
}

}  // namespace mkdual
