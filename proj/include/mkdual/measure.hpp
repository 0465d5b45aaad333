#pragma once

// Finite probability spaces and the measure-theoretic primitives the solvers
// build on: subset masks, partitions, cost matrices with bounding potentials,
// conditional measures, push-forwards and tail masses.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/matrix.hpp"
#include "mkdual/scalar.hpp"

namespace mkdual {

template <class S>
using Weights = std::vector<S>;

/// A subset of the points of one finite space.
class SubsetMask {
 public:
  SubsetMask() = default;
  explicit SubsetMask(std::size_t n, bool value = false) : bits_(n, value) {}
  explicit SubsetMask(std::vector<bool> bits) : bits_(std::move(bits)) {}

  static SubsetMask full(std::size_t n) { return SubsetMask(n, true); }
  static SubsetMask empty(std::size_t n) { return SubsetMask(n, false); }
  static SubsetMask from_indices(std::size_t n, const std::vector<std::size_t>& idx) {
    SubsetMask m(n);
    for (auto i : idx) {
      if (i >= n) throw IndexOutOfRange("subset index " + std::to_string(i) + " >= " + std::to_string(n));
      m.bits_[i] = true;
    }
    return m;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v = true) { bits_[i] = v; }

  std::size_t count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true)); }
  bool none() const { return count() == 0; }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  SubsetMask operator|(const SubsetMask& o) const { return combine(o, std::logical_or<>{}); }
  SubsetMask operator&(const SubsetMask& o) const { return combine(o, std::logical_and<>{}); }
  SubsetMask operator~() const {
    SubsetMask out(*this);
    out.bits_.flip();
    return out;
  }

  bool operator==(const SubsetMask&) const = default;

 private:
  template <class Op>
  SubsetMask combine(const SubsetMask& o, Op op) const {
    if (o.size() != size()) throw DimensionMismatch("subset masks over different spaces");
    SubsetMask out(size());
    for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = op(bits_[i], o.bits_[i]);
    return out;
  }

  std::vector<bool> bits_;
};

template <class S>
S mass(const Weights<S>& w, const SubsetMask& set) {
  if (set.size() != w.size()) throw DimensionMismatch("mask size differs from weight vector");
  S total(0);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (set[i]) total += w[i];
  return total;
}

template <class S>
S total_mass(const Weights<S>& w) {
  S total(0);
  for (const auto& v : w) total += v;
  return total;
}

/// Integral of a function against a weight vector, mu(f).
template <class S>
S integrate(const Weights<S>& w, const std::vector<S>& f) {
  if (w.size() != f.size()) throw DimensionMismatch("integrand and weights differ in size");
  S total(0);
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] * f[i];
  return total;
}

/// Finite probability space: point labels, weights, optional metric.
/// Construction checks sizes only; the probability and metric axioms are
/// reported by validate_space().
template <class S>
struct ProbabilitySpace {
  std::vector<std::string> points;
  Weights<S> weights;
  std::optional<Matrix<S>> metric;

  ProbabilitySpace() = default;
  ProbabilitySpace(std::vector<std::string> pts, Weights<S> w, std::optional<Matrix<S>> d = std::nullopt)
      : points(std::move(pts)), weights(std::move(w)), metric(std::move(d)) {
    if (points.size() != weights.size()) throw DimensionMismatch("points and weights differ in length");
    if (metric && (metric->rows() != points.size() || metric->cols() != points.size()))
      throw DimensionMismatch("metric must be |X| x |X|");
  }

  /// Points labelled "0".."n-1".
  static ProbabilitySpace with_weights(Weights<S> w, std::optional<Matrix<S>> d = std::nullopt) {
    std::vector<std::string> pts;
    for (std::size_t i = 0; i < w.size(); ++i) pts.push_back(std::to_string(i));
    return ProbabilitySpace(std::move(pts), std::move(w), std::move(d));
  }

  static ProbabilitySpace uniform(std::size_t n, std::optional<Matrix<S>> d = std::nullopt) {
    Weights<S> w(n);
    for (auto& v : w) {
      if constexpr (is_exact_v<S>) v = Rational(1, static_cast<long>(n));
      else v = 1.0 / static_cast<double>(n);
    }
    return with_weights(std::move(w), std::move(d));
  }

  std::size_t size() const { return points.size(); }
  const Matrix<S>& distance() const {
    if (!metric) throw DimensionMismatch("space carries no metric");
    return *metric;
  }

  bool operator==(const ProbabilitySpace&) const = default;
};

template <class S>
struct SpaceReport {
  S normalization_defect{0};  // sum of weights minus one
  std::vector<std::size_t> negative_weights;
  std::vector<std::pair<std::size_t, std::size_t>> symmetry_violations;  // i < j
  std::vector<std::size_t> nonzero_diagonal;
  std::vector<std::pair<std::size_t, std::size_t>> negative_distances;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> triangle_violations;  // d(i,k) > d(i,j)+d(j,k)

  bool normalized() const { return approx_eq<S>(normalization_defect, S(0)); }
  bool metric_ok() const {
    return symmetry_violations.empty() && nonzero_diagonal.empty() && negative_distances.empty() &&
           triangle_violations.empty();
  }
  bool valid() const { return normalized() && negative_weights.empty() && metric_ok(); }

  std::string describe() const {
    std::ostringstream os;
    if (!normalized()) {
      os << "weights sum to 1 + (";
      if constexpr (is_exact_v<S>) os << format_rational(normalization_defect);
      else os << normalization_defect;
      os << "); ";
    }
    for (auto i : negative_weights) os << "negative weight at " << i << "; ";
    for (auto [i, j] : symmetry_violations) os << "metric not symmetric at (" << i << "," << j << "); ";
    for (auto i : nonzero_diagonal) os << "metric diagonal nonzero at " << i << "; ";
    for (auto [i, j] : negative_distances) os << "negative distance at (" << i << "," << j << "); ";
    for (auto [i, j, k] : triangle_violations)
      os << "triangle inequality fails for (" << i << "," << j << "," << k << "); ";
    return os.str();
  }
};

/// Metric axioms only (symmetry, zero diagonal, nonnegativity, triangle).
template <class S>
void check_metric(const Matrix<S>& d, SpaceReport<S>& report) {
  const std::size_t n = d.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (!approx_eq<S>(d(i, i), S(0))) report.nonzero_diagonal.push_back(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i < j && !approx_eq<S>(d(i, j), d(j, i))) report.symmetry_violations.emplace_back(i, j);
      if (definitely_negative<S>(d(i, j))) report.negative_distances.emplace_back(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (!approx_le<S>(d(i, k), d(i, j) + d(j, k))) report.triangle_violations.emplace_back(i, j, k);
}

template <class S>
SpaceReport<S> validate_space(const ProbabilitySpace<S>& space) {
  SpaceReport<S> report;
  report.normalization_defect = total_mass(space.weights) - S(1);
  for (std::size_t i = 0; i < space.size(); ++i)
    if (definitely_negative<S>(space.weights[i])) report.negative_weights.push_back(i);
  if (space.metric) check_metric(*space.metric, report);
  return report;
}

/// Shortest-path closure of a nonnegative matrix: symmetrize by the smaller
/// entry, zero the diagonal, then Floyd-Warshall. The result is a
/// (pseudo)metric. Intended for generators; never applied implicitly.
template <class S>
Matrix<S> shortest_path_closure(const Matrix<S>& raw) {
  if (raw.rows() != raw.cols()) throw DimensionMismatch("metric must be square");
  const std::size_t n = raw.rows();
  Matrix<S> d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (definitely_negative<S>(raw(i, j)) || definitely_negative<S>(raw(j, i)))
        throw InfeasibleWitness("shortest_path_closure needs a nonnegative matrix");
      d(i, j) = i == j ? S(0) : std::min(raw(i, j), raw(j, i));
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

/// mu(. | cell): weights restricted to the cell and renormalized.
template <class S>
Weights<S> conditional_measure(const Weights<S>& w, const SubsetMask& cell) {
  const S m = mass(w, cell);
  if (!definitely_positive<S>(m)) throw ZeroMassCell("conditioning on a cell of zero mass");
  Weights<S> out(w.size(), S(0));
  for (std::size_t i = 0; i < w.size(); ++i)
    if (cell[i]) out[i] = w[i] / m;
  return out;
}

template <class S>
Weights<S> conditional_measure(const ProbabilitySpace<S>& space, const SubsetMask& cell) {
  return conditional_measure(space.weights, cell);
}

/// Image measure mu∘phi^{-1} on a target with `target_size` points.
template <class S>
Weights<S> pushforward(const Weights<S>& w, const std::vector<std::size_t>& map, std::size_t target_size) {
  if (map.size() != w.size()) throw DimensionMismatch("map must be defined on every source point");
  Weights<S> out(target_size, S(0));
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (map[i] >= target_size)
      throw IndexOutOfRange("map sends point " + std::to_string(i) + " to nonexistent target " +
                            std::to_string(map[i]));
    out[map[i]] += w[i];
  }
  return out;
}

template <class S>
Weights<S> pushforward(const ProbabilitySpace<S>& space, const std::vector<std::size_t>& map,
                       std::size_t target_size) {
  return pushforward(space.weights, map, target_size);
}

/// Mass of the union of sets[from_index], sets[from_index+1], ...; i.e. the
/// tail union past the first `from_index` sets (1-based sets A_1, A_2, ...
/// with index > from_index). A finite sequence only yields this truncated
/// tail; the true limsup would need the whole infinite sequence.
template <class S>
S limsup_mass(const Weights<S>& w, const std::vector<SubsetMask>& sets, std::size_t from_index) {
  if (from_index >= sets.size() && !sets.empty())
    throw IndexOutOfRange("from_index must be smaller than the sequence length");
  SubsetMask tail(w.size());
  for (std::size_t k = from_index; k < sets.size(); ++k) tail = tail | sets[k];
  return mass(w, tail);
}

template <class S>
S limsup_mass(const ProbabilitySpace<S>& space, const std::vector<SubsetMask>& sets, std::size_t from_index) {
  return limsup_mass(space.weights, sets, from_index);
}

/// Partition {A_0, A_1, ...} of a finite set. The optional null cell plays
/// the role of A_0 and has no representative; all other cells carry one.
struct Partition {
  std::vector<SubsetMask> cells;
  std::optional<std::size_t> null_cell;
  std::vector<std::optional<std::size_t>> representatives;  // one slot per cell

  static Partition singletons(std::size_t n) {
    Partition p;
    for (std::size_t i = 0; i < n; ++i) {
      p.cells.push_back(SubsetMask::from_indices(n, {i}));
      p.representatives.emplace_back(i);
    }
    return p;
  }

  static Partition from_cells(std::size_t n, const std::vector<std::vector<std::size_t>>& cells,
                              std::optional<std::size_t> null_cell = std::nullopt) {
    Partition p;
    p.null_cell = null_cell;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      p.cells.push_back(SubsetMask::from_indices(n, cells[k]));
      if (null_cell && *null_cell == k)
        p.representatives.emplace_back(std::nullopt);
      else
        p.representatives.emplace_back(cells[k].empty() ? std::nullopt : std::optional(cells[k].front()));
    }
    return p;
  }

  std::size_t size() const { return cells.size(); }
  bool is_null(std::size_t k) const { return null_cell && *null_cell == k; }

  /// cell index of every point
  std::vector<std::size_t> cell_of(std::size_t n) const {
    std::vector<std::size_t> out(n, cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k)
      for (auto i : cells[k].indices()) out[i] = k;
    return out;
  }

  bool operator==(const Partition&) const = default;
};

/// Empty string when the partition is well formed over n points.
inline std::string partition_defect(const Partition& p, std::size_t n) {
  std::ostringstream os;
  if (p.representatives.size() != p.cells.size()) os << "one representative slot per cell required; ";
  if (p.null_cell && *p.null_cell >= p.cells.size()) os << "null cell index out of range; ";
  std::vector<int> hits(n, 0);
  for (std::size_t k = 0; k < p.cells.size(); ++k) {
    if (p.cells[k].size() != n) {
      os << "cell " << k << " has wrong size; ";
      continue;
    }
    for (auto i : p.cells[k].indices()) ++hits[i];
    if (k < p.representatives.size() && p.representatives[k]) {
      auto r = *p.representatives[k];
      if (r >= n || !p.cells[k][r]) os << "representative of cell " << k << " lies outside it; ";
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i] == 0) os << "point " << i << " is in no cell; ";
    if (hits[i] > 1) os << "point " << i << " is in several cells; ";
  }
  return os.str();
}

template <class S>
std::vector<S> cell_masses(const Weights<S>& w, const Partition& p) {
  std::vector<S> out;
  out.reserve(p.size());
  for (const auto& cell : p.cells) out.push_back(mass(w, cell));
  return out;
}

enum class PotentialSide { lower, upper };

/// (f, g) standing for f(x) + g(y). Lower pairs bound a cost from below
/// (feasible for beta), upper pairs from above (feasible for beta*).
template <class S>
struct PotentialPair {
  std::vector<S> f;
  std::vector<S> g;
  PotentialSide side = PotentialSide::lower;

  S value(const Weights<S>& mu, const Weights<S>& nu) const { return integrate(mu, f) + integrate(nu, g); }
  bool operator==(const PotentialPair&) const = default;
};

/// Largest violation of the pair's side constraint against `c` (<= 0 means
/// feasible), together with the cell attaining it.
template <class S>
std::pair<S, std::pair<std::size_t, std::size_t>> potential_violation(const PotentialPair<S>& p, const Matrix<S>& c) {
  if (p.f.size() != c.rows() || p.g.size() != c.cols()) throw DimensionMismatch("potentials do not fit the cost");
  bool first = true;
  S worst(0);
  std::pair<std::size_t, std::size_t> where{0, 0};
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      S gap = p.side == PotentialSide::lower ? S(p.f[i] + p.g[j] - c(i, j)) : S(c(i, j) - p.f[i] - p.g[j]);
      if (first || gap > worst) {
        worst = gap;
        where = {i, j};
        first = false;
      }
    }
  return {worst, where};
}

template <class S>
bool is_feasible(const PotentialPair<S>& p, const Matrix<S>& c) {
  if (c.size() == 0) return true;
  return approx_le<S>(potential_violation(p, c).first, S(0));
}

/// Cost matrix c(x_i, y_j) with optional witnesses f1+g1 <= c <= f2+g2.
template <class S>
struct CostMatrix {
  Matrix<S> values;
  std::optional<PotentialPair<S>> lower_potential;
  std::optional<PotentialPair<S>> upper_potential;

  CostMatrix() = default;
  CostMatrix(Matrix<S> v) : values(std::move(v)) {}  // NOLINT: implicit by intent
  static CostMatrix from_rows(const std::vector<std::vector<S>>& rows) { return CostMatrix(Matrix<S>::from_rows(rows)); }

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
  const S& operator()(std::size_t i, std::size_t j) const { return values(i, j); }

  /// -c, with witnesses swapped and negated.
  CostMatrix negated() const {
    CostMatrix out(-values);
    auto flip = [](const PotentialPair<S>& p, PotentialSide side) {
      PotentialPair<S> q{p.f, p.g, side};
      for (auto& v : q.f) v = -v;
      for (auto& v : q.g) v = -v;
      return q;
    };
    if (upper_potential) out.lower_potential = flip(*upper_potential, PotentialSide::lower);
    if (lower_potential) out.upper_potential = flip(*lower_potential, PotentialSide::upper);
    return out;
  }

  bool operator==(const CostMatrix&) const = default;
};

/// Empty string when the declared bounding witnesses (if any) hold.
template <class S>
std::string witness_defect(const CostMatrix<S>& c) {
  std::ostringstream os;
  auto check = [&](const std::optional<PotentialPair<S>>& p, PotentialSide side, const char* name) {
    if (!p) return;
    if (p->side != side) {
      os << name << " witness has the wrong side; ";
      return;
    }
    if (p->f.size() != c.rows() || p->g.size() != c.cols()) {
      os << name << " witness has wrong dimensions; ";
      return;
    }
    auto [gap, at] = potential_violation(*p, c.values);
    if (!approx_le<S>(gap, S(0)))
      os << name << " witness violated at (" << at.first << "," << at.second << ") by " << to_double(gap) << "; ";
  };
  check(c.lower_potential, PotentialSide::lower, "lower");
  check(c.upper_potential, PotentialSide::upper, "upper");
  return os.str();
}

}  // namespace mkdual
