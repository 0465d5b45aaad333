#pragma once

// Approximation operators behind the duality arguments:
//
//   lipschitz_infconv      c_n(x,y) = min_{z in D} { n d(x,z) + c(z,y) }
//   variant_infconv_shifted  same, applied to c(z,y) - f(z)
//   partition_discretize   c_0 freezes each non-null cell at its representative row
//   oscillation            per-cell max_{x,z in cell} max_y |c(x,y) - c(z,y)|
//   find_star_partition    greedy cells of diameter < eps / u
//   normalize_cost         h = c - (f + g)
//   beta_star_limit_check  beta*(c_n) along an increasing sequence c_n <= c

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/measure.hpp"
#include "mkdual/transport.hpp"

namespace mkdual {

template <class S>
struct ApproximantStage {
  S parameter{0};
  CostMatrix<S> cost;
};

template <class S>
struct ApproximantSequence {
  CostMatrix<S> base_cost;
  std::vector<ApproximantStage<S>> stages;
};

template <class S>
CostMatrix<S> lipschitz_infconv(const CostMatrix<S>& c, const S& n, const Matrix<S>& d,
                                const std::optional<SubsetMask>& anchors = std::nullopt) {
  if (d.rows() != c.rows() || d.cols() != c.rows()) throw DimensionMismatch("metric does not match the cost rows");
  if (!definitely_positive<S>(n)) throw std::invalid_argument("infimal-convolution parameter must be positive");
  std::vector<std::size_t> D;
  if (anchors) {
    if (anchors->size() != c.rows()) throw DimensionMismatch("anchor mask size");
    D = anchors->indices();
  } else {
    D.resize(c.rows());
    for (std::size_t i = 0; i < D.size(); ++i) D[i] = i;
  }
  if (D.empty()) throw EmptyAnchorSet("infimal convolution over an empty anchor set");
  Matrix<S> out(c.rows(), c.cols());
  for (std::size_t x = 0; x < c.rows(); ++x)
    for (std::size_t y = 0; y < c.cols(); ++y) {
      S best = n * d(x, D[0]) + c(D[0], y);
      for (std::size_t t = 1; t < D.size(); ++t) {
        S cand = n * d(x, D[t]) + c(D[t], y);
        if (cand < best) best = std::move(cand);
      }
      out(x, y) = std::move(best);
    }
  return CostMatrix<S>(std::move(out));
}

template <class S>
CostMatrix<S> lipschitz_infconv(const CostMatrix<S>& c, const S& n, const ProbabilitySpace<S>& space_x,
                                const std::optional<SubsetMask>& anchors = std::nullopt) {
  return lipschitz_infconv(c, n, space_x.distance(), anchors);
}

/// Infimal convolution of c - f (f a function of x only).
template <class S>
CostMatrix<S> variant_infconv_shifted(const CostMatrix<S>& c, const S& n, const Matrix<S>& d, const std::vector<S>& f,
                                      const std::optional<SubsetMask>& anchors = std::nullopt) {
  if (f.size() != c.rows()) throw DimensionMismatch("shift must be a function on X");
  Matrix<S> shifted = c.values;
  for (std::size_t x = 0; x < c.rows(); ++x)
    for (std::size_t y = 0; y < c.cols(); ++y) shifted(x, y) -= f[x];
  return lipschitz_infconv(CostMatrix<S>(std::move(shifted)), n, d, anchors);
}

/// f(x) = min_y { c(x,y) - g(y) }: the largest f with f + g <= c.
template <class S>
std::vector<S> row_transform(const CostMatrix<S>& c, const std::vector<S>& g) {
  if (g.size() != c.cols()) throw DimensionMismatch("g must be a function on Y");
  std::vector<S> f(c.rows());
  for (std::size_t x = 0; x < c.rows(); ++x) {
    f[x] = c(x, 0) - g[0];
    for (std::size_t y = 1; y < c.cols(); ++y) f[x] = std::min<S>(f[x], c(x, y) - g[y]);
  }
  return f;
}

/// Smallest L with max_y |c(x,y) - c(z,y)| <= L d(x,z) for all x, z;
/// nullopt when some pair at distance zero has different rows.
template <class S>
std::optional<S> lipschitz_modulus(const CostMatrix<S>& c, const Matrix<S>& d) {
  S best(0);
  for (std::size_t x = 0; x < c.rows(); ++x)
    for (std::size_t z = x + 1; z < c.rows(); ++z) {
      S diff(0);
      for (std::size_t y = 0; y < c.cols(); ++y) diff = std::max<S>(diff, abs_value<S>(c(x, y) - c(z, y)));
      if (diff == 0) continue;
      if (!definitely_positive<S>(d(x, z))) return std::nullopt;
      best = std::max<S>(best, diff / d(x, z));
    }
  return best;
}

template <class S>
CostMatrix<S> partition_discretize(const CostMatrix<S>& c, const Partition& p) {
  if (auto defect = partition_defect(p, c.rows()); !defect.empty()) throw DimensionMismatch("bad partition: " + defect);
  Matrix<S> out = c.values;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.is_null(k) || p.cells[k].none()) continue;
    if (!p.representatives[k]) throw MissingRepresentative("cell " + std::to_string(k) + " has no representative");
    const std::size_t rep = *p.representatives[k];
    for (auto x : p.cells[k].indices())
      for (std::size_t y = 0; y < c.cols(); ++y) out(x, y) = c(rep, y);
  }
  return CostMatrix<S>(std::move(out));
}

/// One value per cell; the null cell (and empty cells) report 0.
template <class S>
std::vector<S> oscillation(const CostMatrix<S>& c, const Partition& p) {
  std::vector<S> out(p.size(), S(0));
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.is_null(k)) continue;
    auto members = p.cells[k].indices();
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        for (std::size_t y = 0; y < c.cols(); ++y)
          out[k] = std::max<S>(out[k], abs_value<S>(c(members[a], y) - c(members[b], y)));
  }
  return out;
}

template <class S>
S max_oscillation(const CostMatrix<S>& c, const Partition& p) {
  auto osc = oscillation(c, p);
  S best(0);
  for (const auto& v : osc) best = std::max(best, v);
  return best;
}

/// Clusters X into cells of diameter < eps / u after checking that c is
/// u-Lipschitz in x uniformly in y. Seeds are picked farthest-point first
/// (the first seed is point 0); each seed then absorbs, in index order, every
/// unassigned point that keeps the cell diameter below eps / u. The seed is
/// the cell's representative. No null cell is produced.
template <class S>
Partition find_star_partition(const CostMatrix<S>& c, const S& eps, const Matrix<S>& d, const S& u) {
  const std::size_t n = c.rows();
  if (d.rows() != n || d.cols() != n) throw DimensionMismatch("metric does not match the cost rows");
  if (!definitely_positive<S>(u)) throw std::invalid_argument("Lipschitz bound must be positive");
  if (!definitely_positive<S>(eps)) throw std::invalid_argument("eps must be positive");
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = x + 1; z < n; ++z)
      for (std::size_t y = 0; y < c.cols(); ++y)
        if (!approx_le<S>(abs_value<S>(c(x, y) - c(z, y)), u * d(x, z)))
          throw LipschitzBoundViolated(x, z, "|c(" + std::to_string(x) + ",.) - c(" + std::to_string(z) +
                                                 ",.)| exceeds u d(x,z) at y=" + std::to_string(y));
  const S radius = eps / u;
  Partition p;
  std::vector<bool> assigned(n, false);
  std::vector<std::size_t> seeds;
  for (std::size_t placed = 0; placed < n;) {
    std::size_t seed = n;
    if (seeds.empty()) {
      seed = 0;
    } else {
      std::optional<S> far;
      for (std::size_t x = 0; x < n; ++x) {
        if (assigned[x]) continue;
        S near = d(x, seeds[0]);
        for (auto s : seeds) near = std::min<S>(near, d(x, s));
        if (!far || near > *far) far = near, seed = x;
      }
    }
    seeds.push_back(seed);
    std::vector<std::size_t> cell{seed};
    assigned[seed] = true;
    for (std::size_t x = 0; x < n; ++x) {
      if (assigned[x]) continue;
      bool fits = true;
      for (auto m : cell)
        if (!(d(x, m) < radius)) {
          fits = false;
          break;
        }
      if (fits) {
        cell.push_back(x);
        assigned[x] = true;
      }
    }
    placed += cell.size();
    std::sort(cell.begin(), cell.end());
    p.cells.push_back(SubsetMask::from_indices(n, cell));
    p.representatives.emplace_back(seed);
  }
  return p;
}

template <class S>
Partition find_star_partition(const CostMatrix<S>& c, const S& eps, const ProbabilitySpace<S>& space_x, const S& u) {
  return find_star_partition(c, eps, space_x.distance(), u);
}

/// h = c - (f + g) for a lower witness (f, g); h >= 0 by feasibility.
template <class S>
CostMatrix<S> normalize_cost(const CostMatrix<S>& c, const PotentialPair<S>& lower) {
  if (lower.f.size() != c.rows() || lower.g.size() != c.cols()) throw DimensionMismatch("potentials do not fit the cost");
  Matrix<S> h(c.rows(), c.cols());
  for (std::size_t x = 0; x < c.rows(); ++x)
    for (std::size_t y = 0; y < c.cols(); ++y) {
      h(x, y) = c(x, y) - lower.f[x] - lower.g[y];
      if (definitely_negative<S>(h(x, y)))
        throw InfeasibleWitness("f + g exceeds c at (" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
  return CostMatrix<S>(std::move(h));
}

/// Stages c_n = lipschitz_infconv(c, n) for the given parameters.
template <class S>
ApproximantSequence<S> infconv_sequence(const CostMatrix<S>& c, const Matrix<S>& d, const std::vector<S>& params,
                                        const std::optional<SubsetMask>& anchors = std::nullopt) {
  ApproximantSequence<S> seq{c, {}};
  for (const auto& n : params) seq.stages.push_back({n, lipschitz_infconv(c, n, d, anchors)});
  return seq;
}

/// 1, 2, 4, ..., 2^k with 2^k >= modulus (at least one stage).
template <class S>
std::vector<S> doubling_parameters(const S& modulus) {
  std::vector<S> out{S(1)};
  while (out.back() < modulus) out.push_back(out.back() * 2);
  return out;
}

template <class S>
struct LimitCheck {
  std::vector<S> stage_values;  // beta*(c_n)
  S base_value{0};              // beta*(c)
  S final_gap{0};               // beta*(c) - beta*(c_last)
  bool nondecreasing = true;
  bool reaches_base = false;    // last stage equals the base entrywise
  bool converged() const { return approx_eq<S>(final_gap, S(0)); }
};

template <class S>
bool entrywise_le(const Matrix<S>& a, const Matrix<S>& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!approx_le<S>(a.flat(k), b.flat(k))) return false;
  return true;
}

/// beta* along the stages. Throws NotMonotone unless c_1 <= c_2 <= ... <= c.
template <class S>
LimitCheck<S> beta_star_limit_check(const ApproximantSequence<S>& seq, const Weights<S>& mu, const Weights<S>& nu) {
  for (std::size_t k = 0; k < seq.stages.size(); ++k) {
    const auto& cur = seq.stages[k].cost.values;
    if (cur.rows() != seq.base_cost.rows() || cur.cols() != seq.base_cost.cols())
      throw DimensionMismatch("stage " + std::to_string(k) + " has the wrong shape");
    if (k + 1 < seq.stages.size() && !entrywise_le(cur, seq.stages[k + 1].cost.values))
      throw NotMonotone("stage " + std::to_string(k) + " exceeds stage " + std::to_string(k + 1));
    if (!entrywise_le(cur, seq.base_cost.values))
      throw NotMonotone("stage " + std::to_string(k) + " exceeds the base cost");
  }
  LimitCheck<S> out;
  for (const auto& st : seq.stages) {
    out.stage_values.push_back(solve_beta_star(st.cost, mu, nu).value);
    if (out.stage_values.size() > 1 &&
        !approx_le<S>(out.stage_values[out.stage_values.size() - 2], out.stage_values.back()))
      out.nondecreasing = false;
  }
  out.base_value = solve_beta_star(seq.base_cost, mu, nu).value;
  if (!out.stage_values.empty()) {
    out.final_gap = out.base_value - out.stage_values.back();
    out.reaches_base = seq.stages.back().cost.values == seq.base_cost.values;
    if (!approx_le<S>(out.stage_values.back(), out.base_value)) out.nondecreasing = false;
  }
  return out;
}

}  // namespace mkdual
