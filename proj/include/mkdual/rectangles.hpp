#pragma once

// Indicator costs of rectangle families H = U_k (A_k x B_k) and their duals.
// For c = 1_H the upper dual beta*(H) is attained by a cover
// H ⊆ (A x Y) ∪ (X x B) of least mu(A) + nu(B); that is a minimum weighted
// vertex cover of the bipartite graph with edges H, found here by a
// min s-t cut.

#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/measure.hpp"
#include "mkdual/transport.hpp"

namespace mkdual {

struct Rectangle {
  SubsetMask a;  // on X
  SubsetMask b;  // on Y
  bool operator==(const Rectangle&) const = default;
};

/// Ordered finite family of rectangles. Union H and intersection K are
/// derived on demand.
struct RectangleFamily {
  std::size_t x_size = 0;
  std::size_t y_size = 0;
  std::vector<Rectangle> rects;

  RectangleFamily() = default;
  RectangleFamily(std::size_t nx, std::size_t ny, std::vector<Rectangle> r = {})
      : x_size(nx), y_size(ny), rects(std::move(r)) {
    for (const auto& rect : rects)
      if (rect.a.size() != nx || rect.b.size() != ny) throw DimensionMismatch("rectangle masks sized to the wrong spaces");
  }

  void add(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    rects.push_back({SubsetMask::from_indices(x_size, a), SubsetMask::from_indices(y_size, b)});
  }

  /// First n rectangles only.
  RectangleFamily prefix(std::size_t n) const {
    RectangleFamily out(x_size, y_size);
    out.rects.assign(rects.begin(), rects.begin() + static_cast<std::ptrdiff_t>(std::min(n, rects.size())));
    return out;
  }

  std::vector<SubsetMask> x_sides() const {
    std::vector<SubsetMask> out;
    for (const auto& r : rects) out.push_back(r.a);
    return out;
  }

  bool operator==(const RectangleFamily&) const = default;
};

enum class SetMode { union_of, intersection_of };

/// Row-major membership of every cell in H (union) or K (intersection).
/// The intersection over an empty family is the whole space.
inline std::vector<bool> membership(const RectangleFamily& fam, SetMode mode) {
  const std::size_t nx = fam.x_size, ny = fam.y_size;
  std::vector<bool> in(nx * ny, mode == SetMode::intersection_of);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      bool v = mode == SetMode::intersection_of;
      for (const auto& r : fam.rects) {
        const bool hit = r.a[x] && r.b[y];
        if (mode == SetMode::union_of && hit) {
          v = true;
          break;
        }
        if (mode == SetMode::intersection_of && !hit) {
          v = false;
          break;
        }
      }
      in[x * ny + y] = v;
    }
  return in;
}

template <class S>
CostMatrix<S> indicator_of(const std::vector<bool>& cells, std::size_t nx, std::size_t ny) {
  Matrix<S> m(nx, ny);
  for (std::size_t k = 0; k < nx * ny; ++k) m.flat(k) = cells[k] ? S(1) : S(0);
  return CostMatrix<S>(std::move(m));
}

template <class S>
CostMatrix<S> indicator_cost(const RectangleFamily& fam, SetMode mode = SetMode::union_of) {
  return indicator_of<S>(membership(fam, mode), fam.x_size, fam.y_size);
}

template <class S>
struct Cover {
  SubsetMask a;
  SubsetMask b;
  S value{0};
};

/// True when every cell of `cells` lies in (a x Y) ∪ (X x b).
inline bool covers(const SubsetMask& a, const SubsetMask& b, const std::vector<bool>& cells) {
  const std::size_t ny = b.size();
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k] && !a[k / ny] && !b[k % ny]) return false;
  return true;
}

namespace detail {

/// Edmonds-Karp on a small dense-ish graph. Arcs flagged `infinite` never
/// saturate.
template <class S>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

  void add_arc(std::size_t from, std::size_t to, const S& cap, bool infinite = false) {
    adj_[from].push_back(arcs_.size());
    arcs_.push_back({to, cap, S(0), infinite});
    adj_[to].push_back(arcs_.size());
    arcs_.push_back({from, S(0), S(0), false});
  }

  S run(std::size_t s, std::size_t t) {
    S total(0);
    for (;;) {
      std::vector<std::size_t> via(adj_.size(), kNone);
      std::queue<std::size_t> q;
      q.push(s);
      via[s] = kNone - 1;
      while (!q.empty() && via[t] == kNone) {
        auto a = q.front();
        q.pop();
        for (auto e : adj_[a])
          if (via[arcs_[e].to] == kNone && has_room(e)) {
            via[arcs_[e].to] = e;
            q.push(arcs_[e].to);
          }
      }
      if (via[t] == kNone) return total;
      std::optional<S> push;
      for (auto v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        const auto e = via[v];
        if (arcs_[e].infinite) continue;
        S room = arcs_[e].cap - arcs_[e].flow;
        if (!push || room < *push) push = room;
      }
      // an all-infinite path cannot exist: source and sink arcs are finite
      for (auto v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].flow += *push;
        arcs_[via[v] ^ 1].flow -= *push;
      }
      total += *push;
    }
  }

  /// Nodes reachable from s in the residual graph after run().
  std::vector<bool> source_side(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
      auto a = q.front();
      q.pop();
      for (auto e : adj_[a])
        if (!seen[arcs_[e].to] && has_room(e)) {
          seen[arcs_[e].to] = true;
          q.push(arcs_[e].to);
        }
    }
    return seen;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Arc {
    std::size_t to;
    S cap;
    S flow;
    bool infinite;
  };
  bool has_room(std::size_t e) const {
    return arcs_[e].infinite || definitely_positive<S>(S(arcs_[e].cap - arcs_[e].flow));
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace detail

/// Least mu(a) + nu(b) over covers of the given cells.
template <class S>
Cover<S> min_cover_of(const std::vector<bool>& cells, const Weights<S>& mu, const Weights<S>& nu) {
  const std::size_t nx = mu.size(), ny = nu.size();
  if (cells.size() != nx * ny) throw DimensionMismatch("cell mask does not match marginals");
  const std::size_t source = nx + ny, sink = nx + ny + 1;
  detail::MaxFlow<S> net(nx + ny + 2);
  for (std::size_t x = 0; x < nx; ++x) net.add_arc(source, x, mu[x]);
  for (std::size_t y = 0; y < ny; ++y) net.add_arc(nx + y, sink, nu[y]);
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k]) net.add_arc(k / ny, nx + k % ny, S(0), true);
  net.run(source, sink);
  auto reach = net.source_side(source);
  Cover<S> cover{SubsetMask(nx), SubsetMask(ny), S(0)};
  for (std::size_t x = 0; x < nx; ++x)
    if (!reach[x]) cover.a.set(x);
  for (std::size_t y = 0; y < ny; ++y)
    if (reach[nx + y]) cover.b.set(y);
  cover.value = mass(mu, cover.a) + mass(nu, cover.b);
  return cover;
}

template <class S>
Cover<S> min_cover(const RectangleFamily& fam, const Weights<S>& mu, const Weights<S>& nu) {
  if (mu.size() != fam.x_size || nu.size() != fam.y_size) throw DimensionMismatch("family does not match marginals");
  return min_cover_of(membership(fam, SetMode::union_of), mu, nu);
}

/// Positive answer: a cover by null sets. Otherwise the value alpha*(H) > 0
/// with a coupling attaining it.
template <class S>
struct NotNull {
  S alpha_star{0};
  Coupling<S> coupling;
};

template <class S>
using ArvesonResult = std::variant<Cover<S>, NotNull<S>>;

template <class S>
ArvesonResult<S> arveson_witness(const RectangleFamily& fam, const Weights<S>& mu, const Weights<S>& nu) {
  auto top = solve_alpha_star(indicator_cost<S>(fam), mu, nu);
  if (approx_eq<S>(top.value, S(0))) return min_cover(fam, mu, nu);
  return NotNull<S>{top.value, *top.coupling};
}

template <class S>
struct TruncationReport {
  std::size_t n = 0;
  S alpha_full{0};    // alpha(1_H)
  S beta_full{0};     // beta(1_H)
  S alpha_prefix{0};  // alpha(1_{V_n})
  S beta_prefix{0};   // beta(1_{V_n})
  S tail_mass{0};     // mu(U_{i>n} A_i)
  S bound{0};         // beta(V_n) + tail + (alpha(V_n) - beta(V_n))
  bool certified = false;         // alpha(H) <= bound
  bool tail_below_eps = false;    // tail < eps
  bool within_two_eps = false;    // alpha(H) <= beta(H) + 2 eps
};

/// V_n is the union of the first n rectangles (0 <= n <= family size), the
/// tail is the union of the x-sides of the remaining ones.
template <class S>
TruncationReport<S> truncation_duality(const RectangleFamily& fam, const Weights<S>& mu, const Weights<S>& nu,
                                       std::size_t n, const S& eps) {
  if (n > fam.rects.size()) throw IndexOutOfRange("truncation index exceeds the family size");
  TruncationReport<S> r;
  r.n = n;
  const auto full = indicator_cost<S>(fam);
  const auto prefix = indicator_cost<S>(fam.prefix(n));
  r.alpha_full = solve_alpha(full, mu, nu).value;
  r.beta_full = solve_beta(full, mu, nu).value;
  r.alpha_prefix = solve_alpha(prefix, mu, nu).value;
  r.beta_prefix = solve_beta(prefix, mu, nu).value;
  r.tail_mass = n < fam.rects.size() ? limsup_mass(mu, fam.x_sides(), n) : S(0);
  r.bound = r.beta_prefix + r.tail_mass + (r.alpha_prefix - r.beta_prefix);
  r.certified = approx_le<S>(r.alpha_full, r.bound);
  r.tail_below_eps = r.tail_mass < eps;
  r.within_two_eps = approx_le<S>(r.alpha_full, S(r.beta_full + 2 * eps));
  return r;
}

}  // namespace mkdual
