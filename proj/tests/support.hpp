#pragma once

// Random instance generators and brute-force oracles shared by the unit and
// acceptance suites. Everything here is independent of the solver code paths
// it is used to check.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mkdual/mkdual.hpp"

namespace mkdual::testing {

using Rng = std::mt19937_64;

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Rational weights k_i / sum k. With allow_zero some points get weight 0.
inline Weights<Rational> random_weights(Rng& rng, std::size_t n, bool allow_zero = false) {
  std::vector<std::int64_t> k(n);
  std::int64_t sum = 0;
  for (auto& v : k) {
    v = uniform_int(rng, allow_zero ? 0 : 1, 9);
    sum += v;
  }
  if (sum == 0) k[0] = sum = 1;
  Weights<Rational> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = Rational(k[i], sum);
  return w;
}

/// Entries p/q with |p| <= range, q in 1..max_den.
inline Matrix<Rational> random_matrix(Rng& rng, std::size_t r, std::size_t c, std::int64_t range = 10,
                                      std::int64_t max_den = 4) {
  Matrix<Rational> m(r, c);
  for (std::size_t k = 0; k < m.size(); ++k)
    m.flat(k) = Rational(uniform_int(rng, -range, range), uniform_int(rng, 1, max_den));
  return m;
}

/// Shortest-path repaired random nonnegative matrix (integer distances
/// 1..max_step before repair).
inline Matrix<Rational> random_metric(Rng& rng, std::size_t n, std::int64_t max_step = 9) {
  Matrix<Rational> raw(n, n);
  for (std::size_t k = 0; k < raw.size(); ++k) raw.flat(k) = Rational(uniform_int(rng, 1, max_step));
  return shortest_path_closure(raw);
}

inline std::vector<double> to_double_vec(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

inline Matrix<double> to_double_mat(const Matrix<Rational>& m) {
  Matrix<double> out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.size(); ++k) out.flat(k) = to_double(m.flat(k));
  return out;
}

/// Random family of `count` rectangles with nonempty sides.
inline RectangleFamily random_family(Rng& rng, std::size_t nx, std::size_t ny, std::size_t count) {
  RectangleFamily fam(nx, ny);
  for (std::size_t k = 0; k < count; ++k) {
    Rectangle r{SubsetMask(nx), SubsetMask(ny)};
    for (std::size_t x = 0; x < nx; ++x) r.a.set(x, rng() % 3 == 0);
    for (std::size_t y = 0; y < ny; ++y) r.b.set(y, rng() % 3 == 0);
    if (r.a.none()) r.a.set(rng() % nx);
    if (r.b.none()) r.b.set(rng() % ny);
    fam.rects.push_back(r);
  }
  return fam;
}

/// min mu(a) + nu(b) over all 2^(|X|+|Y|) pairs that cover `cells`.
template <class S>
S brute_force_cover_value(const std::vector<bool>& cells, const Weights<S>& mu, const Weights<S>& nu) {
  const std::size_t nx = mu.size(), ny = nu.size();
  std::optional<S> best;
  for (std::uint64_t am = 0; am < (1ULL << nx); ++am)
    for (std::uint64_t bm = 0; bm < (1ULL << ny); ++bm) {
      bool ok = true;
      for (std::size_t k = 0; k < cells.size() && ok; ++k)
        if (cells[k] && !((am >> (k / ny)) & 1) && !((bm >> (k % ny)) & 1)) ok = false;
      if (!ok) continue;
      S v(0);
      for (std::size_t x = 0; x < nx; ++x)
        if ((am >> x) & 1) v += mu[x];
      for (std::size_t y = 0; y < ny; ++y)
        if ((bm >> y) & 1) v += nu[y];
      if (!best || v < *best) best = v;
    }
  return *best;
}

/// Direct definition of the infimal convolution (anchors = all points),
/// written without the library helper.
inline Matrix<Rational> naive_infconv(const Matrix<Rational>& c, const Rational& n, const Matrix<Rational>& d) {
  Matrix<Rational> out(c.rows(), c.cols());
  for (std::size_t x = 0; x < c.rows(); ++x)
    for (std::size_t y = 0; y < c.cols(); ++y) {
      std::optional<Rational> best;
      for (std::size_t z = 0; z < c.rows(); ++z) {
        Rational v = n * d(x, z) + c(z, y);
        if (!best || v < *best) best = v;
      }
      out(x, y) = *best;
    }
  return out;
}

}  // namespace mkdual::testing
