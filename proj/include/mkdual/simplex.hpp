#pragma once

// Dense tableau simplex for  max c^T x  s.t.  A x <= b, x >= 0  with b >= 0,
// so the slack basis is feasible and no phase one is needed. Bland's rule.
// Small problems only; used as an independent route to Lipschitz-dual values.

#include <cstddef>
#include <optional>
#include <vector>

#include "mkdual/errors.hpp"
#include "mkdual/matrix.hpp"
#include "mkdual/scalar.hpp"

namespace mkdual {

enum class LpStatus { optimal, unbounded };

template <class S>
struct LpResult {
  LpStatus status = LpStatus::optimal;
  S value{0};
  std::vector<S> x;
  std::size_t pivots = 0;
};

template <class S>
LpResult<S> maximize_slack_form(const Matrix<S>& A, const std::vector<S>& b, const std::vector<S>& c) {
  const std::size_t m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw DimensionMismatch("LP data sizes disagree");
  for (const auto& v : b)
    if (definitely_negative<S>(v)) throw InfeasibleMarginals("slack-form LP needs b >= 0");

  // tableau rows 0..m-1 constraints, row m objective (reduced costs, negated)
  const std::size_t width = n + m + 1;
  Matrix<S> t(m + 1, width);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t(i, j) = A(i, j);
    t(i, n + i) = S(1);
    t(i, width - 1) = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) t(m, j) = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  LpResult<S> result;
  for (;;) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (definitely_negative<S>(t(m, j))) {
        enter = j;
        break;
      }
    if (!enter) break;
    std::optional<std::size_t> leave;
    S best_ratio(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!definitely_positive<S>(t(i, *enter))) continue;
      S ratio = t(i, width - 1) / t(i, *enter);
      const bool tie = leave && approx_eq<S>(ratio, best_ratio);
      if (!leave || (!tie && ratio < best_ratio) || (tie && basis[i] < basis[*leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (!leave) {
      result.status = LpStatus::unbounded;
      return result;
    }
    const std::size_t r = *leave, e = *enter;
    const S piv = t(r, e);
    for (std::size_t j = 0; j < width; ++j)
      if (t(r, j) != 0) t(r, j) /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t(i, e) == 0) continue;
      const S factor = t(i, e);
      for (std::size_t j = 0; j < width; ++j)
        if (t(r, j) != 0) t(i, j) -= factor * t(r, j);
    }
    basis[r] = e;
    ++result.pivots;
  }
  result.x.assign(n, S(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) result.x[basis[i]] = t(i, width - 1);
  result.value = t(m, width - 1);
  return result;
}

}  // namespace mkdual
