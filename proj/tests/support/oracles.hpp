#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <tuple>
#include <vector>

// Independent reference computations used to freeze expected values in the tests.
namespace oracle {

using Edge = std::tuple<std::size_t, std::size_t, double>;

inline std::vector<double> floyd(std::size_t n, const std::vector<Edge>& edges) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(n * n, inf);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
  for (const auto& [a, b, len] : edges) {
    d[a * n + b] = std::min(d[a * n + b], len);
    d[b * n + a] = std::min(d[b * n + a], len);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

// Every simple path from x to y, by depth-first search over the edge list.
inline std::vector<std::vector<std::size_t>> simple_paths(std::size_t n, const std::vector<Edge>& edges,
                                                          std::size_t x, std::size_t y) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b, len] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> path{x};
  std::vector<char> seen(n, 0);
  seen[x] = 1;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (v == y) {
      out.push_back(path);
      return;
    }
    for (std::size_t w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = 1;
      path.push_back(w);
      walk(w);
      path.pop_back();
      seen[w] = 0;
    }
  };
  walk(x);
  return out;
}

// Solves A z = b for the columns in `cols` by Gaussian elimination. False when the
// columns are dependent or the system is inconsistent.
inline bool basic_solution(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                           const std::vector<std::size_t>& cols, std::vector<double>& z) {
  const std::size_t rows = a.size(), r = cols.size();
  std::vector<std::vector<double>> m(rows, std::vector<double>(r + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < r; ++j) m[i][j] = a[i][cols[j]];
    m[i][r] = b[i];
  }
  std::size_t row = 0;
  std::vector<std::size_t> pivot_row(r);
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t best = row;
    for (std::size_t i = row; i < rows; ++i)
      if (std::abs(m[i][c]) > std::abs(m[best][c])) best = i;
    if (best >= rows || std::abs(m[best][c]) < 1e-12) return false;
    std::swap(m[row], m[best]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row) continue;
      const double f = m[i][c] / m[row][c];
      for (std::size_t j = c; j <= r; ++j) m[i][j] -= f * m[row][j];
    }
    pivot_row[c] = row++;
  }
  for (std::size_t i = row; i < rows; ++i)
    if (std::abs(m[i][r]) > 1e-9) return false;
  z.assign(r, 0.0);
  for (std::size_t c = 0; c < r; ++c) z[c] = m[pivot_row[c]][r] / m[pivot_row[c]][c];
  return true;
}

// Minimum of the transport LP by enumerating every basis of m + n - 1 arcs.
inline double transport_lp(const std::vector<double>& supply, const std::vector<double>& demand,
                           const std::function<double(std::size_t, std::size_t)>& cost) {
  const std::size_t m = supply.size(), n = demand.size(), vars = m * n, r = m + n - 1;
  std::vector<std::vector<double>> a(m + n, std::vector<double>(vars, 0.0));
  std::vector<double> b;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][i * n + j] = 1.0;
    b.push_back(supply[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) a[m + j][i * n + j] = 1.0;
    b.push_back(demand[j]);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> pick(vars, 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(r), 1);
  std::sort(pick.begin(), pick.end());
  do {
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < vars; ++k)
      if (pick[k]) cols.push_back(k);
    std::vector<double> z;
    if (!basic_solution(a, b, cols, z)) continue;
    if (std::any_of(z.begin(), z.end(), [](double v) { return v < -1e-12; })) continue;
    double c = 0.0;
    for (std::size_t k = 0; k < r; ++k) c += z[k] * cost(cols[k] / n, cols[k] % n);
    best = std::min(best, c);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

// sin((1-t) a) / sin(a) from the Taylor series of both sines.
inline double sin_ratio_series(double a, double t) {
  auto series = [](double x) {
    double term = x, sum = x;
    for (int k = 1; k < 30; ++k) {
      term *= -x * x / static_cast<double>((2 * k) * (2 * k + 1));
      sum += term;
    }
    return sum;
  };
  return series((1.0 - t) * a) / series(a);
}

inline double great_circle(const std::array<double, 3>& p, const std::array<double, 3>& q) {
  const double dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
  const double cx = p[1] * q[2] - p[2] * q[1], cy = p[2] * q[0] - p[0] * q[2], cz = p[0] * q[1] - p[1] * q[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

}  // namespace oracle
