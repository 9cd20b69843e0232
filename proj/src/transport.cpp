#include "wgmf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wgmf {
namespace {

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("wasserstein: need p >= 1");
}

double pow_p(double d, double p) {
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  if (p == 4.0) return (d * d) * (d * d);
  return std::pow(d, p);
}

double root_p(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

double sq_dist(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t l = 0; l < u.size(); ++l) s += (u[l] - v[l]) * (u[l] - v[l]);
  return s;
}

}  // namespace

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.empty() || coords_.size() % dim_ != 0) {
    throw std::invalid_argument("point cloud: need n >= 1 points of dimension >= 1");
  }
  for (double v : coords_) {
    if (!std::isfinite(v)) throw std::invalid_argument("point cloud: non-finite coordinate");
  }
}

PointCloud PointCloud::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("point cloud: empty");
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw std::invalid_argument("point cloud: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return PointCloud(rows.front().size(), std::move(flat));
}

double wasserstein_1d(double p, const PointCloud& xs, const PointCloud& ys) {
  require_p(p);
  if (xs.dim() != 1 || ys.dim() != 1) throw std::invalid_argument("wasserstein_1d: need d = 1");
  if (xs.size() != ys.size()) throw std::invalid_argument("wasserstein_1d: size mismatch");
  std::vector<double> a(xs.coords().begin(), xs.coords().end());
  std::vector<double> b(ys.coords().begin(), ys.coords().end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += pow_p(std::abs(a[i] - b[i]), p);
  return root_p(s / static_cast<double>(a.size()), p);
}

std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n || n == 0) throw std::invalid_argument("assignment: need n×n costs");
  // Shortest augmenting path with row/column potentials (Hungarian method,
  // Jonker–Volgenant form). Arrays are 1-based; index 0 is the virtual column.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

double wasserstein_assignment(double p, const PointCloud& xs, const PointCloud& ys,
                              std::size_t cap) {
  require_p(p);
  if (xs.size() != ys.size() || xs.dim() != ys.dim()) {
    throw std::invalid_argument("wasserstein_assignment: size mismatch");
  }
  const std::size_t n = xs.size();
  if (n > cap) throw std::invalid_argument("wasserstein_assignment: cloud size exceeds cap");
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = pow_p(std::sqrt(sq_dist(xs.point(i), ys.point(j))), p);
    }
  }
  const auto assignment = solve_assignment(cost, n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost[i * n + assignment[i]];
  return root_p(total / static_cast<double>(n), p);
}

double joint_param_distance(const EnsemblePair& a, const EnsemblePair& b, double p) {
  require_p(p);
  if (!(a.dims() == b.dims()) || a.N() != b.N() || a.M() != b.M()) {
    throw std::invalid_argument("joint_param_distance: shape mismatch");
  }
  const auto& ga = a.generators();
  const auto& gb = b.generators();
  const auto& da = a.discriminators();
  const auto& db = b.discriminators();
  if (a.N() != a.M()) {
    if (p != 2.0) throw std::invalid_argument("joint_param_distance: N != M requires p = 2");
    double sg = 0.0;
    for (std::size_t i = 0; i < a.N(); ++i) sg += sq_dist(ga[i].values(), gb[i].values());
    double sd = 0.0;
    for (std::size_t i = 0; i < a.M(); ++i) sd += sq_dist(da[i].values(), db[i].values());
    return std::sqrt(sg / static_cast<double>(a.N()) + sd / static_cast<double>(a.M()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.N(); ++i) {
    const double e = sq_dist(ga[i].values(), gb[i].values()) + sq_dist(da[i].values(), db[i].values());
    s += p == 2.0 ? e : std::pow(e, p / 2.0);
  }
  return root_p(s / static_cast<double>(a.N()), p);
}

PointCloud joint_cloud(const EnsemblePair& e) {
  if (e.N() != e.M()) throw std::invalid_argument("joint_cloud: requires N = M");
  std::vector<double> flat;
  for (std::size_t i = 0; i < e.N(); ++i) {
    const auto g = e.generators()[i].values();
    const auto d = e.discriminators()[i].values();
    flat.insert(flat.end(), g.begin(), g.end());
    flat.insert(flat.end(), d.begin(), d.end());
  }
  return PointCloud(static_cast<std::size_t>(e.dims().generator_size() + e.dims().discriminator_size()),
                    std::move(flat));
}

PointCloud generator_cloud(const EnsemblePair& e) {
  std::vector<double> flat;
  for (const auto& g : e.generators()) flat.insert(flat.end(), g.values().begin(), g.values().end());
  return PointCloud(static_cast<std::size_t>(e.dims().generator_size()), std::move(flat));
}

PointCloud discriminator_cloud(const EnsemblePair& e) {
  std::vector<double> flat;
  for (const auto& d : e.discriminators()) flat.insert(flat.end(), d.values().begin(), d.values().end());
  return PointCloud(static_cast<std::size_t>(e.dims().discriminator_size()), std::move(flat));
}

}  // namespace wgmf
