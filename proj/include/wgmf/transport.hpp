#pragma once

#include <span>
#include <vector>

#include "wgmf/model.hpp"

namespace wgmf {

/// n points in ℝ^d with uniform weights 1/n, stored row-major.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> coords);
  static PointCloud from_rows(const std::vector<std::vector<double>>& rows);
  static PointCloud line(std::vector<double> xs) { return PointCloud(1, std::move(xs)); }

  std::size_t size() const { return coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<const double> coords() const { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Default cap on the cloud size accepted by the cubic assignment solver.
inline constexpr std::size_t kAssignmentCap = 512;

/// Exact d_p between two equal-size uniform clouds on the line: sorted matching.
double wasserstein_1d(double p, const PointCloud& xs, const PointCloud& ys);

/// Minimum-cost perfect matching of a square cost matrix (row-major, n×n).
/// Returns `assignment[i]` = column matched to row i.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

/// Exact d_p between equal-size uniform clouds via the optimal assignment on
/// the cost matrix |x_i − y_j|^p.
double wasserstein_assignment(double p, const PointCloud& xs, const PointCloud& ys,
                              std::size_t cap = kAssignmentCap);

/// Indexed (identity) coupling cost in the joint parameter space:
/// (mean_i (|θ_i^a − θ_i^b|² + |ω_i^a − ω_i^b|²)^{p/2})^{1/p}.
///
/// When N ≠ M only p = 2 is defined and the two clouds contribute additively:
/// mean_i |θ_i^a − θ_i^b|² + mean_k |ω_k^a − ω_k^b|².
double joint_param_distance(const EnsemblePair& a, const EnsemblePair& b, double p);

/// Flattened per-index points (θ_i, ω_i); requires N = M.
PointCloud joint_cloud(const EnsemblePair& e);
PointCloud generator_cloud(const EnsemblePair& e);
PointCloud discriminator_cloud(const EnsemblePair& e);

}  // namespace wgmf
