#pragma once

#include <span>
#include <vector>

namespace wgmf {

/// Axis-aligned box ∏_l [lo_l, hi_l]. The discriminator parameter set Q is
/// `Box::unit(K + 2)`.
class Box {
 public:
  Box(std::vector<double> lo, std::vector<double> hi);
  static Box unit(int dim);

  std::size_t dim() const { return lo_.size(); }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// Euclidean diameter.
  double diameter() const;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

/// Points within this distance outside the box are snapped onto it before
/// tangent-cone computations; anything further out is rejected.
inline constexpr double kBoxTolerance = 1e-12;

/// Nearest point of Q (coordinate-wise clamp). Non-expansive and idempotent.
std::vector<double> project_box(const Box& box, std::span<const double> x);
void project_box_inplace(const Box& box, std::span<double> x);

/// Projection of V onto the tangent cone π_Q(ω).
///
/// Componentwise: V_l when ω_l is interior; at a face the outward part is
/// dropped, i.e. V_l (1 − sign(V_l ω_l)) / 2 on the unit box with sign(0) = 0.
/// Face membership is exact equality with the bound after snapping.
/// Throws std::domain_error if ω is outside Q by more than kBoxTolerance.
std::vector<double> project_tangent_cone(const Box& box, std::span<const double> omega,
                                         std::span<const double> V);

struct NormalDecomposition {
  std::vector<double> tangent;  // Proj_{π_Q(ω)} V
  std::vector<double> normal;   // V − tangent ∈ N_Q(ω)
};

/// V = tangent + normal with ⟨tangent, normal⟩ = 0 and normal in the normal
/// cone at ω.
NormalDecomposition normal_decompose(const Box& box, std::span<const double> omega,
                                     std::span<const double> V);

/// Number of coordinates of x lying exactly on a face of the box.
std::size_t count_pinned(const Box& box, std::span<const double> x);

}  // namespace wgmf
