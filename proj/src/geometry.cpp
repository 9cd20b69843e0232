#include "wgmf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wgmf {

Box::Box(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.empty()) {
    throw std::invalid_argument("box: bounds must have equal, nonzero length");
  }
  for (std::size_t l = 0; l < lo_.size(); ++l) {
    if (!(lo_[l] < hi_[l])) throw std::invalid_argument("box: need lo < hi in every coordinate");
  }
}

Box Box::unit(int dim) {
  if (dim < 1) throw std::invalid_argument("box: dimension must be >= 1");
  return Box(std::vector<double>(static_cast<std::size_t>(dim), -1.0),
             std::vector<double>(static_cast<std::size_t>(dim), 1.0));
}

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim()) return false;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (!(x[l] >= lo_[l] - tol && x[l] <= hi_[l] + tol)) return false;
  }
  return true;
}

double Box::diameter() const {
  double s = 0.0;
  for (std::size_t l = 0; l < dim(); ++l) s += (hi_[l] - lo_[l]) * (hi_[l] - lo_[l]);
  return std::sqrt(s);
}

std::vector<double> project_box(const Box& box, std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  project_box_inplace(box, out);
  return out;
}

void project_box_inplace(const Box& box, std::span<double> x) {
  if (x.size() != box.dim()) throw std::invalid_argument("project_box: dimension mismatch");
  for (std::size_t l = 0; l < x.size(); ++l) x[l] = std::clamp(x[l], box.lo()[l], box.hi()[l]);
}

namespace {

enum class Face { interior, lower, upper };

std::vector<Face> classify(const Box& box, std::span<const double> omega) {
  if (omega.size() != box.dim()) throw std::invalid_argument("tangent cone: dimension mismatch");
  if (!box.contains(omega, kBoxTolerance)) {
    throw std::domain_error("tangent cone: base point outside the box");
  }
  std::vector<Face> faces(omega.size());
  for (std::size_t l = 0; l < omega.size(); ++l) {
    const double w = std::clamp(omega[l], box.lo()[l], box.hi()[l]);
    faces[l] = w == box.hi()[l] ? Face::upper : (w == box.lo()[l] ? Face::lower : Face::interior);
  }
  return faces;
}

}  // namespace

std::vector<double> project_tangent_cone(const Box& box, std::span<const double> omega,
                                         std::span<const double> V) {
  const auto faces = classify(box, omega);
  if (V.size() != box.dim()) throw std::invalid_argument("tangent cone: dimension mismatch");
  std::vector<double> out(V.begin(), V.end());
  for (std::size_t l = 0; l < out.size(); ++l) {
    if ((faces[l] == Face::upper && out[l] > 0.0) || (faces[l] == Face::lower && out[l] < 0.0)) {
      out[l] = 0.0;
    }
  }
  return out;
}

NormalDecomposition normal_decompose(const Box& box, std::span<const double> omega,
                                     std::span<const double> V) {
  NormalDecomposition d;
  d.tangent = project_tangent_cone(box, omega, V);
  d.normal.resize(V.size());
  for (std::size_t l = 0; l < V.size(); ++l) d.normal[l] = V[l] - d.tangent[l];
  return d;
}

std::size_t count_pinned(const Box& box, std::span<const double> x) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (x[l] == box.lo()[l] || x[l] == box.hi()[l]) ++n;
  }
  return n;
}

}  // namespace wgmf
