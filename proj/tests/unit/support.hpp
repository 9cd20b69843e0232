#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "wgmf/model.hpp"

namespace wgmf::test {

inline EnsemblePair make_pair(Dims d, const std::vector<std::vector<double>>& gens,
                              const std::vector<std::vector<double>>& discs) {
  std::vector<GeneratorParticle> g;
  for (const auto& v : gens) g.emplace_back(d, v);
  std::vector<DiscriminatorParticle> w;
  for (const auto& v : discs) w.emplace_back(d.K, v);
  return EnsemblePair(d, std::move(g), std::move(w));
}

// max_l |a_l - b_l| / max_l |b_l|
inline double rel_err(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    num = std::max(num, std::abs(a[l] - b[l]));
    den = std::max(den, std::abs(b[l]));
  }
  return den > 0.0 ? num / den : num;
}

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace wgmf::test
