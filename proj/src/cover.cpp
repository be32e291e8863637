#include <algorithm>
#include <limits>

#include "gensmooth/measure.hpp"

namespace gensmooth {

Cover build_uniform_cover(const HypothesisFamily& h, const Distribution& mu0, double delta) {
  require(delta >= 0.0 && delta <= 1.0, "cover radius must lie in [0,1]");
  require(mu0.atom_count() == h.atom_count(), "base measure and hypotheses live on different spaces");
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const bool covered = std::any_of(picked.begin(), picked.end(),
                                     [&](std::size_t j) { return mu0.mass(h[i] ^ h[j]) <= delta; });
    if (!covered) picked.push_back(i);
  }
  CoverRecord record;
  record.indices = picked;
  for (Subset f : h.members()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j : picked) nearest = std::min(nearest, mu0.mass(f ^ h[j]));
    record.max_residual = std::max(record.max_residual, nearest);
  }
  record.verified = record.max_residual <= delta;
  std::vector<Subset> members;
  for (std::size_t j : picked) members.push_back(h[j]);
  return Cover{HypothesisFamily(h.atom_count(), std::move(members)), std::move(record)};
}

HypothesisFamily max_packing(const HypothesisFamily& h, const DistributionFamily& family, double eps, double tol) {
  require(eps > 0.0, "packing radius must be positive");
  require(family.atom_count() == h.atom_count(), "family and hypotheses live on different spaces");
  std::vector<Subset> kept;
  for (Subset f : h.members()) {
    const bool separated = std::all_of(kept.begin(), kept.end(), [&](Subset g) {
      return envelope_mass(family, f ^ g).mass >= eps - tol;
    });
    if (separated) kept.push_back(f);
  }
  return HypothesisFamily(h.atom_count(), std::move(kept));
}

}  // namespace gensmooth
