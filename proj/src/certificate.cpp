#include <algorithm>
#include <cmath>

#include "gensmooth/smoothness.hpp"

namespace gensmooth {

namespace {

constexpr std::size_t kMaxSelections = 256;

// Selects (member, set) pairs until no member mass reaches both eps and (2/eps) times the
// geometrically weighted mass of earlier picks, where a pick j steps back from step i with weight 2^(i-j).
ScaleRecord build_scale(const DistributionFamily& family, const std::vector<std::vector<double>>& masses, double eps,
                        double tol) {
  const std::size_t size = masses.front().size();
  ScaleRecord rec;
  rec.eps = eps;
  std::vector<double> weighted(size, 0.0);  // sum_j 2^(i-j) mu_j at the current step i
  while (true) {
    if (rec.selections.size() >= kMaxSelections) fail(ErrorCode::kCapacity, "certificate selection did not terminate");
    for (double& w : weighted) w *= 2.0;
    std::optional<Selection> found;
    for (std::size_t i = 0; i < family.size() && !found; ++i)
      for (std::size_t mask = 1; mask < size; ++mask) {
        const double m = masses[i][mask];
        if (m >= eps - tol && m >= 2.0 / eps * weighted[mask] - tol) {
          found = Selection{i, Subset{mask}};
          break;
        }
      }
    if (!found) break;
    rec.selections.push_back(*found);
    const auto& added = masses[found->member];
    for (std::size_t mask = 0; mask < size; ++mask) weighted[mask] += added[mask];
  }

  const std::size_t n = family.atom_count();
  rec.measure.assign(n, 0.0);
  if (rec.selections.empty()) {
    rec.fallback = true;
    const double share = 2.0 / eps / static_cast<double>(family.size());
    for (const auto& mu : family.members())
      for (std::size_t x = 0; x < n; ++x) rec.measure[x] += share * mu[x];
  } else {
    // The loop exited at step M+1, so weighted = sum_j 2^(M+1-j) mu_j.
    const auto last = rec.selections.size();
    for (std::size_t j = 0; j < last; ++j) {
      const double w = 2.0 / eps * std::ldexp(1.0, static_cast<int>(last - j));
      const auto& mu = family[rec.selections[j].member];
      for (std::size_t x = 0; x < n; ++x) rec.measure[x] += w * mu[x];
    }
  }
  for (double v : rec.measure) rec.raw_mass += v;
  return rec;
}

}  // namespace

CertificateConstruction construct_certificate(const DistributionFamily& family, std::span<const double> eps_sequence,
                                              double tol) {
  require(!eps_sequence.empty(), "scale sequence must be non-empty");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    require(eps_sequence[i] > 0.0 && eps_sequence[i] <= 1.0, "scales must lie in (0,1]");
    if (i > 0) require(eps_sequence[i] < eps_sequence[i - 1], "scales must be strictly decreasing");
  }
  if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "certificate construction limited to 20 atoms");

  std::vector<std::vector<double>> masses;
  for (const auto& mu : family.members()) masses.push_back(mu.subset_masses());

  const std::size_t n = family.atom_count();
  const std::size_t k = eps_sequence.size();
  CertificateConstruction out{SmoothnessCertificate{Distribution::uniform(n), ToleranceProfile({{1.0, 2.0}}), false, {}}, {}};
  std::vector<double> base(n, 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    auto rec = build_scale(family, masses, eps_sequence[i], tol);
    running = std::max(running, rec.raw_mass);
    rec.mass = running;
    rec.delta = rec.eps / (std::ldexp(1.0, static_cast<int>(i + 1)) * rec.mass);
    const double weight = std::ldexp(1.0, -static_cast<int>(i + 1)) / (1.0 - std::ldexp(1.0, -static_cast<int>(k)));
    for (std::size_t x = 0; x < n; ++x) base[x] += weight * rec.measure[x] / rec.raw_mass;
    out.scales.push_back(std::move(rec));
  }

  std::vector<ToleranceProfile::Breakpoint> steps;
  for (std::size_t i = k; i-- > 0;) steps.push_back({out.scales[i].delta, 2.0 * out.scales[i].eps});
  steps.push_back({1.0, 2.0});
  out.certificate = verify_certificate(family, Distribution(std::move(base)), ToleranceProfile(std::move(steps)), tol);
  return out;
}

std::optional<Subset> scale_violation(const DistributionFamily& family, const ScaleRecord& scale, double tol) {
  if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "exhaustive verification limited to 20 atoms");
  const auto env = envelope_table(family);
  std::vector<double> measure(env.size(), 0.0);
  for (std::size_t mask = 1; mask < env.size(); ++mask)
    measure[mask] = measure[mask & (mask - 1)] + scale.measure[static_cast<std::size_t>(std::countr_zero(mask))];
  for (std::size_t mask = 0; mask < env.size(); ++mask)
    if (env[mask] > scale.eps + measure[mask] + tol) return Subset{mask};
  return std::nullopt;
}

}  // namespace gensmooth
