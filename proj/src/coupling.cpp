#include "gensmooth/coupling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace gensmooth {

namespace {

CoupledStep assemble(const Distribution& mu_t, Subset kept, double bound, double dummy_bound) {
  const std::size_t n = mu_t.atom_count();
  std::vector<double> p(n + 1, 0.0);
  double dropped = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (kept.contains(x))
      p[x] = mu_t[x];
    else
      dropped += mu_t[x];
  }
  p[n] = dropped;
  return CoupledStep{kept, dropped, Distribution(std::move(p)), bound, dummy_bound};
}

}  // namespace

Distribution extended_base(const Distribution& mu0) {
  const std::size_t n = mu0.atom_count();
  require(n < kMaxAtoms, "no room for the dummy atom");
  std::vector<double> p(n + 1, 0.0);
  for (std::size_t x = 0; x < n; ++x) p[x] = 0.5 * mu0[x];
  p[n] = 0.5;
  return Distribution(std::move(p));
}

CoupledStep couple_step(const Distribution& mu_t, const Distribution& mu0, const ToleranceProfile& profile,
                        double eps) {
  require(mu_t.atom_count() == mu0.atom_count(), "distributions live on different spaces");
  require(mu_t.atom_count() < kMaxAtoms, "no room for the dummy atom");
  require(profile.well_behaved(), "coupling needs a well-behaved tolerance profile");
  require(eps > 0.0 && eps <= 1.0, "scale must lie in (0,1]");
  const double eta = profile(eps) / eps;
  Subset kept;
  for (std::size_t x = 0; x < mu_t.atom_count(); ++x)
    if (mu_t[x] <= eta * mu0[x]) kept = kept | Subset::singleton(x);
  return assemble(mu_t, kept, 2.0 * eta, 2.0);
}

CoupledStep couple_step_capped(const Distribution& mu_t, const Distribution& mu0, double eps, double eta) {
  require(mu_t.atom_count() == mu0.atom_count(), "distributions live on different spaces");
  require(mu_t.atom_count() < kMaxAtoms, "no room for the dummy atom");
  require(eps > 0.0 && eps <= 1.0, "scale must lie in (0,1]");
  require(eta > 0.0 && eta <= 1.0, "cap must lie in (0,1]");
  const double sigma = eta / eps;
  Subset kept;
  for (std::size_t x = 0; x < mu_t.atom_count(); ++x)
    if (mu_t[x] <= 2.0 * sigma * mu0[x] || mu0[x] > eps) kept = kept | Subset::singleton(x);
  return assemble(mu_t, kept, 4.0 / eps, 4.0 / eps);
}

RatioCheck coupled_ratios(const CoupledStep& step, const Distribution& mu0) {
  const auto base = extended_base(mu0);
  const std::size_t n = mu0.atom_count();
  RatioCheck out;
  for (std::size_t x = 0; x < n; ++x) {
    const double c = step.coupled_dist[x];
    if (c == 0.0) continue;
    out.real = std::max(out.real, base[x] > 0.0 ? c / base[x] : std::numeric_limits<double>::infinity());
  }
  out.dummy = step.coupled_dist[n] / base[n];
  return out;
}

Subset extract_small_set(const Distribution& mu, Subset a, double eps, double tol) {
  require(eps > 0.0, "scale must be positive");
  require(mu.mass(a) > eps, "set must carry more than eps");
  const auto atoms = a.atoms();
  for (std::size_t x : atoms) require(mu[x] <= eps + tol, "every atom must carry at most eps");
  for (std::size_t x : atoms)
    if (mu[x] > eps / 2.0 && mu[x] <= eps + tol) return Subset::singleton(x);
  auto order = atoms;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return mu[x] > mu[y]; });
  Subset out;
  double mass = 0.0;
  for (std::size_t x : order) {
    out = out | Subset::singleton(x);
    mass += mu[x];
    if (mass > eps / 2.0) break;
  }
  return out;
}

}  // namespace gensmooth
