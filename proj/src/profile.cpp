#include <algorithm>
#include <limits>
#include <numeric>

#include "gensmooth/smoothness.hpp"

namespace gensmooth {

ToleranceProfile::ToleranceProfile(std::vector<Breakpoint> breakpoints, bool lower_bound)
    : breakpoints_(std::move(breakpoints)), lower_bound_(lower_bound) {
  require(!breakpoints_.empty(), "profile needs at least one breakpoint");
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    const auto& b = breakpoints_[k];
    require(b.z >= 0.0 && b.z <= 1.0, "profile breakpoint outside [0,1]");
    require(b.value >= 0.0, "profile value must be non-negative");
    if (k > 0) {
      require(b.z > breakpoints_[k - 1].z, "profile breakpoints must be strictly ascending");
      require(b.value >= breakpoints_[k - 1].value, "profile values must be non-decreasing");
    }
  }
  well_behaved_ = true;
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    const auto& lo = breakpoints_[k - 1];
    const auto& hi = breakpoints_[k];
    if (lo.z <= 0.0) continue;
    // lo.value / lo.z >= hi.value / hi.z, cross-multiplied
    if (lo.value * hi.z < hi.value * lo.z - kMassTol) well_behaved_ = false;
  }
}

ToleranceProfile ToleranceProfile::sample(const std::function<double(double)>& rho, std::span<const double> grid) {
  std::vector<double> zs(grid.begin(), grid.end());
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  std::vector<Breakpoint> points;
  for (double z : zs) points.push_back({z, rho(z)});
  return ToleranceProfile(std::move(points));
}

double ToleranceProfile::operator()(double z) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), z,
                                   [](const Breakpoint& b, double v) { return b.z < v; });
  if (it == breakpoints_.end()) return std::max(breakpoints_.back().value, 1.0);
  return it->value;
}

std::optional<double> ToleranceProfile::inverse(double eps, double tol) const {
  std::optional<double> out;
  for (const auto& b : breakpoints_)
    if (b.value <= eps + tol) out = b.z;
  return out;
}

ToleranceProfile ToleranceProfile::ratio_regularized() const {
  std::vector<Breakpoint> out = breakpoints_;
  double ratio = 0.0;
  for (std::size_t k = out.size(); k-- > 0;) {
    if (out[k].z <= 0.0) continue;
    ratio = std::max(ratio, out[k].value / out[k].z);
    out[k].value = std::max(out[k].value, ratio * out[k].z);
  }
  // Rounding in ratio * z can break monotonicity by an ulp.
  for (std::size_t k = 1; k < out.size(); ++k) out[k].value = std::max(out[k].value, out[k - 1].value);
  return ToleranceProfile(std::move(out), lower_bound_);
}

namespace {

double greedy_profile_value(const Distribution& mu, const Distribution& mu0, double eps, double tol) {
  std::vector<std::size_t> order(mu.atom_count());
  std::iota(order.begin(), order.end(), 0);
  const auto density = [&](std::size_t x) {
    if (mu0[x] > 0.0) return mu[x] / mu0[x];
    return mu[x] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return density(a) > density(b); });
  double base = 0.0, gained = 0.0;
  for (std::size_t x : order) {
    if (base + mu0[x] <= eps + tol) {
      base += mu0[x];
      gained += mu[x];
    }
  }
  return gained;
}

}  // namespace

ToleranceProfile tolerance_profile(const DistributionFamily& family, const Distribution& mu0,
                                   std::span<const double> grid, SearchMode mode, double tol) {
  require(mu0.atom_count() == family.atom_count(), "base measure and family live on different spaces");
  std::vector<double> zs(grid.begin(), grid.end());
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  require(!zs.empty() && zs.front() >= 0.0 && zs.back() <= 1.0, "profile grid must lie in [0,1]");

  std::vector<ToleranceProfile::Breakpoint> points;
  if (mode == SearchMode::kExact) {
    if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "exact profile limited to 20 atoms");
    const auto base = mu0.subset_masses();
    const auto env = envelope_table(family);
    std::vector<std::size_t> order(base.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return base[a] < base[b]; });
    std::size_t cursor = 0;
    double running = 0.0;
    for (double z : zs) {
      while (cursor < order.size() && base[order[cursor]] <= z + tol) running = std::max(running, env[order[cursor++]]);
      points.push_back({z, running});
    }
    return ToleranceProfile(std::move(points));
  }
  double running = 0.0;
  for (double z : zs) {
    for (const auto& mu : family.members()) running = std::max(running, greedy_profile_value(mu, mu0, z, tol));
    points.push_back({z, running});
  }
  return ToleranceProfile(std::move(points), true);
}

SmoothnessCertificate verify_certificate(const DistributionFamily& family, const Distribution& mu0,
                                         const ToleranceProfile& profile, double tol) {
  require(mu0.atom_count() == family.atom_count(), "base measure and family live on different spaces");
  if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "exhaustive verification limited to 20 atoms");
  const auto base = mu0.subset_masses();
  const auto env = envelope_table(family);
  SmoothnessCertificate cert{mu0, profile, true, std::nullopt};
  for (std::size_t mask = 0; mask < base.size(); ++mask) {
    if (env[mask] > profile(base[mask]) + tol) {
      cert.verified = false;
      cert.witness = Subset{mask};
      break;
    }
  }
  return cert;
}

bool verify_small_set_bound(const DistributionFamily& family, const Distribution& mu0, double eps, double cap,
                            double tol) {
  require(mu0.atom_count() == family.atom_count(), "base measure and family live on different spaces");
  if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "exhaustive verification limited to 20 atoms");
  const auto base = mu0.subset_masses();
  const auto env = envelope_table(family);
  for (std::size_t mask = 0; mask < base.size(); ++mask)
    if (base[mask] <= eps + tol && env[mask] > cap + tol) return false;
  return true;
}

}  // namespace gensmooth
