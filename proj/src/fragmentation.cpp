#include <algorithm>
#include <numeric>

#include "gensmooth/smoothness.hpp"

namespace gensmooth {

namespace {

FragmentationWitness exact_fragmentation(const DistributionFamily& family, double eps, double tol) {
  const std::size_t n = family.atom_count();
  if (n > kPackingCutoff) fail(ErrorCode::kCapacity, "exact fragmentation limited to 15 atoms");
  const auto env = envelope_table(family);
  const std::size_t size = std::size_t{1} << n;
  std::vector<std::uint8_t> best(size, 0);
  std::vector<std::uint32_t> choice(size, 0);  // part containing the lowest atom, 0 when that atom is left unused
  for (std::size_t s = 1; s < size; ++s) {
    const std::size_t low = s & (~s + 1);
    const std::size_t rest = s ^ low;
    int top = best[rest];
    std::uint32_t pick = 0;
    for (std::size_t b = rest;; b = (b - 1) & rest) {
      const std::size_t a = b | low;
      if (env[a] >= eps - tol) {
        const int cand = 1 + best[s ^ a];
        if (cand > top || (cand == top && pick != 0 && a < pick)) {
          top = cand;
          pick = static_cast<std::uint32_t>(a);
        }
      }
      if (b == 0) break;
    }
    best[s] = static_cast<std::uint8_t>(top);
    choice[s] = pick;
  }
  FragmentationWitness out;
  for (std::size_t s = size - 1; s != 0;) {
    const std::size_t low = s & (~s + 1);
    if (choice[s] == 0) {
      s ^= low;
      continue;
    }
    const Subset part{choice[s]};
    out.parts.push_back(part);
    out.witnesses.push_back(envelope_mass(family, part).member);
    s ^= choice[s];
  }
  out.count = out.parts.size();
  return out;
}

FragmentationWitness greedy_fragmentation(const DistributionFamily& family, double eps, double tol) {
  const std::size_t n = family.atom_count();
  FragmentationWitness out;
  out.lower_bound = true;
  Subset remaining = Subset::full(n);
  while (true) {
    std::optional<Subset> best;
    std::size_t best_member = 0;
    double best_mass = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto& mu = family[i];
      auto atoms = remaining.atoms();
      std::stable_sort(atoms.begin(), atoms.end(), [&](std::size_t a, std::size_t b) { return mu[a] > mu[b]; });
      Subset part;
      double mass = 0.0;
      for (std::size_t x : atoms) {
        if (mass >= eps - tol) break;
        part = part | Subset::singleton(x);
        mass += mu[x];
      }
      if (mass < eps - tol) continue;
      if (!best || part.size() < best->size() || (part.size() == best->size() && mass < best_mass)) {
        best = part;
        best_member = i;
        best_mass = mass;
      }
    }
    if (!best) break;
    out.parts.push_back(*best);
    out.witnesses.push_back(best_member);
    remaining = remaining - *best;
  }
  out.count = out.parts.size();
  return out;
}

}  // namespace

FragmentationWitness fragmentation_number(const DistributionFamily& family, double eps, SearchMode mode, double tol) {
  require(eps > 0.0, "fragmentation scale must be positive");
  return mode == SearchMode::kExact ? exact_fragmentation(family, eps, tol) : greedy_fragmentation(family, eps, tol);
}

ScaledBase construct_scaled_base(const DistributionFamily& family, double eps, double tol) {
  require(eps > 0.0 && eps <= 1.0, "scale must lie in (0,1]");
  const std::size_t n = family.atom_count();
  const std::size_t fragments = fragmentation_number(family, eps, SearchMode::kExact, tol).count;

  std::vector<std::vector<double>> masses;
  for (const auto& mu : family.members()) masses.push_back(mu.subset_masses());
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> accumulated(size, 0.0);
  std::vector<Selection> selections;

  if (fragments > 0) {
    const double budget = eps / static_cast<double>(fragments);
    while (true) {
      if (selections.size() > fragments) fail(ErrorCode::kCapacity, "scaled-base selection exceeded its iteration bound");
      std::optional<Selection> found;
      for (std::size_t i = 0; i < family.size() && !found; ++i)
        for (std::size_t mask = 1; mask < size; ++mask)
          if (accumulated[mask] <= budget + tol && masses[i][mask] >= 2.0 * eps - tol) {
            found = Selection{i, Subset{mask}};
            break;
          }
      if (!found) break;
      selections.push_back(*found);
      const auto& added = masses[found->member];
      for (std::size_t mask = 0; mask < size; ++mask) accumulated[mask] += added[mask];
    }
  }

  std::vector<double> weights(family.size(), 0.0);
  const bool fallback = selections.empty();
  if (fallback) {
    std::fill(weights.begin(), weights.end(), 1.0);
  } else {
    for (const auto& s : selections) weights[s.member] += 1.0;
  }
  ScaledBase out{Distribution::mixture(family.members(), weights), std::move(selections), fragments, fallback,
                 false, std::nullopt};
  out.witness = scaled_base_violation(family, out.base, eps, fragments, tol);
  out.verified = !out.witness.has_value();
  return out;
}

std::optional<Subset> scaled_base_violation(const DistributionFamily& family, const Distribution& base, double eps,
                                            std::size_t fragmentation, double tol) {
  if (family.atom_count() > kExhaustiveCutoff) fail(ErrorCode::kCapacity, "exhaustive verification limited to 20 atoms");
  const auto masses = base.subset_masses();
  const auto env = envelope_table(family);
  const double n = static_cast<double>(std::max<std::size_t>(fragmentation, 1));
  const double small = eps / (n * n) + tol / n;
  for (std::size_t mask = 0; mask < masses.size(); ++mask)
    if (masses[mask] <= small && env[mask] > 2.0 * eps + tol) return Subset{mask};
  return std::nullopt;
}

TuranSelection turan_refine(std::span<const Subset> sets, std::span<const Distribution> dists, double eps,
                            double delta, double tol) {
  require(sets.size() == dists.size(), "sets and distributions must match");
  const std::size_t count = sets.size();
  for (std::size_t i = 0; i < count; ++i) {
    require(dists[i].mass(sets[i]) >= eps - tol, "each distribution must carry eps on its own set");
    for (std::size_t j = i + 1; j < count; ++j) require(sets[i].disjoint(sets[j]), "sets must be pairwise disjoint");
  }
  std::vector<std::vector<char>> edge(count, std::vector<char>(count, 0));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = i + 1; j < count; ++j)
      if (dists[i].mass(sets[j]) >= delta - tol || dists[j].mass(sets[i]) >= delta - tol) edge[i][j] = edge[j][i] = 1;

  std::vector<char> alive(count, 1);
  TuranSelection out;
  while (true) {
    std::optional<std::size_t> pick;
    std::size_t pick_degree = 0;
    for (std::size_t i = 0; i < count; ++i) {
      if (!alive[i]) continue;
      std::size_t degree = 0;
      for (std::size_t j = 0; j < count; ++j) degree += alive[j] && edge[i][j];
      if (!pick || degree < pick_degree) {
        pick = i;
        pick_degree = degree;
      }
    }
    if (!pick) break;
    out.indices.push_back(*pick);
    alive[*pick] = 0;
    for (std::size_t j = 0; j < count; ++j)
      if (edge[*pick][j]) alive[j] = 0;
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.verified = true;
  for (std::size_t a : out.indices)
    for (std::size_t b : out.indices)
      if (a != b && dists[a].mass(sets[b]) >= delta - tol) out.verified = false;
  return out;
}

}  // namespace gensmooth
