#include "gensmooth/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace gensmooth {

std::vector<std::size_t> Subset::atoms() const {
  std::vector<std::size_t> out;
  for (std::uint64_t m = mask; m != 0; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

namespace {

void check_atom_count(std::size_t n) {
  if (n == 0) fail(ErrorCode::kInput, "space needs at least one atom");
  if (n > kMaxAtoms) fail(ErrorCode::kCapacity, "at most 63 atoms are supported");
}

void check_mask(std::size_t n, Subset a) {
  if (!a.subset_of(Subset::full(n))) fail(ErrorCode::kOutOfRange, "subset mask exceeds atom count");
}

}  // namespace

FiniteSpace::FiniteSpace(std::size_t atom_count) {
  check_atom_count(atom_count);
  for (std::size_t i = 0; i < atom_count; ++i) labels_.push_back("x" + std::to_string(i));
}

FiniteSpace::FiniteSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  check_atom_count(labels_.size());
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) fail(ErrorCode::kInput, "atom labels must be distinct");
}

void FiniteSpace::check(Subset a) const { check_mask(atom_count(), a); }

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  check_atom_count(probs_.size());
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kNormalization, "probability outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTol) fail(ErrorCode::kNormalization, "probabilities do not sum to 1");
}

Distribution Distribution::uniform(std::size_t atom_count) {
  check_atom_count(atom_count);
  return Distribution(std::vector<double>(atom_count, 1.0 / static_cast<double>(atom_count)));
}

Distribution Distribution::dirac(std::size_t atom_count, std::size_t atom) {
  check_atom_count(atom_count);
  require(atom < atom_count, "dirac atom out of range");
  std::vector<double> p(atom_count, 0.0);
  p[atom] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::mixture(std::span<const Distribution> parts, std::span<const double> weights) {
  require(!parts.empty() && parts.size() == weights.size(), "mixture needs matching parts and weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(total > 0.0, "mixture weights must have positive sum");
  std::vector<double> p(parts.front().atom_count(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    require(parts[k].atom_count() == p.size(), "mixture parts live on different spaces");
    require(weights[k] >= 0.0, "negative mixture weight");
    for (std::size_t x = 0; x < p.size(); ++x) p[x] += weights[k] / total * parts[k][x];
  }
  return Distribution(std::move(p));
}

double Distribution::mass(Subset a) const {
  check_mask(atom_count(), a);
  double total = 0.0;
  for (std::uint64_t m = a.mask; m != 0; m &= m - 1) total += probs_[static_cast<std::size_t>(std::countr_zero(m))];
  return total;
}

Subset Distribution::support() const {
  Subset s;
  for (std::size_t x = 0; x < probs_.size(); ++x)
    if (probs_[x] > 0.0) s.mask |= std::uint64_t{1} << x;
  return s;
}

std::vector<double> Distribution::subset_masses() const {
  const std::size_t n = atom_count();
  if (n > 20) fail(ErrorCode::kCapacity, "subset enumeration limited to 20 atoms");
  std::vector<double> out(std::size_t{1} << n, 0.0);
  for (std::size_t mask = 1; mask < out.size(); ++mask) {
    const auto low = static_cast<std::size_t>(std::countr_zero(mask));
    out[mask] = out[mask & (mask - 1)] + probs_[low];
  }
  return out;
}

DistributionFamily::DistributionFamily(std::vector<Distribution> members) {
  require(!members.empty(), "distribution family must be non-empty");
  const std::size_t n = members.front().atom_count();
  for (auto& d : members) {
    require(d.atom_count() == n, "family members live on different spaces");
    if (std::find(members_.begin(), members_.end(), d) == members_.end()) members_.push_back(std::move(d));
  }
}

EnvelopeValue envelope_mass(const DistributionFamily& family, Subset a) {
  EnvelopeValue best{family[0].mass(a), 0};
  for (std::size_t i = 1; i < family.size(); ++i) {
    const double m = family[i].mass(a);
    if (m > best.mass) best = {m, i};
  }
  return best;
}

std::vector<double> envelope_table(const DistributionFamily& family) {
  std::vector<double> env = family[0].subset_masses();
  for (std::size_t i = 1; i < family.size(); ++i) {
    const auto masses = family[i].subset_masses();
    for (std::size_t m = 0; m < env.size(); ++m) env[m] = std::max(env[m], masses[m]);
  }
  return env;
}

HypothesisFamily::HypothesisFamily(std::size_t atom_count, std::vector<Subset> members,
                                   std::optional<std::vector<int>> rank)
    : atom_count_(atom_count), rank_(std::move(rank)) {
  check_atom_count(atom_count);
  require(!members.empty(), "hypothesis family must be non-empty");
  for (Subset f : members) {
    check_mask(atom_count, f);
    if (std::find(members_.begin(), members_.end(), f) == members_.end()) members_.push_back(f);
  }
  if (!rank_) return;
  if (rank_->size() != atom_count) fail(ErrorCode::kOutOfRange, "preorder length differs from atom count");
  for (Subset f : members_) {
    for (std::size_t x = 0; x < atom_count; ++x) {
      if (!f.contains(x)) continue;
      for (std::size_t y = 0; y < atom_count; ++y)
        if ((*rank_)[y] <= (*rank_)[x] && !f.contains(y))
          fail(ErrorCode::kInput, "threshold-tagged member is not downward closed under the preorder");
    }
  }
}

HypothesisFamily HypothesisFamily::from_vectors(const std::vector<std::vector<int>>& labelings,
                                                std::optional<std::vector<int>> rank) {
  require(!labelings.empty(), "hypothesis family must be non-empty");
  const std::size_t n = labelings.front().size();
  std::vector<Subset> members;
  for (const auto& row : labelings) {
    if (row.size() != n) fail(ErrorCode::kOutOfRange, "labeling length differs from atom count");
    Subset f;
    for (std::size_t x = 0; x < n; ++x) {
      if (row[x] != 0 && row[x] != 1) fail(ErrorCode::kInput, "labels must be 0 or 1");
      if (row[x] == 1) f.mask |= std::uint64_t{1} << x;
    }
    members.push_back(f);
  }
  return HypothesisFamily(n, std::move(members), std::move(rank));
}

HypothesisFamily HypothesisFamily::thresholds(std::span<const int> rank) {
  std::vector<int> levels(rank.begin(), rank.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<Subset> members{Subset{}};
  for (int level : levels) {
    Subset f;
    for (std::size_t x = 0; x < rank.size(); ++x)
      if (rank[x] <= level) f.mask |= std::uint64_t{1} << x;
    members.push_back(f);
  }
  return HypothesisFamily(rank.size(), std::move(members), std::vector<int>(rank.begin(), rank.end()));
}

std::optional<std::size_t> HypothesisFamily::index_of(Subset labeling) const {
  const auto it = std::find(members_.begin(), members_.end(), labeling);
  if (it == members_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - members_.begin());
}

}  // namespace gensmooth
