#include "gensmooth/adversaries.hpp"

#include <algorithm>
#include <cmath>

namespace gensmooth {

namespace {

int noisy(Subset target, std::size_t atom, double noise, Rng& rng) {
  const int y = target.contains(atom) ? 1 : 0;
  return noise > 0.0 && rng.bernoulli(noise) ? 1 - y : y;
}

}  // namespace

IidAdversary::IidAdversary(const DistributionFamily& family, std::vector<double> member_weights, Subset target,
                           double noise)
    : atom_count_(family.atom_count()), weights_(std::move(member_weights)), target_(target), noise_(noise) {
  require(weights_.size() == family.size(), "one weight per family member");
  require(std::any_of(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }), "weights must not all vanish");
  require(noise >= 0.0 && noise <= 1.0, "noise must lie in [0,1]");
  require(target.subset_of(Subset::full(atom_count_)), "target exceeds the space");
}

void IidAdversary::reset(std::uint64_t seed, std::size_t) { rng_ = Rng(seed); }

std::size_t IidAdversary::select(std::span<const Round>, const Learner&) { return rng_.categorical(weights_); }

int IidAdversary::label(std::size_t atom, std::span<const Round>) { return noisy(target_, atom, noise_, rng_); }

std::optional<Subset> IidAdversary::target() const {
  if (noise_ > 0.0) return std::nullopt;
  return target_;
}

ScheduleAdversary::ScheduleAdversary(const DistributionFamily& family, std::vector<std::size_t> schedule,
                                     Subset target, double noise)
    : atom_count_(family.atom_count()), schedule_(std::move(schedule)), target_(target), noise_(noise) {
  require(!schedule_.empty(), "schedule must be non-empty");
  for (std::size_t m : schedule_) require(m < family.size(), "schedule names a member outside the family");
  require(noise >= 0.0 && noise <= 1.0, "noise must lie in [0,1]");
  require(target.subset_of(Subset::full(atom_count_)), "target exceeds the space");
}

void ScheduleAdversary::reset(std::uint64_t seed, std::size_t) { rng_ = Rng(seed); }

std::size_t ScheduleAdversary::select(std::span<const Round> history, const Learner&) {
  return schedule_[history.size() % schedule_.size()];
}

int ScheduleAdversary::label(std::size_t atom, std::span<const Round>) { return noisy(target_, atom, noise_, rng_); }

std::optional<Subset> ScheduleAdversary::target() const {
  if (noise_ > 0.0) return std::nullopt;
  return target_;
}

namespace {

HypothesisFamily prefix_thresholds(std::size_t n, const std::vector<Subset>& parts) {
  std::vector<int> rank(n, static_cast<int>(parts.size()));
  for (std::size_t p = 0; p < parts.size(); ++p)
    for (std::size_t x : parts[p].atoms()) rank[x] = static_cast<int>(p);
  std::vector<Subset> members{Subset{}};
  Subset acc;
  for (const auto& part : parts) {
    acc = acc | part;
    members.push_back(acc);
  }
  return HypothesisFamily(n, std::move(members), std::move(rank));
}

}  // namespace

ThresholdHidingAdversary::ThresholdHidingAdversary(const DistributionFamily& family, std::vector<Subset> parts,
                                                   std::size_t depth, std::size_t probe_budget)
    : family_(family),
      parts_(std::move(parts)),
      probe_budget_(std::max<std::size_t>(probe_budget, 1)),
      comparator_(prefix_thresholds(family.atom_count(), parts_)) {
  require(depth < 16, "search depth too large");
  require(parts_.size() == (std::size_t{1} << depth) - 1, "binary search of this depth needs 2^depth - 1 parts");
  for (std::size_t p = 0; p < parts_.size(); ++p) {
    require(!parts_[p].empty(), "parts must be non-empty");
    for (std::size_t q = p + 1; q < parts_.size(); ++q) require(parts_[p].disjoint(parts_[q]), "parts must be disjoint");
    witness_.push_back(envelope_mass(family_, parts_[p]).member);
  }
}

void ThresholdHidingAdversary::reset(std::uint64_t seed, std::size_t) {
  rng_ = Rng(seed);
  lo_ = 0;
  hi_ = parts_.size();
  pending_label_ = 0;
  idle_member_ = 0;
}

std::optional<std::size_t> ThresholdHidingAdversary::position(std::size_t atom) const {
  for (std::size_t p = 0; p < parts_.size(); ++p)
    if (parts_[p].contains(atom)) return p;
  return std::nullopt;
}

std::size_t ThresholdHidingAdversary::select(std::span<const Round>, const Learner& learner) {
  if (lo_ >= hi_) return idle_member_;
  const std::size_t c = midpoint();
  const std::size_t member = witness_[c];
  idle_member_ = member;
  const Distribution& mu = family_[member];
  // Joint probability of predicting 1 while the sample lands in the midpoint part.
  double one = 0.0;
  for (std::size_t probe = 0; probe < probe_budget_; ++probe) {
    const auto replay = learner.clone(rng_.next());
    one += mu.mass(replay->commit().labels & parts_[c]);
  }
  one /= static_cast<double>(probe_budget_);
  const double zero = mu.mass(parts_[c]) - one;
  pending_label_ = one > zero ? 0 : 1;
  return member;
}

int ThresholdHidingAdversary::label(std::size_t atom, std::span<const Round>) {
  const auto p = position(atom);
  if (!p) return 0;
  if (*p < lo_) return 1;
  if (*p >= hi_) return 0;
  const std::size_t c = midpoint();
  if (*p == c) {
    if (pending_label_ == 1)
      lo_ = c + 1;
    else
      hi_ = c;
    return pending_label_;
  }
  // An undecided part away from the midpoint: commit it toward the limiting threshold.
  if (*p < c) {
    lo_ = *p + 1;
    return 1;
  }
  hi_ = *p;
  return 0;
}

std::optional<Subset> ThresholdHidingAdversary::target() const { return comparator_[lo_]; }

ThresholdHidingAdversary make_threshold_hiding_adversary(const DistributionFamily& family,
                                                         const FragmentationWitness& disjoint_parts,
                                                         std::size_t depth, std::size_t probe_budget) {
  require(depth < 16, "search depth too large");
  const std::size_t need = (std::size_t{1} << depth) - 1;
  require(disjoint_parts.parts.size() >= need, "not enough disjoint parts for the requested depth");
  std::vector<Subset> parts(disjoint_parts.parts.begin(), disjoint_parts.parts.begin() + static_cast<long>(need));
  return ThresholdHidingAdversary(family, std::move(parts), depth, probe_budget);
}

HypothesisFamily block_threshold_family(std::size_t atom_count, const std::vector<std::vector<Subset>>& blocks) {
  std::vector<Subset> members{Subset{}};
  for (const auto& block : blocks) {
    std::vector<Subset> next;
    for (Subset base : members) {
      Subset acc;
      next.push_back(base);
      for (const auto& part : block) {
        acc = acc | part;
        next.push_back(base | acc);
      }
    }
    members = std::move(next);
  }
  return HypothesisFamily(atom_count, std::move(members));
}

FragmentationAdversary::FragmentationAdversary(const DistributionFamily& family, double eps,
                                               std::vector<std::vector<Subset>> blocks)
    : family_(family), eps_(eps), blocks_(std::move(blocks)) {
  require(eps > 0.0 && eps <= 1.0, "scale must lie in (0,1]");
  require(!blocks_.empty(), "at least one block is needed");
  for (const auto& block : blocks_) {
    require(!block.empty(), "blocks must be non-empty");
    std::vector<std::size_t> w;
    for (const auto& part : block) {
      const auto env = envelope_mass(family_, part);
      require(env.mass >= eps - kMassTol, "every part must carry eps under some member");
      w.push_back(env.member);
    }
    witness_.push_back(std::move(w));
  }
}

std::size_t FragmentationAdversary::levels() const {
  std::size_t total = 0;
  for (const auto& block : blocks_) total += static_cast<std::size_t>(std::bit_width(block.size()));
  return total;
}

void FragmentationAdversary::start_block() {
  lo_ = 0;
  hi_ = blocks_[block_].size();
  mid_ = lo_ + (hi_ - lo_) / 2;
  level_hits_ = level_ones_ = 0;
}

void FragmentationAdversary::reset(std::uint64_t seed, std::size_t horizon) {
  rng_ = Rng(seed);
  quota_total_ = static_cast<std::size_t>(std::ceil(eps_ * static_cast<double>(horizon) / 2.0));
  quota_ = std::max<std::size_t>(1, quota_total_ / levels());
  block_ = 0;
  hits_ = 0;
  done_ = false;
  start_block();
}

std::size_t FragmentationAdversary::select(std::span<const Round>, const Learner&) { return witness_[block_][mid_]; }

int FragmentationAdversary::label(std::size_t atom, std::span<const Round>) {
  const int y = rng_.bernoulli(0.5) ? 1 : 0;
  if (!current_part().contains(atom)) return y;
  ++hits_;
  if (done_) return y;
  ++level_hits_;
  level_ones_ += static_cast<std::size_t>(y);
  if (level_hits_ < quota_) return y;
  // Level finished: descend toward the majority label, as the best comparator would.
  if (2 * level_ones_ > level_hits_)
    lo_ = mid_ + 1;
  else
    hi_ = mid_;
  level_hits_ = level_ones_ = 0;
  if (lo_ < hi_) {
    mid_ = lo_ + (hi_ - lo_) / 2;
  } else if (block_ + 1 < blocks_.size()) {
    ++block_;
    start_block();
  } else {
    done_ = true;
  }
  return y;
}

FragmentationConstruction make_fragmentation_adversary(const DistributionFamily& family, double eps, std::size_t d) {
  require(d >= 1, "at least one block is needed");
  const auto mode = family.atom_count() <= kPackingCutoff ? SearchMode::kExact : SearchMode::kGreedy;
  const auto witness = fragmentation_number(family, eps, mode);
  require(witness.count >= 3 * d, "fragmentation number below 3d at this scale");
  // Each block is trimmed to 2^b - 1 parts so its threshold class has a perfect search tree.
  const std::size_t per_block = witness.count / d;
  const std::size_t used = (std::size_t{1} << (std::bit_width(per_block + 1) - 1)) - 1;
  std::vector<std::vector<Subset>> blocks(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t q = 0; q < used; ++q) blocks[j].push_back(witness.parts[j * per_block + q]);
  auto comparator = block_threshold_family(family.atom_count(), blocks);
  const int vc = vc_dimension(comparator, std::min<std::size_t>(family.atom_count(), d + 1));
  require(vc <= static_cast<int>(d), "block threshold comparator exceeds VC dimension d");
  return FragmentationConstruction{FragmentationAdversary(family, eps, std::move(blocks)), std::move(comparator),
                                   witness.count, vc};
}

}  // namespace gensmooth
