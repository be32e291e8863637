#pragma once

#include "gensmooth/protocol.hpp"
#include "gensmooth/rng.hpp"
#include "gensmooth/smoothness.hpp"

namespace gensmooth {

// Draws the member each round from fixed weights and labels by a fixed hypothesis,
// flipping each label independently with probability noise.
class IidAdversary final : public Adversary {
 public:
  IidAdversary(const DistributionFamily& family, std::vector<double> member_weights, Subset target,
               double noise = 0.0);

  std::string_view kind() const override { return "iid"; }
  std::size_t atom_count() const override { return atom_count_; }
  void reset(std::uint64_t seed, std::size_t horizon) override;
  std::size_t select(std::span<const Round> history, const Learner& learner) override;
  int label(std::size_t atom, std::span<const Round> history) override;
  std::optional<Subset> target() const override;

 private:
  std::size_t atom_count_;
  std::vector<double> weights_;
  Subset target_;
  double noise_;
  Rng rng_;
};

// Cycles through a fixed list of member indices.
class ScheduleAdversary final : public Adversary {
 public:
  ScheduleAdversary(const DistributionFamily& family, std::vector<std::size_t> schedule, Subset target,
                    double noise = 0.0);

  std::string_view kind() const override { return "oblivious-schedule"; }
  std::size_t atom_count() const override { return atom_count_; }
  void reset(std::uint64_t seed, std::size_t horizon) override;
  std::size_t select(std::span<const Round> history, const Learner& learner) override;
  int label(std::size_t atom, std::span<const Round> history) override;
  std::optional<Subset> target() const override;

 private:
  std::size_t atom_count_;
  std::vector<std::size_t> schedule_;
  Subset target_;
  double noise_;
  Rng rng_;
};

// Binary search over ordered parts hiding a threshold from the learner. The midpoint part is
// labeled against the learner's likelier prediction there; other labels follow a limiting threshold.
class ThresholdHidingAdversary final : public Adversary {
 public:
  ThresholdHidingAdversary(const DistributionFamily& family, std::vector<Subset> parts, std::size_t depth,
                           std::size_t probe_budget);

  std::string_view kind() const override { return "threshold-hiding"; }
  std::size_t atom_count() const override { return family_.atom_count(); }
  void reset(std::uint64_t seed, std::size_t horizon) override;
  std::size_t select(std::span<const Round> history, const Learner& learner) override;
  int label(std::size_t atom, std::span<const Round> history) override;
  std::optional<Subset> target() const override;

  // Thresholds f_r = union of the first r parts, r = 0..parts.
  const HypothesisFamily& comparator() const { return comparator_; }
  // Undecided parts are positions lo..hi-1.
  std::pair<std::size_t, std::size_t> interval() const { return {lo_, hi_}; }
  std::size_t midpoint() const { return lo_ + (hi_ - lo_) / 2; }

 private:
  std::optional<std::size_t> position(std::size_t atom) const;

  DistributionFamily family_;
  std::vector<Subset> parts_;
  std::vector<std::size_t> witness_;
  std::size_t probe_budget_;
  HypothesisFamily comparator_;
  std::size_t lo_ = 0, hi_ = 0;
  int pending_label_ = 0;
  std::size_t idle_member_ = 0;
  Rng rng_;
};

ThresholdHidingAdversary make_threshold_hiding_adversary(const DistributionFamily& family,
                                                         const FragmentationWitness& disjoint_parts,
                                                         std::size_t depth, std::size_t probe_budget);

// Emulates the random-label lower bound for a product of threshold classes, one per block of parts.
class FragmentationAdversary final : public Adversary {
 public:
  FragmentationAdversary(const DistributionFamily& family, double eps, std::vector<std::vector<Subset>> blocks);

  std::string_view kind() const override { return "fragmentation-lb"; }
  std::size_t atom_count() const override { return family_.atom_count(); }
  void reset(std::uint64_t seed, std::size_t horizon) override;
  std::size_t select(std::span<const Round> history, const Learner& learner) override;
  int label(std::size_t atom, std::span<const Round> history) override;

  const std::vector<std::vector<Subset>>& blocks() const { return blocks_; }
  std::size_t levels() const;
  std::size_t hits() const { return hits_; }
  std::size_t emulated_steps() const { return quota_total_; }

 private:
  void start_block();
  const Subset& current_part() const { return blocks_[block_][mid_]; }

  DistributionFamily family_;
  double eps_;
  std::vector<std::vector<Subset>> blocks_;
  std::vector<std::vector<std::size_t>> witness_;
  Rng rng_;
  std::size_t quota_total_ = 0, quota_ = 0;
  std::size_t block_ = 0, lo_ = 0, hi_ = 0, mid_ = 0;
  std::size_t level_hits_ = 0, level_ones_ = 0, hits_ = 0;
  bool done_ = false;
};

struct FragmentationConstruction {
  FragmentationAdversary adversary;
  HypothesisFamily comparator;
  std::size_t fragmentation = 0;
  int comparator_vc = 0;
};

FragmentationConstruction make_fragmentation_adversary(const DistributionFamily& family, double eps, std::size_t d);

// Product of threshold classes: within each block, the parts at local positions below a cut are labeled 1.
HypothesisFamily block_threshold_family(std::size_t atom_count, const std::vector<std::vector<Subset>>& blocks);

}  // namespace gensmooth
