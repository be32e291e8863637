#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gensmooth/measure.hpp"

namespace gensmooth {

// What the learner commits to before seeing the round's sample.
struct Commitment {
  Subset labels;                 // realized prediction function
  std::vector<double> prob_one;  // probability of predicting 1 at each atom
};

class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string_view kind() const = 0;
  virtual std::size_t atom_count() const = 0;
  virtual Commitment commit() = 0;
  virtual void update(std::size_t atom, int label) = 0;
  virtual void reseed(std::uint64_t seed) = 0;
  // Snapshot of the current state driven by a fresh seed.
  virtual std::unique_ptr<Learner> clone(std::uint64_t seed) const = 0;
};

struct Round {
  std::size_t member = 0;
  std::size_t atom = 0;
  int label = 0;
  int prediction = 0;
  int loss = 0;
  double expected_loss = 0.0;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string_view kind() const = 0;
  virtual std::size_t atom_count() const = 0;
  virtual void reset(std::uint64_t seed, std::size_t horizon) = 0;
  virtual std::size_t select(std::span<const Round> history, const Learner& learner) = 0;
  virtual int label(std::size_t atom, std::span<const Round> history) = 0;
  // Hypothesis labeling every round so far, when the adversary is realizable by construction.
  virtual std::optional<Subset> target() const { return std::nullopt; }
};

struct Transcript {
  std::vector<Round> rounds;
  std::optional<std::size_t> realizable_target;  // index into the comparator family
  std::vector<std::int64_t> comparator_losses;   // accumulated round by round

  std::int64_t learner_loss() const;
  double expected_learner_loss() const;
  std::int64_t best_comparator_loss() const;
  double regret() const { return static_cast<double>(learner_loss() - best_comparator_loss()); }
  double expected_regret() const { return expected_learner_loss() - static_cast<double>(best_comparator_loss()); }
};

Transcript run_protocol(Adversary& adversary, const Learner& learner, const DistributionFamily& family,
                        const HypothesisFamily& comparator, std::size_t horizon, std::uint64_t seed);

// Cumulative loss of every hypothesis on the transcript, by direct enumeration.
std::vector<std::int64_t> comparator_losses(const Transcript& transcript, const HypothesisFamily& comparator);

bool labels_agree_with(const Transcript& transcript, Subset hypothesis);

void write_transcript(std::ostream& out, const Transcript& transcript);

}  // namespace gensmooth
