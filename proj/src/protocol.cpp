#include "gensmooth/protocol.hpp"

#include <algorithm>
#include <ostream>

#include "gensmooth/rng.hpp"

namespace gensmooth {

std::int64_t Transcript::learner_loss() const {
  std::int64_t total = 0;
  for (const auto& r : rounds) total += r.loss;
  return total;
}

double Transcript::expected_learner_loss() const {
  double total = 0.0;
  for (const auto& r : rounds) total += r.expected_loss;
  return total;
}

std::int64_t Transcript::best_comparator_loss() const {
  if (comparator_losses.empty()) return 0;
  return *std::min_element(comparator_losses.begin(), comparator_losses.end());
}

Transcript run_protocol(Adversary& adversary, const Learner& learner, const DistributionFamily& family,
                        const HypothesisFamily& comparator, std::size_t horizon, std::uint64_t seed) {
  const std::size_t n = family.atom_count();
  require(horizon >= 1, "horizon must be at least one round");
  require(adversary.atom_count() == n && learner.atom_count() == n && comparator.atom_count() == n,
          "adversary, learner, family and comparator must share one space");

  adversary.reset(derive_seed(seed, 1), horizon);
  auto player = learner.clone(derive_seed(seed, 2));
  Rng sampler(derive_seed(seed, 3));

  Transcript out;
  out.rounds.reserve(horizon);
  out.comparator_losses.assign(comparator.size(), 0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t member = adversary.select(out.rounds, *player);
    require(member < family.size(), "adversary selected a distribution outside the family");
    const Commitment c = player->commit();
    const std::size_t atom = sampler.categorical(family[member].probs());
    const int label = adversary.label(atom, out.rounds);
    Round r;
    r.member = member;
    r.atom = atom;
    r.label = label;
    r.prediction = c.labels.contains(atom) ? 1 : 0;
    r.loss = r.prediction != label ? 1 : 0;
    r.expected_loss = label == 1 ? 1.0 - c.prob_one[atom] : c.prob_one[atom];
    for (std::size_t h = 0; h < comparator.size(); ++h) out.comparator_losses[h] += comparator.label(h, atom) != label;
    player->update(atom, label);
    out.rounds.push_back(r);
  }
  if (const auto target = adversary.target()) out.realizable_target = comparator.index_of(*target);
  return out;
}

std::vector<std::int64_t> comparator_losses(const Transcript& transcript, const HypothesisFamily& comparator) {
  std::vector<std::int64_t> losses(comparator.size(), 0);
  for (std::size_t h = 0; h < comparator.size(); ++h)
    for (const auto& r : transcript.rounds) losses[h] += comparator.label(h, r.atom) != r.label;
  return losses;
}

bool labels_agree_with(const Transcript& transcript, Subset hypothesis) {
  return std::all_of(transcript.rounds.begin(), transcript.rounds.end(),
                     [&](const Round& r) { return (hypothesis.contains(r.atom) ? 1 : 0) == r.label; });
}

void write_transcript(std::ostream& out, const Transcript& transcript) {
  out << "round,member_index,atom,label,prediction,loss\n";
  for (std::size_t t = 0; t < transcript.rounds.size(); ++t) {
    const auto& r = transcript.rounds[t];
    out << t << ',' << r.member << ',' << r.atom << ',' << r.label << ',' << r.prediction << ',' << r.loss << '\n';
  }
}

}  // namespace gensmooth
