#include "gensmooth/learners.hpp"

#include <algorithm>
#include <cmath>

namespace gensmooth {

ErmLearner::ErmLearner(HypothesisFamily h) : h_(std::move(h)), losses_(h_.size(), 0) {}

std::size_t ErmLearner::choice() const {
  return static_cast<std::size_t>(std::min_element(losses_.begin(), losses_.end()) - losses_.begin());
}

std::size_t ErmLearner::version_space_size() const {
  return static_cast<std::size_t>(std::count(losses_.begin(), losses_.end(), 0));
}

Commitment ErmLearner::commit() {
  const Subset f = h_[choice()];
  Commitment c{f, std::vector<double>(h_.atom_count(), 0.0)};
  for (std::size_t x = 0; x < h_.atom_count(); ++x) c.prob_one[x] = f.contains(x) ? 1.0 : 0.0;
  return c;
}

void ErmLearner::update(std::size_t atom, int label) {
  for (std::size_t i = 0; i < h_.size(); ++i) losses_[i] += h_.label(i, atom) != label;
}

std::unique_ptr<Learner> ErmLearner::clone(std::uint64_t) const { return std::make_unique<ErmLearner>(*this); }

ErmLearner make_erm_learner(const HypothesisFamily& h) { return ErmLearner(h); }

HedgeLearner::HedgeLearner(HypothesisFamily experts, double rate, std::uint64_t seed)
    : experts_(std::move(experts)), rate_(rate), losses_(experts_.size(), 0), rng_(seed) {
  require(rate >= 0.0, "hedge rate must be non-negative");
}

std::vector<double> HedgeLearner::weights() const {
  const std::int64_t best = *std::min_element(losses_.begin(), losses_.end());
  std::vector<double> w(losses_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-rate_ * static_cast<double>(losses_[i] - best));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

Commitment HedgeLearner::commit() {
  const auto w = weights();
  const std::size_t pick = rng_.categorical(w);
  Commitment c{experts_[pick], std::vector<double>(experts_.atom_count(), 0.0)};
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::uint64_t m = experts_[i].mask; m != 0; m &= m - 1)
      c.prob_one[static_cast<std::size_t>(std::countr_zero(m))] += w[i];
  for (double& p : c.prob_one) p = std::min(p, 1.0);
  return c;
}

void HedgeLearner::update(std::size_t atom, int label) {
  for (std::size_t i = 0; i < experts_.size(); ++i) losses_[i] += experts_.label(i, atom) != label;
}

std::unique_ptr<Learner> HedgeLearner::clone(std::uint64_t seed) const {
  auto copy = std::make_unique<HedgeLearner>(*this);
  copy->reseed(seed);
  return copy;
}

ConstantLearner::ConstantLearner(std::size_t atom_count, int value) : atom_count_(atom_count), value_(value) {
  require(value == 0 || value == 1, "constant learner predicts 0 or 1");
}

Commitment ConstantLearner::commit() {
  return Commitment{value_ ? Subset::full(atom_count_) : Subset{},
                    std::vector<double>(atom_count_, static_cast<double>(value_))};
}

double hedge_rate(std::size_t experts, std::size_t horizon) {
  require(experts >= 1 && horizon >= 1, "hedge rate needs experts and a horizon");
  return std::sqrt(8.0 * std::log(static_cast<double>(experts)) / static_cast<double>(horizon));
}

HedgeCoverSetup make_hedge_cover_learner(const HypothesisFamily& h, const DistributionFamily& family,
                                         const Distribution& mu0, const ToleranceProfile& profile, double eps,
                                         std::size_t horizon, std::uint64_t seed) {
  require(eps > 0.0 && eps <= 1.0, "scale must lie in (0,1]");
  const auto cert = verify_certificate(family, mu0, profile);
  require(cert.verified, "hedge cover needs a verified smoothness certificate");
  const auto delta = profile.inverse(eps);
  require(delta.has_value(), "tolerance profile never drops to eps");
  auto cover = build_uniform_cover(h, mu0, *delta);
  const double rate = hedge_rate(cover.members.size(), horizon);
  return HedgeCoverSetup{HedgeLearner(std::move(cover.members), rate, seed), *delta, std::move(cover.record)};
}

bool hedge_bound_holds(const Transcript& transcript, const HypothesisFamily& experts, double tol) {
  const auto losses = comparator_losses(transcript, experts);
  const double best = static_cast<double>(*std::min_element(losses.begin(), losses.end()));
  const double horizon = static_cast<double>(transcript.rounds.size());
  const double slack = std::sqrt(horizon / 2.0 * std::log(static_cast<double>(experts.size())));
  return transcript.expected_learner_loss() <= best + slack + tol;
}

}  // namespace gensmooth
