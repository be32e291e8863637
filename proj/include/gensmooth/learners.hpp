#pragma once

#include "gensmooth/protocol.hpp"
#include "gensmooth/rng.hpp"
#include "gensmooth/smoothness.hpp"

namespace gensmooth {

class ErmLearner final : public Learner {
 public:
  explicit ErmLearner(HypothesisFamily h);

  std::string_view kind() const override { return "erm"; }
  std::size_t atom_count() const override { return h_.atom_count(); }
  Commitment commit() override;
  void update(std::size_t atom, int label) override;
  void reseed(std::uint64_t) override {}
  std::unique_ptr<Learner> clone(std::uint64_t seed) const override;

  std::size_t choice() const;
  std::size_t version_space_size() const;
  const HypothesisFamily& hypotheses() const { return h_; }

 private:
  HypothesisFamily h_;
  std::vector<std::int64_t> losses_;
};

class HedgeLearner final : public Learner {
 public:
  HedgeLearner(HypothesisFamily experts, double rate, std::uint64_t seed = 0);

  std::string_view kind() const override { return "hedge-cover"; }
  std::size_t atom_count() const override { return experts_.atom_count(); }
  Commitment commit() override;
  void update(std::size_t atom, int label) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }
  std::unique_ptr<Learner> clone(std::uint64_t seed) const override;

  std::vector<double> weights() const;
  double rate() const { return rate_; }
  const HypothesisFamily& experts() const { return experts_; }

 private:
  HypothesisFamily experts_;
  double rate_;
  std::vector<std::int64_t> losses_;
  Rng rng_;
};

class ConstantLearner final : public Learner {
 public:
  ConstantLearner(std::size_t atom_count, int value);

  std::string_view kind() const override { return "constant"; }
  std::size_t atom_count() const override { return atom_count_; }
  Commitment commit() override;
  void update(std::size_t, int) override {}
  void reseed(std::uint64_t) override {}
  std::unique_ptr<Learner> clone(std::uint64_t) const override { return std::make_unique<ConstantLearner>(*this); }

 private:
  std::size_t atom_count_;
  int value_;
};

ErmLearner make_erm_learner(const HypothesisFamily& h);

double hedge_rate(std::size_t experts, std::size_t horizon);

struct HedgeCoverSetup {
  HedgeLearner learner;
  double delta;  // cover radius under the base measure
  CoverRecord cover;
};

// Hedge over the eps-uniform cover obtained through a verified (mu0, profile) certificate.
HedgeCoverSetup make_hedge_cover_learner(const HypothesisFamily& h, const DistributionFamily& family,
                                         const Distribution& mu0, const ToleranceProfile& profile, double eps,
                                         std::size_t horizon, std::uint64_t seed = 0);

// Expected learner loss <= best expert loss + sqrt(T/2 ln N) on the given transcript.
bool hedge_bound_holds(const Transcript& transcript, const HypothesisFamily& experts, double tol = 1e-9);

}  // namespace gensmooth
