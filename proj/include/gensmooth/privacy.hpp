#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gensmooth/measure.hpp"
#include "gensmooth/rng.hpp"

namespace gensmooth {

struct Example {
  std::size_t atom = 0;
  int label = 0;
  friend bool operator==(const Example&, const Example&) = default;
};

struct LabeledDataset {
  std::vector<Example> examples;
  std::size_t size() const { return examples.size(); }
};

std::int64_t errors(Subset h, const LabeledDataset& data);

struct MechanismSpec {
  HypothesisFamily cover;
  double alpha = 0.0;
};

// P(h) proportional to exp(-alpha * errors(h) / 2).
std::vector<double> exp_mech_output_law(const MechanismSpec& spec, const LabeledDataset& data);
std::size_t exp_mech_learn(const MechanismSpec& spec, const LabeledDataset& data, std::uint64_t seed);

// Output law of an arbitrary mechanism with finitely many outputs.
using Mechanism = std::function<std::vector<double>(const LabeledDataset&)>;

// Deterministic lowest-index empirical minimizer, as a point-mass law.
Mechanism erm_mechanism(const HypothesisFamily& cover);

struct DpWitness {
  LabeledDataset dataset;
  LabeledDataset neighbor;
  std::size_t output = 0;
};

struct DpAudit {
  double max_log_ratio = 0.0;  // +inf when some output has zero probability on only one side
  bool pass = false;
  std::optional<DpWitness> witness;  // neighbors attaining the maximum
};

inline constexpr std::size_t kMaxAuditDatasets = 1000000;

DpAudit verify_dp(const Mechanism& mechanism, std::size_t domain_size, std::size_t m, double alpha_claim,
                  double tol = 1e-12);
DpAudit verify_dp(const MechanismSpec& spec, std::size_t domain_size, std::size_t m, double alpha_claim,
                  double tol = 1e-12);

struct SampleSizeTerms {
  double statistical = 0.0;  // C (d log(1/eps) + log(1/delta)) / eps^2
  double privacy = 0.0;      // C d log(1/rho_inv) / (alpha eps)
  std::size_t total = 0;
};

SampleSizeTerms private_sample_size(double vc, double eps, double delta, double alpha, double rho_inverse,
                                    double constant = 1.0);

// Private learner over the base space: dataset in, hypothesis (set labeled 1) out.
using PrivateLearner = std::function<Subset(const LabeledDataset&, Rng&)>;

struct ReductionOptions {
  // Samples landing here are always relabeled 1; empty by default.
  Subset relabel_one;
};

// Threshold learner over [K] built from a private learner on the base space.
class ThresholdReduction {
 public:
  ThresholdReduction(PrivateLearner learner, std::vector<Subset> parts, std::vector<Distribution> dists, double eta,
                     ReductionOptions options = {});

  std::size_t part_count() const { return parts_.size(); }
  LabeledDataset lift(const LabeledDataset& data, Rng& rng) const;
  std::vector<int> project(Subset h) const;
  std::vector<int> learn(const LabeledDataset& data, std::uint64_t seed) const;
  // Mixture of the part distributions weighted by nu, the marginal the lifted data follows.
  Distribution lifted_marginal(std::span<const double> nu) const;

 private:
  PrivateLearner learner_;
  std::vector<Subset> parts_;
  std::vector<Distribution> dists_;
  ReductionOptions options_;
};

ThresholdReduction reduce_to_threshold_learner(PrivateLearner learner, std::vector<Subset> parts,
                                               std::vector<Distribution> dists, double eta,
                                               ReductionOptions options = {});

// All mixtures of the members with weights in multiples of 1/resolution.
DistributionFamily convexify(const DistributionFamily& family, std::size_t resolution);

}  // namespace gensmooth
