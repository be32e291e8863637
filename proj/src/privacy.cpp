#include "gensmooth/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gensmooth {

std::int64_t errors(Subset h, const LabeledDataset& data) {
  std::int64_t total = 0;
  for (const auto& e : data.examples) total += (h.contains(e.atom) ? 1 : 0) != e.label;
  return total;
}

std::vector<double> exp_mech_output_law(const MechanismSpec& spec, const LabeledDataset& data) {
  require(spec.alpha >= 0.0, "privacy parameter must be non-negative");
  std::vector<double> scores(spec.cover.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    scores[i] = -spec.alpha * static_cast<double>(errors(spec.cover[i], data)) / 2.0;
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

std::size_t exp_mech_learn(const MechanismSpec& spec, const LabeledDataset& data, std::uint64_t seed) {
  Rng rng(seed);
  return rng.categorical(exp_mech_output_law(spec, data));
}

Mechanism erm_mechanism(const HypothesisFamily& cover) {
  return [cover](const LabeledDataset& data) {
    std::vector<double> law(cover.size(), 0.0);
    std::size_t best = 0;
    std::int64_t best_errors = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < cover.size(); ++i) {
      const auto e = errors(cover[i], data);
      if (e < best_errors) {
        best_errors = e;
        best = i;
      }
    }
    law[best] = 1.0;
    return law;
  };
}

namespace {

LabeledDataset decode(std::size_t code, std::size_t domain_size, std::size_t m) {
  LabeledDataset d;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t entry = code % (2 * domain_size);
    code /= 2 * domain_size;
    d.examples.push_back({entry / 2, static_cast<int>(entry % 2)});
  }
  return d;
}

}  // namespace

DpAudit verify_dp(const Mechanism& mechanism, std::size_t domain_size, std::size_t m, double alpha_claim,
                  double tol) {
  require(domain_size >= 1 && m >= 1, "audit needs a non-empty domain and dataset size");
  const std::size_t base = 2 * domain_size;
  std::size_t count = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (count > kMaxAuditDatasets / base) fail(ErrorCode::kCapacity, "too many datasets to audit exhaustively");
    count *= base;
  }
  std::vector<std::vector<double>> laws(count);
  for (std::size_t code = 0; code < count; ++code) laws[code] = mechanism(decode(code, domain_size, m));

  DpAudit audit;
  std::size_t arg_a = 0, arg_b = 0, arg_out = 0;
  bool any = false;
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t stride = 1;
    for (std::size_t pos = 0; pos < m; ++pos, stride *= base) {
      const std::size_t current = (code / stride) % base;
      for (std::size_t entry = current + 1; entry < base; ++entry) {
        const std::size_t other = code + (entry - current) * stride;
        const auto& p = laws[code];
        const auto& q = laws[other];
        require(p.size() == q.size(), "mechanism output spaces differ between datasets");
        for (std::size_t h = 0; h < p.size(); ++h) {
          if (p[h] == 0.0 && q[h] == 0.0) continue;
          const double ratio = (p[h] == 0.0 || q[h] == 0.0) ? std::numeric_limits<double>::infinity()
                                                             : std::abs(std::log(p[h]) - std::log(q[h]));
          if (!any || ratio > audit.max_log_ratio) {
            any = true;
            audit.max_log_ratio = ratio;
            arg_a = code;
            arg_b = other;
            arg_out = h;
          }
        }
      }
    }
  }
  audit.pass = audit.max_log_ratio <= alpha_claim + tol;
  if (any) audit.witness = DpWitness{decode(arg_a, domain_size, m), decode(arg_b, domain_size, m), arg_out};
  return audit;
}

DpAudit verify_dp(const MechanismSpec& spec, std::size_t domain_size, std::size_t m, double alpha_claim, double tol) {
  require(domain_size <= spec.cover.atom_count(), "audit domain exceeds the cover's space");
  return verify_dp([&spec](const LabeledDataset& d) { return exp_mech_output_law(spec, d); }, domain_size, m,
                   alpha_claim, tol);
}

SampleSizeTerms private_sample_size(double vc, double eps, double delta, double alpha, double rho_inverse,
                                    double constant) {
  require(eps > 0.0 && eps < 1.0 && delta > 0.0 && delta < 1.0, "accuracy and confidence must lie in (0,1)");
  require(alpha > 0.0, "privacy parameter must be positive");
  require(rho_inverse > 0.0 && rho_inverse <= 1.0, "cover radius must lie in (0,1]");
  SampleSizeTerms t;
  t.statistical = constant * (vc * std::log(1.0 / eps) + std::log(1.0 / delta)) / (eps * eps);
  t.privacy = constant * vc * std::log(1.0 / rho_inverse) / (alpha * eps);
  t.total = static_cast<std::size_t>(std::ceil(t.statistical + t.privacy));
  return t;
}

ThresholdReduction::ThresholdReduction(PrivateLearner learner, std::vector<Subset> parts,
                                       std::vector<Distribution> dists, double eta, ReductionOptions options)
    : learner_(std::move(learner)), parts_(std::move(parts)), dists_(std::move(dists)), options_(options) {
  require(!parts_.empty() && parts_.size() == dists_.size(), "one distribution per part");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const double mass = dists_[i].mass(parts_[i]);
    require(mass > 0.0, "conditioning part has zero mass");
    require(mass >= eta - kMassTol, "part carries less than eta under its distribution");
    require(dists_[i].atom_count() == dists_.front().atom_count(), "distributions live on different spaces");
    for (std::size_t j = i + 1; j < parts_.size(); ++j) require(parts_[i].disjoint(parts_[j]), "parts must be disjoint");
  }
}

LabeledDataset ThresholdReduction::lift(const LabeledDataset& data, Rng& rng) const {
  LabeledDataset out;
  for (const auto& e : data.examples) {
    require(e.atom < parts_.size(), "threshold example outside [K]");
    const std::size_t x = rng.categorical(dists_[e.atom].probs());
    int y = parts_[e.atom].contains(x) ? e.label : 0;
    if (options_.relabel_one.contains(x)) y = 1;
    out.examples.push_back({x, y});
  }
  return out;
}

std::vector<int> ThresholdReduction::project(Subset h) const {
  std::vector<int> out(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const double inside = dists_[i].mass(parts_[i]);
    out[i] = dists_[i].mass(h & parts_[i]) >= inside / 2.0 ? 1 : 0;
  }
  return out;
}

std::vector<int> ThresholdReduction::learn(const LabeledDataset& data, std::uint64_t seed) const {
  Rng rng(seed);
  const auto lifted = lift(data, rng);
  return project(learner_(lifted, rng));
}

Distribution ThresholdReduction::lifted_marginal(std::span<const double> nu) const {
  return Distribution::mixture(dists_, nu);
}

ThresholdReduction reduce_to_threshold_learner(PrivateLearner learner, std::vector<Subset> parts,
                                               std::vector<Distribution> dists, double eta,
                                               ReductionOptions options) {
  return ThresholdReduction(std::move(learner), std::move(parts), std::move(dists), eta, options);
}

DistributionFamily convexify(const DistributionFamily& family, std::size_t resolution) {
  require(resolution >= 1, "resolution must be positive");
  const std::size_t k = family.size();
  std::vector<Distribution> out;
  std::vector<double> weights(k, 0.0);
  // Enumerate compositions of resolution into k non-negative parts.
  std::vector<std::size_t> parts(k, 0);
  const auto emit = [&] {
    for (std::size_t i = 0; i < k; ++i) weights[i] = static_cast<double>(parts[i]);
    out.push_back(Distribution::mixture(family.members(), weights));
    if (out.size() > 100000) fail(ErrorCode::kCapacity, "too many mixtures");
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == k) {
      parts[i] = left;
      emit();
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      parts[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, resolution);
  return DistributionFamily(std::move(out));
}

}  // namespace gensmooth
