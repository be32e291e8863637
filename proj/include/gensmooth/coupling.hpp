#pragma once

#include "gensmooth/measure.hpp"
#include "gensmooth/smoothness.hpp"

namespace gensmooth {

// One round of the coupling onto the space extended by the dummy atom (id n).
struct CoupledStep {
  Subset kept_mask;
  double dummy_prob = 0.0;
  Distribution coupled_dist;  // n + 1 atoms
  double smooth_bound = 0.0;  // density-ratio bound vs the extended base on real atoms
  double dummy_bound = 0.0;   // same bound on the dummy atom
};

// Half base measure, half point mass on the dummy atom.
Distribution extended_base(const Distribution& mu0);

CoupledStep couple_step(const Distribution& mu_t, const Distribution& mu0, const ToleranceProfile& profile,
                        double eps);

CoupledStep couple_step_capped(const Distribution& mu_t, const Distribution& mu0, double eps, double eta);

// Largest coupled/extended-base ratio over real atoms and on the dummy atom.
struct RatioCheck {
  double real = 0.0;
  double dummy = 0.0;
};
RatioCheck coupled_ratios(const CoupledStep& step, const Distribution& mu0);

Subset extract_small_set(const Distribution& mu, Subset a, double eps, double tol = kMassTol);

}  // namespace gensmooth
