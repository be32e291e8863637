#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gensmooth/measure.hpp"

namespace gensmooth {

inline constexpr std::size_t kExhaustiveCutoff = 20;
inline constexpr std::size_t kPackingCutoff = 15;

enum class SearchMode { kExact, kGreedy };

// Non-decreasing step function on [0,1]. A point z takes the value of the first
// breakpoint at or above it; above the last breakpoint the value is max(last, 1).
class ToleranceProfile {
 public:
  struct Breakpoint {
    double z;
    double value;
  };

  explicit ToleranceProfile(std::vector<Breakpoint> breakpoints, bool lower_bound = false);
  static ToleranceProfile sample(const std::function<double(double)>& rho, std::span<const double> grid);

  double operator()(double z) const;
  // Largest breakpoint z with value <= eps, if any.
  std::optional<double> inverse(double eps, double tol = kMassTol) const;
  // Smallest majorant on the same grid whose value/z is non-increasing.
  ToleranceProfile ratio_regularized() const;

  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  bool well_behaved() const { return well_behaved_; }
  bool lower_bound() const { return lower_bound_; }

 private:
  std::vector<Breakpoint> breakpoints_;
  bool well_behaved_ = false;
  bool lower_bound_ = false;
};

ToleranceProfile tolerance_profile(const DistributionFamily& family, const Distribution& mu0,
                                   std::span<const double> grid, SearchMode mode = SearchMode::kExact,
                                   double tol = kMassTol);

struct SmoothnessCertificate {
  Distribution base;
  ToleranceProfile profile;
  bool verified = false;
  std::optional<Subset> witness;
};

SmoothnessCertificate verify_certificate(const DistributionFamily& family, const Distribution& mu0,
                                         const ToleranceProfile& profile, double tol = kMassTol);

// Exhaustive check of: mu0(A) <= eps implies envelope(A) <= cap.
bool verify_small_set_bound(const DistributionFamily& family, const Distribution& mu0, double eps, double cap,
                            double tol = kMassTol);

struct FragmentationWitness {
  std::size_t count = 0;
  std::vector<Subset> parts;
  std::vector<std::size_t> witnesses;
  bool lower_bound = false;
};

FragmentationWitness fragmentation_number(const DistributionFamily& family, double eps,
                                          SearchMode mode = SearchMode::kExact, double tol = kMassTol);

struct Selection {
  std::size_t member;
  Subset set;
};

struct ScaledBase {
  Distribution base;
  std::vector<Selection> selections;
  std::size_t fragmentation = 0;
  bool fallback = false;
  bool verified = false;
  std::optional<Subset> witness;
};

ScaledBase construct_scaled_base(const DistributionFamily& family, double eps, double tol = kMassTol);

// Exhaustive check of: base(A) <= eps/N^2 implies envelope(A) <= 2 eps. Returns the first violating set.
std::optional<Subset> scaled_base_violation(const DistributionFamily& family, const Distribution& base, double eps,
                                            std::size_t fragmentation, double tol = kMassTol);

struct ScaleRecord {
  double eps = 0.0;
  std::vector<Selection> selections;
  bool fallback = false;
  std::vector<double> measure;  // finite measure with envelope(A) <= eps + measure(A)
  double raw_mass = 0.0;
  double mass = 0.0;            // running maximum of raw_mass over scales
  double delta = 0.0;
};

struct CertificateConstruction {
  SmoothnessCertificate certificate;
  std::vector<ScaleRecord> scales;
};

CertificateConstruction construct_certificate(const DistributionFamily& family, std::span<const double> eps_sequence,
                                              double tol = kMassTol);

// First set violating envelope(A) <= eps + measure(A), if any.
std::optional<Subset> scale_violation(const DistributionFamily& family, const ScaleRecord& scale,
                                      double tol = kMassTol);

struct TuranSelection {
  std::vector<std::size_t> indices;
  bool verified = false;
};

TuranSelection turan_refine(std::span<const Subset> sets, std::span<const Distribution> dists, double eps,
                            double delta, double tol = kMassTol);

}  // namespace gensmooth
