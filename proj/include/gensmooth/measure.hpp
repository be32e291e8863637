#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gensmooth/error.hpp"

namespace gensmooth {

inline constexpr double kMassTol = 1e-12;
inline constexpr double kSumTol = 1e-9;
inline constexpr std::size_t kMaxAtoms = 63;

// A set of atoms. Also used for labelings: the set where the hypothesis says 1.
struct Subset {
  std::uint64_t mask = 0;

  static Subset singleton(std::size_t atom) { return Subset{std::uint64_t{1} << atom}; }
  static Subset full(std::size_t atom_count) {
    return Subset{atom_count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << atom_count) - 1};
  }

  bool contains(std::size_t atom) const { return (mask >> atom) & 1u; }
  bool empty() const { return mask == 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask)); }
  bool subset_of(Subset other) const { return (mask & ~other.mask) == 0; }
  bool disjoint(Subset other) const { return (mask & other.mask) == 0; }
  std::vector<std::size_t> atoms() const;

  friend Subset operator|(Subset a, Subset b) { return {a.mask | b.mask}; }
  friend Subset operator&(Subset a, Subset b) { return {a.mask & b.mask}; }
  friend Subset operator^(Subset a, Subset b) { return {a.mask ^ b.mask}; }
  friend Subset operator-(Subset a, Subset b) { return {a.mask & ~b.mask}; }
  friend bool operator==(Subset, Subset) = default;
  friend auto operator<=>(Subset, Subset) = default;
};

class FiniteSpace {
 public:
  explicit FiniteSpace(std::size_t atom_count);
  FiniteSpace(std::vector<std::string> labels);

  std::size_t atom_count() const { return labels_.size(); }
  std::size_t dummy_atom() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  void check(Subset a) const;

 private:
  std::vector<std::string> labels_;
};

class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);
  static Distribution uniform(std::size_t atom_count);
  static Distribution dirac(std::size_t atom_count, std::size_t atom);
  // Weighted mixture; weights are normalized.
  static Distribution mixture(std::span<const Distribution> parts, std::span<const double> weights);

  std::size_t atom_count() const { return probs_.size(); }
  double operator[](std::size_t atom) const { return probs_[atom]; }
  std::span<const double> probs() const { return probs_; }
  double mass(Subset a) const;
  Subset support() const;
  // Mass of every subset, indexed by mask. Requires atom_count <= 20.
  std::vector<double> subset_masses() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

class DistributionFamily {
 public:
  explicit DistributionFamily(std::vector<Distribution> members);

  std::size_t atom_count() const { return members_.front().atom_count(); }
  std::size_t size() const { return members_.size(); }
  const Distribution& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Distribution>& members() const { return members_; }

 private:
  std::vector<Distribution> members_;
};

struct EnvelopeValue {
  double mass = 0.0;
  std::size_t member = 0;
};

EnvelopeValue envelope_mass(const DistributionFamily& family, Subset a);
// Envelope of every subset, indexed by mask. Requires atom_count <= 20.
std::vector<double> envelope_table(const DistributionFamily& family);

class HypothesisFamily {
 public:
  // rank: optional preorder, one rank per atom; members must be downward closed under it.
  HypothesisFamily(std::size_t atom_count, std::vector<Subset> members,
                   std::optional<std::vector<int>> rank = std::nullopt);
  static HypothesisFamily from_vectors(const std::vector<std::vector<int>>& labelings,
                                       std::optional<std::vector<int>> rank = std::nullopt);
  // Downward-closed sets {x : rank[x] < r} for every cut r, ordered from empty to full.
  static HypothesisFamily thresholds(std::span<const int> rank);

  std::size_t atom_count() const { return atom_count_; }
  std::size_t size() const { return members_.size(); }
  Subset operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Subset>& members() const { return members_; }
  int label(std::size_t h, std::size_t atom) const { return members_[h].contains(atom) ? 1 : 0; }
  bool threshold_tagged() const { return rank_.has_value(); }
  const std::optional<std::vector<int>>& rank() const { return rank_; }
  std::optional<std::size_t> index_of(Subset labeling) const;

 private:
  std::size_t atom_count_;
  std::vector<Subset> members_;
  std::optional<std::vector<int>> rank_;
};

int vc_dimension(const HypothesisFamily& h, std::size_t cap);

inline constexpr std::size_t kMaxBehaviors = 4096;
int littlestone_dimension(const HypothesisFamily& h);

struct CoverRecord {
  double max_residual = 0.0;  // max over f of min over cover of mu0-disagreement
  bool verified = false;
  std::vector<std::size_t> indices;  // positions in the input family
};

struct Cover {
  HypothesisFamily members;
  CoverRecord record;
};

Cover build_uniform_cover(const HypothesisFamily& h, const Distribution& mu0, double delta);

HypothesisFamily max_packing(const HypothesisFamily& h, const DistributionFamily& family, double eps,
                             double tol = kMassTol);

}  // namespace gensmooth
