#include <doctest.h>

#include <cmath>

#include "gensmooth/coupling.hpp"
#include "gensmooth/rng.hpp"
#include "oracles.hpp"

using namespace gensmooth;

namespace {

ToleranceProfile sqrt_profile() {
  const std::vector<double> grid{0.04, 0.25, 0.5, 0.64, 1.0};
  return ToleranceProfile::sample([](double z) { return std::sqrt(z); }, grid);
}

std::vector<double> subset_mass_grid(const Distribution& mu0) {
  auto grid = mu0.subset_masses();
  for (auto& z : grid) z = std::clamp(z, 0.0, 1.0);
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

TEST_CASE("extended base") {
  const auto ext = extended_base(Distribution({0.5, 0.5}));
  CHECK(ext.atom_count() == 3);
  CHECK(ext[0] == doctest::Approx(0.25));
  CHECK(ext[2] == doctest::Approx(0.5));
}

TEST_CASE("couple step examples") {
  const auto uni = Distribution::uniform(4);
  const std::vector<double> grid{0.25, 0.5, 0.75, 1.0};
  const auto identity = ToleranceProfile::sample([](double z) { return z; }, grid);
  const auto same = couple_step(uni, uni, identity, 0.5);
  CHECK(same.kept_mask == Subset::full(4));
  CHECK(same.dummy_prob == 0.0);

  const Distribution skewed({0.4, 0.2, 0.2, 0.2});
  const auto cut = couple_step(skewed, uni, sqrt_profile(), 0.64);
  CHECK(cut.kept_mask == Subset{0b1110});
  CHECK(cut.dummy_prob == doctest::Approx(0.4));
  const std::vector<double> expected{0.0, 0.2, 0.2, 0.2, 0.4};
  for (std::size_t x = 0; x < 5; ++x) CHECK(cut.coupled_dist[x] == doctest::Approx(expected[x]));
  CHECK(cut.dummy_prob <= sqrt_profile()(0.64) + kMassTol);
  CHECK(cut.smooth_bound == doctest::Approx(2 * 1.25));
  const auto ratios = coupled_ratios(cut, uni);
  CHECK(ratios.real <= cut.smooth_bound + kMassTol);
  CHECK(ratios.dummy <= cut.dummy_bound + kMassTol);

  const auto loose = couple_step(skewed, uni, sqrt_profile(), 0.04);
  CHECK(loose.kept_mask == Subset::full(4));
  CHECK(loose.dummy_prob == 0.0);
}

TEST_CASE("couple step rejects ill-behaved profiles") {
  const std::vector<double> grid{0.25, 0.5, 1.0};
  const auto square = ToleranceProfile::sample([](double z) { return z * z; }, grid);
  const auto uni = Distribution::uniform(4);
  CHECK_THROWS_AS(couple_step(uni, uni, square, 0.5), Error);
}

TEST_CASE("atoms outside the base support are dropped") {
  const Distribution mu0({0.5, 0.5, 0.0});
  const Distribution mu({0.4, 0.4, 0.2});
  const std::vector<double> grid{0.5, 1.0};
  const auto rho = ToleranceProfile::sample([](double z) { return std::min(2 * z, 1.0); }, grid);
  const auto step = couple_step(mu, mu0, rho, 0.5);
  CHECK_FALSE(step.kept_mask.contains(2));
  CHECK(step.dummy_prob == doctest::Approx(0.2));
}

TEST_CASE("capped coupling examples") {
  const auto uni = Distribution::uniform(4);
  const auto same = couple_step_capped(uni, uni, 0.2, 0.2);
  CHECK(same.kept_mask == Subset::full(4));
  CHECK(same.dummy_prob == 0.0);
  CHECK(same.smooth_bound == doctest::Approx(4 / 0.2));

  const Distribution mu0({0.9, 0.05, 0.05});
  const Distribution heavy({0.0, 0.0, 1.0});
  const auto kept = couple_step_capped(Distribution({1.0, 0.0, 0.0}), mu0, 0.1, 0.1);
  CHECK(kept.kept_mask.contains(0));
  const auto dropped = couple_step_capped(heavy, mu0, 0.1, 0.1);
  CHECK_FALSE(dropped.kept_mask.contains(2));

  const DistributionFamily pair({Distribution({0.7, 0.1, 0.1, 0.1}), Distribution({0.1, 0.7, 0.1, 0.1})});
  const auto scaled = construct_scaled_base(pair, 0.35);
  const double eps = 0.35 / 4;
  REQUIRE(verify_small_set_bound(pair, scaled.base, eps, 0.7));
  for (const auto& mu : pair.members()) {
    const auto step = couple_step_capped(mu, scaled.base, eps, 0.7);
    CHECK(step.dummy_prob <= 0.7 + kMassTol);
    const auto ratios = coupled_ratios(step, scaled.base);
    CHECK(ratios.real <= step.smooth_bound + kMassTol);
    CHECK(ratios.dummy <= step.smooth_bound + kMassTol);
  }
}

TEST_CASE("coupling contracts on verified families") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng() % 8;
    const auto raw = oracle::random_family(rng, n, 1 + rng() % 4, 0.2);
    const auto fam = oracle::to_family(raw);
    std::vector<double> weights(fam.size() + 1, 1.0);
    std::vector<Distribution> parts = fam.members();
    parts.push_back(Distribution::uniform(n));
    const auto mu0 = Distribution::mixture(parts, weights);
    const auto grid = subset_mass_grid(mu0);
    const auto rho = tolerance_profile(fam, mu0, grid).ratio_regularized();
    REQUIRE(verify_certificate(fam, mu0, rho).verified);
    REQUIRE(rho.well_behaved());
    for (double eps : {0.05, 0.1, 0.3, 0.6}) {
      for (const auto& mu : fam.members()) {
        const auto step = couple_step(mu, mu0, rho, eps);
        CHECK(step.dummy_prob <= rho(eps) + kMassTol);
        const auto ratios = coupled_ratios(step, mu0);
        CHECK(ratios.real <= step.smooth_bound + kMassTol);
        CHECK(ratios.dummy <= step.dummy_bound + kMassTol);
        for (std::size_t x = 0; x < n; ++x)
          CHECK(step.coupled_dist[x] == (step.kept_mask.contains(x) ? mu[x] : 0.0));
      }
    }
  }
}

TEST_CASE("dummy round tail") {
  const Distribution mu0 = Distribution::uniform(6);
  const DistributionFamily fam({Distribution({0.3, 0.3, 0.1, 0.1, 0.1, 0.1}), Distribution({0.1, 0.1, 0.1, 0.1, 0.3, 0.3})});
  const auto grid = subset_mass_grid(mu0);
  const auto rho = tolerance_profile(fam, mu0, grid).ratio_regularized();
  const double eps = 1.0 / 6;
  const int horizon = 100;
  const double delta = 0.05;
  const double cap = 2 * rho(eps) * horizon + 2 * std::log(1 / delta);
  Rng rng(derive_seed(4, 4));
  int exceed = 0;
  const int runs = 2000;
  for (int r = 0; r < runs; ++r) {
    int dummy = 0;
    for (int t = 0; t < horizon; ++t) {
      const auto step = couple_step(fam[rng.bernoulli(0.5) ? 1 : 0], mu0, rho, eps);
      std::vector<double> law(step.coupled_dist.probs().begin(), step.coupled_dist.probs().end());
      dummy += rng.categorical(law) == 6;
    }
    exceed += dummy > cap;
  }
  CHECK(static_cast<double>(exceed) / runs <= delta + 0.01);
}

TEST_CASE("small set extraction") {
  const auto five = extract_small_set(Distribution::uniform(5), Subset::full(5), 0.3);
  CHECK(five.size() == 1);
  CHECK(extract_small_set(Distribution::uniform(4), Subset::full(4), 0.3).size() == 1);
  const auto ten = extract_small_set(Distribution::uniform(10), Subset::full(10), 0.35);
  CHECK(ten.size() == 2);
  CHECK(Distribution::uniform(10).mass(ten) == doctest::Approx(0.2));
  CHECK_THROWS_AS(extract_small_set(Distribution({0.5, 0.5}), Subset::full(2), 0.3), Error);
  CHECK_THROWS_AS(extract_small_set(Distribution::uniform(5), Subset{1}, 0.3), Error);

  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 12;
    const Distribution mu(oracle::random_simplex(rng, n));
    const double eps = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    bool ok = mu.mass(Subset::full(n)) > eps;
    for (std::size_t x = 0; x < n; ++x) ok = ok && mu[x] <= eps;
    if (!ok) continue;
    const auto b = extract_small_set(mu, Subset::full(n), eps);
    CHECK(mu.mass(b) > eps / 2);
    CHECK(mu.mass(b) <= eps + kMassTol);
  }
}
