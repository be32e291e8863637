#include <doctest.h>

#include <cmath>

#include "gensmooth/smoothness.hpp"
#include "oracles.hpp"

using namespace gensmooth;

namespace {

DistributionFamily pair_family() {
  return DistributionFamily({Distribution({0.7, 0.1, 0.1, 0.1}), Distribution({0.1, 0.7, 0.1, 0.1})});
}

const std::vector<double> quarter_grid{0.0, 0.25, 0.5, 0.75, 1.0};

std::vector<double> fine_grid(int steps) {
  std::vector<double> g;
  for (int k = 0; k <= steps; ++k) g.push_back(static_cast<double>(k) / steps);
  return g;
}

}  // namespace

TEST_CASE("profile evaluation takes the step above") {
  const ToleranceProfile rho({{0.1, 0.2}, {0.5, 0.6}, {0.9, 0.95}});
  CHECK(rho(0.0) == 0.2);
  CHECK(rho(0.1) == 0.2);
  CHECK(rho(0.1000001) == 0.6);
  CHECK(rho(0.9) == 0.95);
  CHECK(rho(0.95) == 1.0);
  CHECK(rho.inverse(0.6) == 0.5);
  CHECK(rho.inverse(0.1) == std::nullopt);
  CHECK_THROWS_AS(ToleranceProfile({{0.5, 0.6}, {0.4, 0.7}}), Error);
  CHECK_THROWS_AS(ToleranceProfile({{0.4, 0.6}, {0.5, 0.5}}), Error);
}

TEST_CASE("well-behaved flag") {
  const auto grid = fine_grid(20);
  CHECK(ToleranceProfile::sample([](double z) { return std::sqrt(z); }, grid).well_behaved());
  CHECK(ToleranceProfile::sample([](double z) { return z; }, grid).well_behaved());
  CHECK(ToleranceProfile::sample([](double z) { return std::min(2.8 * z, 1.0); }, grid).well_behaved());
  CHECK_FALSE(ToleranceProfile::sample([](double z) { return z * z; }, grid).well_behaved());
  const auto fixed = ToleranceProfile::sample([](double z) { return z * z; }, grid).ratio_regularized();
  CHECK(fixed.well_behaved());
  for (double z : grid) CHECK(fixed(z) >= z * z);
}

TEST_CASE("tolerance profile examples") {
  const DistributionFamily uni({Distribution::uniform(4)});
  const std::vector<double> g{0.3};
  CHECK(tolerance_profile(uni, Distribution::uniform(4), g).breakpoints()[0].value == doctest::Approx(0.25));
  const std::vector<double> g2{0.25};
  CHECK(tolerance_profile(pair_family(), Distribution::uniform(4), g2).breakpoints()[0].value == doctest::Approx(0.7));
  const std::vector<double> g3{1.0};
  CHECK(tolerance_profile(pair_family(), Distribution({0.4, 0.3, 0.2, 0.1}), g3).breakpoints()[0].value ==
        doctest::Approx(1.0));
}

TEST_CASE("tolerance profile matches brute force and certifies itself") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng() % 8;
    const auto raw = oracle::random_family(rng, n, 1 + rng() % 4, 0.2);
    const auto fam = oracle::to_family(raw);
    const auto p0 = oracle::random_simplex(rng, n);
    const Distribution mu0(p0);
    const auto grid = fine_grid(10);
    const auto rho = tolerance_profile(fam, mu0, grid);
    CHECK_FALSE(rho.lower_bound());
    for (const auto& b : rho.breakpoints()) {
      double best = 0.0;
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
        if (oracle::mass(p0, m) <= b.z + kMassTol) best = std::max(best, oracle::envelope(raw, m));
      CHECK(b.value == doctest::Approx(best));
    }
    CHECK(verify_certificate(fam, mu0, rho).verified);
    const auto greedy = tolerance_profile(fam, mu0, grid, SearchMode::kGreedy);
    CHECK(greedy.lower_bound());
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(greedy.breakpoints()[k].value <= rho.breakpoints()[k].value + kMassTol);
  }
}

TEST_CASE("exact profile refuses large spaces") {
  const DistributionFamily big({Distribution::uniform(21)});
  const std::vector<double> g{0.5};
  CHECK_THROWS_AS(tolerance_profile(big, Distribution::uniform(21), g), Error);
  CHECK_NOTHROW(tolerance_profile(big, Distribution::uniform(21), g, SearchMode::kGreedy));
}

TEST_CASE("verify certificate examples") {
  const auto mu0 = Distribution::uniform(4);
  const auto linear = ToleranceProfile::sample([](double z) { return std::min(2.8 * z, 1.0); }, quarter_grid);
  CHECK(verify_certificate(pair_family(), mu0, linear).verified);
  const auto identity = ToleranceProfile::sample([](double z) { return z; }, quarter_grid);
  const auto bad = verify_certificate(pair_family(), mu0, identity);
  CHECK_FALSE(bad.verified);
  REQUIRE(bad.witness.has_value());
  CHECK(*bad.witness == Subset::singleton(0));
  CHECK(verify_certificate(DistributionFamily({mu0}), mu0, identity).verified);
}

TEST_CASE("construct certificate examples") {
  const auto mu0 = Distribution::uniform(4);
  const std::vector<double> two{0.5, 0.25};
  const auto self = construct_certificate(DistributionFamily({mu0}), two);
  CHECK(self.certificate.verified);
  const std::vector<double> three{0.5, 0.25, 0.125};
  const auto pair = construct_certificate(pair_family(), three);
  CHECK(pair.certificate.verified);
  CHECK(pair.certificate.profile(0.0) == doctest::Approx(0.25));
  for (const auto& s : pair.scales) CHECK_FALSE(scale_violation(pair_family(), s).has_value());
}

TEST_CASE("construct certificate on random families") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 8;
    const auto fam = oracle::to_family(oracle::random_family(rng, n, 1 + rng() % 5, 0.4));
    const std::vector<double> eps{0.6, 0.3, 0.1, 0.05};
    const auto built = construct_certificate(fam, eps);
    CHECK(built.certificate.verified);
    for (std::size_t i = 0; i < built.scales.size(); ++i) {
      CHECK_FALSE(scale_violation(fam, built.scales[i]).has_value());
      if (i > 0) {
        CHECK(built.scales[i].mass >= built.scales[i - 1].mass);
        CHECK(built.scales[i].delta < built.scales[i - 1].delta);
      }
    }
    CHECK(built.certificate.profile(0.0) == doctest::Approx(2 * 0.05));
  }
}

TEST_CASE("certified profiles give uniform covers") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 8;
    const auto raw = oracle::random_family(rng, n, 1 + rng() % 4, 0.2);
    const auto fam = oracle::to_family(raw);
    const Distribution mu0(oracle::random_simplex(rng, n));
    const auto rho = tolerance_profile(fam, mu0, fine_grid(20));
    REQUIRE(verify_certificate(fam, mu0, rho).verified);
    std::vector<Subset> fs;
    for (int k = 0; k < 16; ++k) fs.push_back(Subset{rng() & Subset::full(n).mask});
    const HypothesisFamily h(n, fs);
    for (double eps : {0.2, 0.4, 0.7}) {
      const auto delta = rho.inverse(eps);
      if (!delta) continue;
      const auto cover = build_uniform_cover(h, mu0, *delta);
      for (auto f : h.members()) {
        double nearest = 1e9;
        for (auto g : cover.members.members()) nearest = std::min(nearest, oracle::envelope(raw, (f ^ g).mask));
        CHECK(nearest <= eps + kMassTol);
      }
    }
  }
}
