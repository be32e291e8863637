#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gensmooth/instance.hpp"
#include "gensmooth/privacy.hpp"
#include "gensmooth/smoothness.hpp"

namespace gensmooth {

struct AdversarySpec {
  std::string kind = "iid";  // iid | oblivious-schedule | threshold-hiding | fragmentation-lb
  std::vector<double> member_weights;  // iid; empty means uniform over members
  std::vector<std::size_t> schedule;   // oblivious-schedule
  std::string target_family;           // labels come from this family's member target_index
  std::size_t target_index = 0;
  double noise = 0.0;
  double eps = 0.0;  // lower-bound adversaries
  std::size_t depth = 0;
  std::size_t probe_budget = 1;
  std::size_t blocks = 1;
};

struct LearnerSpec {
  std::string kind = "erm";  // erm | hedge-cover | constant
  double eps = 0.1;
  int value = 0;
  std::optional<double> profile_slope;  // rho(z) = min(slope z, 1); exact tolerance profile otherwise
};

struct ExperimentConfig {
  std::filesystem::path instance;
  AdversarySpec adversary;
  LearnerSpec learner;
  std::string comparator;  // hypothesis family name; lower-bound adversaries supply their own
  std::vector<std::size_t> horizons;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<double> eps_grid;  // profile grid
  std::optional<double> coupling_eps;
  std::filesystem::path output;
};

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialResult {
  std::size_t horizon = 0;
  std::size_t trial = 0;
  double regret = 0.0;
  double expected_regret = 0.0;
  std::size_t dummy_rounds = 0;
};

struct HorizonSummary {
  std::size_t horizon = 0;
  std::size_t trials = 0;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_expected = 0.0;
  double stderr_expected = 0.0;
};

struct RegretReport {
  std::vector<TrialResult> trials;
  std::vector<HorizonSummary> horizons;
  double slope = 0.0;  // least-squares slope of log mean expected regret against log T
  std::map<std::string, std::string> metadata;
};

RegretReport run_experiment(const ExperimentConfig& config);
RegretReport run_experiment(const ExperimentConfig& config, const Instance& instance);

std::uint64_t trial_seed(std::uint64_t base, std::size_t horizon, std::size_t trial);
std::vector<HorizonSummary> summarize(const std::vector<TrialResult>& trials);
double fit_loglog_slope(const std::vector<HorizonSummary>& horizons);

void write_report_csv(std::ostream& out, const RegretReport& report);
RegretReport read_report_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const RegretReport& report);
void write_plotdata(std::ostream& out, const RegretReport& report);
std::string metadata_json(const RegretReport& report);

// Exponential mechanism over the eps-uniform cover, fed samples from each member in turn.
struct PrivateStudySpec {
  std::size_t target = 0;  // index of the labeling hypothesis
  double alpha = 0.5;
  double eps = 0.1;
  double delta = 0.05;
  double constant = 1.0;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

struct PrivateTrial {
  std::size_t trial = 0;
  std::size_t member = 0;
  std::size_t hypothesis = 0;  // index into the cover
  double excess = 0.0;
};

struct PrivateStudy {
  double cover_radius = 0.0;
  HypothesisFamily cover;
  int vc = 0;
  SampleSizeTerms sample_size;
  std::vector<PrivateTrial> trials;
};

PrivateStudy run_private_study(const HypothesisFamily& h, const DistributionFamily& family, const Distribution& mu0,
                               const ToleranceProfile& profile, const PrivateStudySpec& spec);

}  // namespace gensmooth
