#include "gensmooth/experiment.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "gensmooth/adversaries.hpp"
#include "gensmooth/coupling.hpp"
#include "gensmooth/learners.hpp"
#include "gensmooth/privacy.hpp"
#include "gensmooth/rng.hpp"

namespace gensmooth {

using nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t hash_doubles(std::uint64_t h, std::span<const double> values) {
  for (double v : values) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kMalformed, std::string("config: ") + e.what());
  }
  try {
    ExperimentConfig c;
    c.instance = doc.at("instance").get<std::string>();
    if (c.instance.is_relative() && !base_dir.empty()) c.instance = base_dir / c.instance;
    const json& adv = doc.at("adversary");
    c.adversary.kind = adv.at("kind").get<std::string>();
    c.adversary.member_weights = adv.value("member_weights", std::vector<double>{});
    c.adversary.schedule = adv.value("schedule", std::vector<std::size_t>{});
    c.adversary.target_family = adv.value("target_family", std::string{});
    c.adversary.target_index = adv.value("target_index", std::size_t{0});
    c.adversary.noise = adv.value("noise", 0.0);
    c.adversary.eps = adv.value("eps", 0.0);
    c.adversary.depth = adv.value("depth", std::size_t{0});
    c.adversary.probe_budget = adv.value("probe_budget", std::size_t{1});
    c.adversary.blocks = adv.value("blocks", std::size_t{1});
    const json& learner = doc.at("learner");
    c.learner.kind = learner.at("kind").get<std::string>();
    c.learner.eps = learner.value("eps", 0.1);
    c.learner.value = learner.value("value", 0);
    if (learner.contains("profile_slope")) c.learner.profile_slope = learner.at("profile_slope").get<double>();
    c.comparator = doc.value("comparator", std::string{});
    c.horizons = doc.at("horizons").get<std::vector<std::size_t>>();
    c.trials = doc.value("trials", std::size_t{1});
    c.seed = doc.value("seed", std::uint64_t{0});
    c.eps_grid = doc.value("eps_grid", std::vector<double>{});
    if (doc.contains("coupling_eps")) c.coupling_eps = doc.at("coupling_eps").get<double>();
    if (doc.contains("output")) {
      c.output = doc.at("output").get<std::string>();
      if (c.output.is_relative() && !base_dir.empty()) c.output = base_dir / c.output;
    }
    require(!c.horizons.empty() && std::is_sorted(c.horizons.begin(), c.horizons.end()), "horizons must be ascending");
    require(c.trials >= 1, "at least one trial per horizon");
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformed, std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInput, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t horizon, std::size_t trial) {
  return derive_seed(base, horizon, trial);
}

namespace {

struct Setup {
  std::unique_ptr<Adversary> adversary;
  HypothesisFamily comparator;
  std::map<std::string, std::string> metadata;
};

std::vector<double> profile_grid(const ExperimentConfig& config) {
  if (!config.eps_grid.empty()) return config.eps_grid;
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(k / 100.0);
  return grid;
}

Setup build_adversary(const ExperimentConfig& config, const Instance& instance) {
  const auto& family = instance.family;
  const auto& spec = config.adversary;
  const auto target = [&] {
    const auto& name = spec.target_family.empty() ? config.comparator : spec.target_family;
    const auto& h = instance.hypotheses_named(name);
    require(spec.target_index < h.size(), "target index outside its hypothesis family");
    return h[spec.target_index];
  };
  if (spec.kind == "iid") {
    auto weights = spec.member_weights.empty() ? std::vector<double>(family.size(), 1.0) : spec.member_weights;
    return {std::make_unique<IidAdversary>(family, std::move(weights), target(), spec.noise),
            instance.hypotheses_named(config.comparator), {}};
  }
  if (spec.kind == "oblivious-schedule") {
    return {std::make_unique<ScheduleAdversary>(family, spec.schedule, target(), spec.noise),
            instance.hypotheses_named(config.comparator), {}};
  }
  if (spec.kind == "threshold-hiding") {
    const auto mode = family.atom_count() <= kPackingCutoff ? SearchMode::kExact : SearchMode::kGreedy;
    const auto parts = fragmentation_number(family, spec.eps, mode);
    auto adv = make_threshold_hiding_adversary(family, parts, spec.depth, spec.probe_budget);
    HypothesisFamily comparator = adv.comparator();
    return {std::make_unique<ThresholdHidingAdversary>(std::move(adv)), std::move(comparator),
            {{"adversary_fragmentation", std::to_string(parts.count)}}};
  }
  if (spec.kind == "fragmentation-lb") {
    auto built = make_fragmentation_adversary(family, spec.eps, spec.blocks);
    std::map<std::string, std::string> meta{{"adversary_fragmentation", std::to_string(built.fragmentation)},
                                            {"comparator_vc", std::to_string(built.comparator_vc)},
                                            {"comparator_size", std::to_string(built.comparator.size())}};
    return {std::make_unique<FragmentationAdversary>(std::move(built.adversary)), std::move(built.comparator),
            std::move(meta)};
  }
  fail(ErrorCode::kInput, "unknown adversary kind '" + spec.kind + "'");
}

ToleranceProfile build_profile(const ExperimentConfig& config, const Instance& instance) {
  require(instance.base.has_value(), "this experiment needs a base measure in the instance");
  const auto grid = profile_grid(config);
  if (config.learner.profile_slope) {
    const double slope = *config.learner.profile_slope;
    return ToleranceProfile::sample([slope](double z) { return std::min(slope * z, 1.0); }, grid);
  }
  return tolerance_profile(instance.family, *instance.base, grid);
}

}  // namespace

RegretReport run_experiment(const ExperimentConfig& config) {
  const auto instance = load_instance(config.instance);
  return run_experiment(config, instance);
}

RegretReport run_experiment(const ExperimentConfig& config, const Instance& instance) {
  auto setup = build_adversary(config, instance);
  const auto& family = instance.family;
  RegretReport report;
  report.metadata = setup.metadata;
  report.metadata["adversary"] = config.adversary.kind;
  report.metadata["learner"] = config.learner.kind;

  std::optional<ToleranceProfile> profile;
  if (config.learner.kind == "hedge-cover" || config.coupling_eps) {
    profile = build_profile(config, instance);
    std::uint64_t h = hash_doubles(0, instance.base->probs());
    for (const auto& b : profile->breakpoints()) h = hash_doubles(h, std::array{b.z, b.value});
    report.metadata["certificate_hash"] = hex64(h);
  }
  if (config.learner.kind == "hedge-cover") {
    const auto mode = family.atom_count() <= kPackingCutoff ? SearchMode::kExact : SearchMode::kGreedy;
    const auto frag = fragmentation_number(family, config.learner.eps, mode);
    report.metadata["learner_fragmentation"] = std::to_string(frag.count) + (frag.lower_bound ? " (lower bound)" : "");
  }

  // Atoms kept by the coupling for each member; samples elsewhere are dummy rounds.
  std::vector<Subset> kept;
  if (config.coupling_eps) {
    const auto regular = profile->ratio_regularized();
    for (const auto& mu : family.members()) kept.push_back(couple_step(mu, *instance.base, regular, *config.coupling_eps).kept_mask);
  }

  for (std::size_t horizon : config.horizons) {
    std::unique_ptr<Learner> learner;
    if (config.learner.kind == "erm") {
      learner = std::make_unique<ErmLearner>(setup.comparator);
    } else if (config.learner.kind == "constant") {
      learner = std::make_unique<ConstantLearner>(family.atom_count(), config.learner.value);
    } else if (config.learner.kind == "hedge-cover") {
      auto built = make_hedge_cover_learner(setup.comparator, family, *instance.base, *profile, config.learner.eps, horizon);
      report.metadata["cover_radius"] = shortest(built.delta);
      report.metadata["cover_size"] = std::to_string(built.learner.experts().size());
      learner = std::make_unique<HedgeLearner>(std::move(built.learner));
    } else {
      fail(ErrorCode::kInput, "unknown learner kind '" + config.learner.kind + "'");
    }
    for (std::size_t trial = 0; trial < config.trials; ++trial) {
      try {
        const auto transcript = run_protocol(*setup.adversary, *learner, family, setup.comparator, horizon,
                                             trial_seed(config.seed, horizon, trial));
        if (comparator_losses(transcript, setup.comparator) != transcript.comparator_losses)
          throw std::logic_error("comparator recomputation disagrees with incremental accounting");
        TrialResult r{horizon, trial, transcript.regret(), transcript.expected_regret(), 0};
        if (!kept.empty())
          for (const auto& round : transcript.rounds) r.dummy_rounds += !kept[round.member].contains(round.atom);
        report.trials.push_back(r);
      } catch (const Error& e) {
        throw Error(e.code(), "T=" + std::to_string(horizon) + " trial=" + std::to_string(trial) + ": " + e.what());
      }
    }
  }
  report.horizons = summarize(report.trials);
  report.slope = fit_loglog_slope(report.horizons);
  report.metadata["timestamp"] =
      std::to_string(std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
  return report;
}

std::vector<HorizonSummary> summarize(const std::vector<TrialResult>& trials) {
  std::map<std::size_t, std::vector<const TrialResult*>> by_horizon;
  for (const auto& t : trials) by_horizon[t.horizon].push_back(&t);
  std::vector<HorizonSummary> out;
  for (const auto& [horizon, rows] : by_horizon) {
    HorizonSummary s;
    s.horizon = horizon;
    s.trials = rows.size();
    const double k = static_cast<double>(rows.size());
    for (const auto* r : rows) {
      s.mean_regret += r->regret / k;
      s.mean_expected += r->expected_regret / k;
    }
    if (rows.size() > 1) {
      double vr = 0.0, ve = 0.0;
      for (const auto* r : rows) {
        vr += (r->regret - s.mean_regret) * (r->regret - s.mean_regret);
        ve += (r->expected_regret - s.mean_expected) * (r->expected_regret - s.mean_expected);
      }
      s.stderr_regret = std::sqrt(vr / (k - 1.0) / k);
      s.stderr_expected = std::sqrt(ve / (k - 1.0) / k);
    }
    out.push_back(s);
  }
  return out;
}

double fit_loglog_slope(const std::vector<HorizonSummary>& horizons) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& h : horizons)
    if (h.mean_expected > 0.0) pts.emplace_back(std::log(static_cast<double>(h.horizon)), std::log(h.mean_expected));
  if (pts.size() < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

void write_report_csv(std::ostream& out, const RegretReport& report) {
  out << "T,trial,regret,expected_regret,dummy_rounds\n";
  for (const auto& t : report.trials)
    out << t.horizon << ',' << t.trial << ',' << shortest(t.regret) << ',' << shortest(t.expected_regret) << ','
        << t.dummy_rounds << '\n';
}

RegretReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "T,trial,regret,expected_regret,dummy_rounds")
    fail(ErrorCode::kMalformed, "report: unexpected header");
  RegretReport report;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) fail(ErrorCode::kMalformed, "report: expected 5 columns");
    try {
      report.trials.push_back({std::stoul(cells[0]), std::stoul(cells[1]), std::stod(cells[2]), std::stod(cells[3]),
                               std::stoul(cells[4])});
    } catch (const std::exception&) {
      fail(ErrorCode::kMalformed, "report: bad number in '" + line + "'");
    }
  }
  report.horizons = summarize(report.trials);
  report.slope = fit_loglog_slope(report.horizons);
  return report;
}

void write_summary_csv(std::ostream& out, const RegretReport& report) {
  out << "T,trials,mean_regret,stderr_regret,mean_expected_regret,stderr_expected_regret\n";
  for (const auto& h : report.horizons)
    out << h.horizon << ',' << h.trials << ',' << shortest(h.mean_regret) << ',' << shortest(h.stderr_regret) << ','
        << shortest(h.mean_expected) << ',' << shortest(h.stderr_expected) << '\n';
}

void write_plotdata(std::ostream& out, const RegretReport& report) {
  for (const auto& h : report.horizons)
    out << h.horizon << ' ' << shortest(h.mean_expected) << ' ' << shortest(h.stderr_expected) << '\n';
}

std::string metadata_json(const RegretReport& report) {
  json doc(report.metadata);
  doc["slope"] = report.slope;
  return doc.dump(2) + "\n";
}

PrivateStudy run_private_study(const HypothesisFamily& h, const DistributionFamily& family, const Distribution& mu0,
                               const ToleranceProfile& profile, const PrivateStudySpec& spec) {
  require(spec.target < h.size(), "target outside the hypothesis family");
  const auto cert = verify_certificate(family, mu0, profile);
  require(cert.verified, "tolerance profile is not certified for this family");
  const auto radius = profile.inverse(spec.eps);
  require(radius.has_value() && *radius > 0.0, "no positive base-measure radius reaches eps under the profile");

  PrivateStudy study{*radius, build_uniform_cover(h, mu0, *radius).members, vc_dimension(h, h.atom_count()), {}, {}};
  study.sample_size = private_sample_size(study.vc, spec.eps, spec.delta, spec.alpha, *radius, spec.constant);
  const MechanismSpec mech{study.cover, spec.alpha};
  const Subset target = h[spec.target];
  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    const std::size_t member = trial % family.size();
    const auto& mu = family[member];
    Rng rng(derive_seed(spec.seed, trial));
    LabeledDataset data;
    data.examples.reserve(study.sample_size.total);
    for (std::size_t i = 0; i < study.sample_size.total; ++i) {
      const std::size_t x = rng.categorical(mu.probs());
      data.examples.push_back({x, target.contains(x) ? 1 : 0});
    }
    const std::size_t pick = exp_mech_learn(mech, data, rng.next());
    double best = 1.0;
    for (Subset f : h.members()) best = std::min(best, mu.mass(f ^ target));
    study.trials.push_back({trial, member, pick, mu.mass(study.cover[pick] ^ target) - best});
  }
  return study;
}

}  // namespace gensmooth
