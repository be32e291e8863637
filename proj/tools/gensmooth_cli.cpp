#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gensmooth/experiment.hpp"
#include "gensmooth/smoothness.hpp"

using namespace gensmooth;
using nlohmann::json;

namespace {

std::string decimal(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

json atoms_of(Subset s) { return s.atoms(); }

json profile_json(const ToleranceProfile& rho) {
  json steps = json::array();
  for (const auto& b : rho.breakpoints()) steps.push_back({{"z", decimal(b.z)}, {"value", decimal(b.value)}});
  return {{"breakpoints", std::move(steps)}, {"well_behaved", rho.well_behaved()}, {"lower_bound", rho.lower_bound()}};
}

std::vector<double> unit_grid(int steps) {
  std::vector<double> g;
  for (int k = 0; k <= steps; ++k) g.push_back(static_cast<double>(k) / steps);
  return g;
}

ToleranceProfile instance_profile(const Instance& inst, std::optional<double> slope, int steps) {
  const auto grid = unit_grid(steps);
  if (slope) return ToleranceProfile::sample([s = *slope](double z) { return std::min(s * z, 1.0); }, grid);
  return tolerance_profile(inst.family, *inst.base, grid);
}

int certify(const std::string& path, const std::vector<double>& eps_seq) {
  const auto inst = load_instance(path);
  const auto built = construct_certificate(inst.family, eps_seq);
  const auto& cert = built.certificate;
  json base = json::array();
  for (double p : cert.base.probs()) base.push_back(decimal(p));
  json scales = json::array();
  for (const auto& s : built.scales) {
    json picks = json::array();
    for (const auto& sel : s.selections) picks.push_back({{"member", inst.member_names[sel.member]}, {"set", atoms_of(sel.set)}});
    scales.push_back({{"eps", decimal(s.eps)},
                      {"selections", std::move(picks)},
                      {"fallback", s.fallback},
                      {"mass", decimal(s.mass)},
                      {"delta", decimal(s.delta)},
                      {"holds", !scale_violation(inst.family, s).has_value()}});
  }
  json out{{"verified", cert.verified},
           {"base", std::move(base)},
           {"profile", profile_json(cert.profile)},
           {"scales", std::move(scales)}};
  if (cert.witness) out["witness"] = atoms_of(*cert.witness);
  std::cout << out.dump(2) << '\n';
  return cert.verified ? 0 : 1;
}

int fragment(const std::string& path, double eps, const std::string& mode) {
  const auto inst = load_instance(path);
  const auto w = fragmentation_number(inst.family, eps, mode == "greedy" ? SearchMode::kGreedy : SearchMode::kExact);
  json parts = json::array();
  for (std::size_t i = 0; i < w.count; ++i)
    parts.push_back({{"atoms", atoms_of(w.parts[i])},
                     {"member", inst.member_names[w.witnesses[i]]},
                     {"mass", decimal(inst.family[w.witnesses[i]].mass(w.parts[i]))}});
  json out{{"eps", decimal(eps)}, {"count", w.count}, {"lower_bound", w.lower_bound}, {"parts", std::move(parts)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int private_study(const std::string& path, const std::string& family_name, std::optional<std::size_t> target,
                  PrivateStudySpec spec, std::optional<double> slope, int steps) {
  const auto inst = load_instance(path);
  require(inst.base.has_value(), "the instance needs a base measure");
  require(!inst.hypotheses.empty(), "the instance needs a hypothesis family");
  const auto& h = family_name.empty() ? inst.hypotheses.front().family : inst.hypotheses_named(family_name);
  spec.target = target.value_or(h.size() / 2);
  const auto study = run_private_study(h, inst.family, *inst.base, instance_profile(inst, slope, steps), spec);
  std::cerr << "cover_radius=" << decimal(study.cover_radius) << " cover_size=" << study.cover.size()
            << " vc=" << study.vc << " m=" << study.sample_size.total << " (statistical "
            << decimal(study.sample_size.statistical) << ", privacy " << decimal(study.sample_size.privacy) << ")\n";
  std::cout << "trial,excess_error,sampled_hypothesis\n";
  std::size_t good = 0;
  for (const auto& t : study.trials) {
    std::cout << t.trial << ',' << decimal(t.excess) << ',' << t.hypothesis << '\n';
    good += t.excess <= 2 * spec.eps + kMassTol;
  }
  std::cerr << "accurate_fraction=" << decimal(static_cast<double>(good) / static_cast<double>(study.trials.size()))
            << '\n';
  return 0;
}

RegretReport simulate(ExperimentConfig config, const std::string& out_path, std::optional<std::size_t> trials) {
  if (trials) config.trials = *trials;
  if (!out_path.empty()) config.output = out_path;
  auto report = run_experiment(config);
  if (!config.output.empty()) {
    std::ofstream csv(config.output);
    if (!csv) fail(ErrorCode::kInput, "cannot write " + config.output.string());
    write_report_csv(csv, report);
    std::ofstream meta(config.output.string() + ".meta.json");
    meta << metadata_json(report);
  }
  return report;
}

int lowerbound(const ExperimentConfig& config, const RegretReport& report) {
  const auto& kind = config.adversary.kind;
  const double eps = config.adversary.eps;
  json rows = json::array();
  bool pass = true;
  for (const auto& h : report.horizons) {
    const double t = static_cast<double>(h.horizon);
    double bound = 0.0;
    double measured = h.mean_expected;
    if (kind == "threshold-hiding") {
      bound = eps * t / 8;
      measured = h.mean_regret;
    } else if (kind == "fragmentation-lb") {
      const double n = std::stod(report.metadata.at("adversary_fragmentation"));
      bound = 0.1 * std::sqrt(eps * t * std::log(n));
    } else {
      fail(ErrorCode::kInput, "lowerbound needs a threshold-hiding or fragmentation-lb adversary");
    }
    pass = pass && measured >= bound;
    rows.push_back({{"T", h.horizon},
                    {"trials", h.trials},
                    {"mean", decimal(measured)},
                    {"stderr", decimal(kind == "threshold-hiding" ? h.stderr_regret : h.stderr_expected)},
                    {"bound", decimal(bound)},
                    {"ratio", decimal(bound > 0 ? measured / bound : 0.0)}});
  }
  json out{{"adversary", kind}, {"horizons", std::move(rows)}, {"holds", pass}, {"metadata", report.metadata}};
  std::cout << out.dump(2) << '\n';
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized smoothness toolkit"};
  app.require_subcommand(1);

  std::string instance;
  std::vector<double> eps_seq;
  auto* cert_cmd = app.add_subcommand("certify", "Build and verify a smoothness certificate");
  cert_cmd->add_option("--instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  cert_cmd->add_option("--eps-seq", eps_seq, "Decreasing scales")->required()->delimiter(',');

  double eps = 0.1;
  std::string mode = "exact";
  auto* frag_cmd = app.add_subcommand("fragment", "Fragmentation number with a witness packing");
  frag_cmd->add_option("--instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  frag_cmd->add_option("--eps", eps, "Mass threshold")->required();
  frag_cmd->add_option("--mode", mode, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));

  PrivateStudySpec spec;
  std::string family_name;
  std::optional<std::size_t> target;
  std::optional<double> slope;
  int steps = 100;
  auto* priv_cmd = app.add_subcommand("private", "Accuracy trials of the exponential mechanism over a uniform cover");
  priv_cmd->add_option("--instance", instance, "Instance file")->required()->check(CLI::ExistingFile);
  priv_cmd->add_option("--alpha", spec.alpha, "Privacy parameter")->required();
  priv_cmd->add_option("--eps", spec.eps, "Accuracy target")->required();
  priv_cmd->add_option("--delta", spec.delta, "Failure probability")->required();
  priv_cmd->add_option("--trials", spec.trials, "Number of trials");
  priv_cmd->add_option("--seed", spec.seed, "Base seed");
  priv_cmd->add_option("--constant", spec.constant, "Sample-size constant");
  priv_cmd->add_option("--hypotheses", family_name, "Hypothesis family name");
  priv_cmd->add_option("--target", target, "Index of the labeling hypothesis");
  priv_cmd->add_option("--profile-slope", slope, "Use rho(z) = min(slope z, 1) instead of the exact profile");
  priv_cmd->add_option("--grid-steps", steps, "Profile grid resolution")->check(CLI::PositiveNumber);

  std::string config_path, out_path;
  std::optional<std::size_t> trials;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a regret experiment");
  sim_cmd->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", out_path, "Report CSV (overrides the config)");
  sim_cmd->add_option("--trials", trials, "Trials per horizon (overrides the config)");

  auto* lb_cmd = app.add_subcommand("lowerbound", "Run a lower-bound adversary and audit its bound");
  lb_cmd->add_option("--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  lb_cmd->add_option("--out", out_path, "Report CSV (overrides the config)");
  lb_cmd->add_option("--trials", trials, "Trials per horizon (overrides the config)");

  std::string in_path, format = "csv";
  auto* report_cmd = app.add_subcommand("report", "Summarize a report CSV");
  report_cmd->add_option("--in", in_path, "Report CSV")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", format, "csv or plotdata")->check(CLI::IsMember({"csv", "plotdata"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cert_cmd) return certify(instance, eps_seq);
    if (*frag_cmd) return fragment(instance, eps, mode);
    if (*priv_cmd) return private_study(instance, family_name, target, spec, slope, steps);
    if (*sim_cmd) {
      const auto report = simulate(load_config(config_path), out_path, trials);
      write_summary_csv(std::cout, report);
      std::cout << "slope," << decimal(report.slope) << '\n';
      return 0;
    }
    if (*lb_cmd) {
      const auto config = load_config(config_path);
      return lowerbound(config, simulate(config, out_path, trials));
    }
    if (*report_cmd) {
      std::ifstream in(in_path);
      const auto report = read_report_csv(in);
      if (format == "plotdata")
        write_plotdata(std::cout, report);
      else
        write_summary_csv(std::cout, report);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
