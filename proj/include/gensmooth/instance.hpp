#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gensmooth/measure.hpp"

namespace gensmooth {

struct NamedHypotheses {
  std::string name;
  HypothesisFamily family;
};

struct Instance {
  FiniteSpace space;
  DistributionFamily family;
  std::vector<std::string> member_names;
  std::vector<std::vector<std::string>> member_text;  // probabilities exactly as written
  std::optional<Distribution> base;
  std::vector<std::string> base_text;
  std::vector<NamedHypotheses> hypotheses;

  const HypothesisFamily& hypotheses_named(const std::string& name) const;
};

// Accepts decimals ("0.25") and ratios ("1/3").
double parse_probability(const std::string& text);

Instance parse_instance(const std::string& text);
Instance load_instance(const std::filesystem::path& path);
std::string dump_instance(const Instance& instance);
void save_instance(const Instance& instance, const std::filesystem::path& path);

}  // namespace gensmooth
