#include "gensmooth/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gensmooth {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) { fail(ErrorCode::kMalformed, "instance: " + what); }

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) malformed(std::string("missing field '") + key + "'");
  return obj.at(key);
}

double parse_decimal(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) malformed("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> probability_text(const json& row, std::size_t n) {
  if (!row.is_array()) malformed("probabilities must be an array");
  if (row.size() != n) fail(ErrorCode::kOutOfRange, "instance: probability row length differs from atom count");
  std::vector<std::string> out;
  for (const auto& v : row) {
    if (v.is_string())
      out.push_back(v.get<std::string>());
    else if (v.is_number())
      out.push_back(v.dump());
    else
      malformed("probabilities must be strings or numbers");
  }
  return out;
}

Distribution distribution_from(const std::vector<std::string>& text) {
  std::vector<double> p;
  for (const auto& s : text) p.push_back(parse_probability(s));
  return Distribution(std::move(p));
}

std::vector<int> int_array(const json& row, const char* what) {
  if (!row.is_array()) malformed(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& v : row) {
    if (!v.is_number_integer()) malformed(std::string(what) + " entries must be integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

double parse_probability(const std::string& text) {
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const double num = parse_decimal(text.substr(0, slash));
    const double den = parse_decimal(text.substr(slash + 1));
    if (den == 0.0) malformed("zero denominator in '" + text + "'");
    return num / den;
  }
  return parse_decimal(text);
}

const HypothesisFamily& Instance::hypotheses_named(const std::string& name) const {
  for (const auto& h : hypotheses)
    if (h.name == name) return h.family;
  fail(ErrorCode::kInput, "no hypothesis family named '" + name + "'");
}

namespace {

Instance parse_document(const json& doc);

}  // namespace

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  try {
    return parse_document(doc);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
}

namespace {

Instance parse_document(const json& doc) {
  const json& atoms = field(doc, "atoms");
  std::vector<std::string> labels;
  if (atoms.is_number_unsigned()) {
    for (std::size_t i = 0; i < atoms.get<std::size_t>(); ++i) labels.push_back("x" + std::to_string(i));
  } else if (atoms.is_array()) {
    for (const auto& a : atoms) {
      if (!a.is_string()) malformed("atom labels must be strings");
      labels.push_back(a.get<std::string>());
    }
  } else {
    malformed("'atoms' must be a count or a list of labels");
  }
  FiniteSpace space(labels);
  const std::size_t n = space.atom_count();

  const json& dists = field(doc, "distributions");
  if (!dists.is_array() || dists.empty()) malformed("'distributions' must be a non-empty array");
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> texts;
  std::vector<Distribution> members;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const json& d = dists[i];
    const json& row = d.is_object() ? field(d, "probs") : d;
    auto t = probability_text(row, n);
    auto mu = distribution_from(t);
    if (std::find(members.begin(), members.end(), mu) != members.end()) continue;
    names.push_back(d.is_object() && d.contains("name") ? d.at("name").get<std::string>() : "m" + std::to_string(i));
    texts.push_back(std::move(t));
    members.push_back(std::move(mu));
  }

  std::optional<Distribution> base;
  std::vector<std::string> base_text;
  if (doc.contains("base")) {
    base_text = probability_text(doc.at("base"), n);
    base = distribution_from(base_text);
  }

  std::vector<NamedHypotheses> hypotheses;
  if (doc.contains("hypotheses")) {
    const json& hs = doc.at("hypotheses");
    if (!hs.is_array()) malformed("'hypotheses' must be an array");
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const json& h = hs[k];
      const std::string name = h.contains("name") ? h.at("name").get<std::string>() : "h" + std::to_string(k);
      std::optional<std::vector<int>> rank;
      if (h.contains("preorder")) rank = int_array(h.at("preorder"), "preorder");
      std::vector<Subset> fs;
      if (h.contains("labelings")) {
        for (const auto& row : h.at("labelings")) {
          const auto bits = int_array(row, "labeling");
          if (bits.size() != n) fail(ErrorCode::kOutOfRange, "instance: labeling length differs from atom count");
          Subset f;
          for (std::size_t x = 0; x < n; ++x) {
            if (bits[x] != 0 && bits[x] != 1) malformed("labels must be 0 or 1");
            if (bits[x]) f = f | Subset::singleton(x);
          }
          fs.push_back(f);
        }
      } else if (h.contains("masks")) {
        for (const auto& v : h.at("masks")) {
          if (!v.is_number_unsigned()) malformed("masks must be non-negative integers");
          const Subset f{v.get<std::uint64_t>()};
          if (!f.subset_of(Subset::full(n))) fail(ErrorCode::kOutOfRange, "instance: mask exceeds atom count");
          fs.push_back(f);
        }
      } else if (rank) {
        // A bare preorder stands for its full threshold family.
        if (rank->size() != n) fail(ErrorCode::kOutOfRange, "instance: preorder length differs from atom count");
        hypotheses.push_back({name, HypothesisFamily::thresholds(*rank)});
        continue;
      } else {
        malformed("hypothesis family needs 'labelings', 'masks' or a 'preorder'");
      }
      hypotheses.push_back({name, HypothesisFamily(n, std::move(fs), std::move(rank))});
    }
  }
  return Instance{std::move(space), DistributionFamily(std::move(members)), std::move(names), std::move(texts),
                  std::move(base),  std::move(base_text), std::move(hypotheses)};
}

}  // namespace

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInput, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string dump_instance(const Instance& instance) {
  json doc;
  doc["atoms"] = instance.space.labels();
  json dists = json::array();
  for (std::size_t i = 0; i < instance.family.size(); ++i)
    dists.push_back({{"name", instance.member_names[i]}, {"probs", instance.member_text[i]}});
  doc["distributions"] = std::move(dists);
  if (instance.base) doc["base"] = instance.base_text;
  if (!instance.hypotheses.empty()) {
    json hs = json::array();
    for (const auto& h : instance.hypotheses) {
      json rows = json::array();
      for (Subset f : h.family.members()) {
        std::vector<int> bits(instance.space.atom_count());
        for (std::size_t x = 0; x < bits.size(); ++x) bits[x] = f.contains(x) ? 1 : 0;
        rows.push_back(bits);
      }
      json entry = {{"name", h.name}, {"labelings", std::move(rows)}};
      if (h.family.rank()) entry["preorder"] = *h.family.rank();
      hs.push_back(std::move(entry));
    }
    doc["hypotheses"] = std::move(hs);
  }
  return doc.dump(2) + "\n";
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kInput, "cannot write " + path.string());
  out << dump_instance(instance);
}

}  // namespace gensmooth
