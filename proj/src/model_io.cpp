#include "cflow/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cflow {

using nlohmann::json;

namespace {

std::vector<std::string> string_list(const json& value, const std::string& what) {
  if (!value.is_array()) throw ModelFormatError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : value) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (v.is_number()) {
      out.push_back(v.dump());
    } else {
      throw ModelFormatError(what + " must contain strings");
    }
  }
  return out;
}

std::vector<double> number_list(const json& value, const std::string& what) {
  if (!value.is_array()) throw ModelFormatError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) throw ModelFormatError(what + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Renormalizes small deviations (recording a warning) and rejects large ones.
void normalize(std::vector<double>& p, const std::string& what, std::vector<std::string>& warnings) {
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw ModelFormatError(what + " has a negative or non-finite entry");
    total += v;
  }
  const double deviation = std::abs(total - 1.0);
  if (deviation <= kExactNormalization) return;
  if (deviation > kRenormalizeLimit) {
    throw ModelFormatError(what + " sums to " + format_number(total) + ", too far from 1");
  }
  for (double& v : p) v /= total;
  warnings.push_back(what + " summed to " + format_number(total) + "; renormalized");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json subset_names(const ProductSpace& space, Subset m) {
  json out = json::array();
  for (int i : m.members()) out.push_back(space.name(i));
  return out;
}

std::string ordering_text(const ProductSpace& space, const std::vector<Subset>& ordering) {
  std::string out;
  for (std::size_t j = 0; j < ordering.size(); ++j) {
    if (j) out += ";";
    bool first = true;
    for (int i : ordering[j].members()) {
      if (!first) out += ",";
      out += space.name(i);
      first = false;
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char c : s) {
    if (c == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  out.push_back(current);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

LoadedModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ModelFormatError("model file must contain a JSON object");
  for (const char* key : {"alphabets", "mu", "nu", "output"}) {
    if (!doc.contains(key)) throw ModelFormatError(std::string("model file is missing '") + key + "'");
  }
  std::vector<std::string> warnings;
  try {
    const auto& alphabets = doc.at("alphabets");
    if (!alphabets.is_array() || alphabets.empty()) throw ModelFormatError("'alphabets' must be a nonempty array");
    std::vector<FiniteSet> factors;
    for (std::size_t i = 0; i < alphabets.size(); ++i) {
      factors.emplace_back(string_list(alphabets[i], "alphabets[" + std::to_string(i) + "]"));
    }
    std::optional<ProductSpace> space;
    if (doc.contains("names")) {
      space.emplace(string_list(doc.at("names"), "names"), std::move(factors));
    } else {
      space.emplace(std::move(factors));
    }
    FiniteSet output(string_list(doc.at("output"), "output"));

    auto mu = number_list(doc.at("mu"), "mu");
    if (mu.size() != space->size()) {
      throw ModelFormatError("'mu' has " + std::to_string(mu.size()) + " entries, expected " +
                             std::to_string(space->size()));
    }
    normalize(mu, "mu", warnings);

    const auto& nu = doc.at("nu");
    if (!nu.is_array() || nu.size() != space->size()) {
      throw ModelFormatError("'nu' must have one row per input state (" + std::to_string(space->size()) + ")");
    }
    std::vector<double> rows;
    rows.reserve(space->size() * output.size());
    for (std::size_t x = 0; x < nu.size(); ++x) {
      const std::string what = "nu row " + space->label(x, space->all());
      auto row = number_list(nu[x], what);
      if (row.size() != output.size()) throw ModelFormatError(what + " has the wrong length");
      normalize(row, what, warnings);
      rows.insert(rows.end(), row.begin(), row.end());
    }

    std::optional<Partition> gamma;
    if (doc.contains("gamma") && !doc.at("gamma").is_null()) {
      const auto& g = doc.at("gamma");
      if (!g.is_array()) throw ModelFormatError("'gamma' must be a list of label lists");
      std::vector<std::vector<std::size_t>> blocks;
      for (const auto& block : g) {
        std::vector<std::size_t> members;
        for (const auto& label : string_list(block, "gamma block")) {
          auto idx = output.index_of(label);
          if (!idx) throw ModelFormatError("gamma refers to unknown output label '" + label + "'");
          members.push_back(*idx);
        }
        blocks.push_back(std::move(members));
      }
      gamma = Partition::from_blocks(output.size(), blocks);
    }

    ModelOptions options;
    if (doc.contains("tol")) {
      if (!doc.at("tol").is_number()) throw ModelFormatError("'tol' must be a number");
      options.tol = doc.at("tol").get<double>();
    }
    Model model({*space, std::move(mu)}, {*space, std::move(output), std::move(rows)}, std::move(gamma), options);
    return {std::move(model), std::move(warnings)};
  } catch (const ModelFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelFormatError(e.what());
  }
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ModelFormatError("malformed JSON in '" + path + "': " + e.what());
  }
  return model_from_json(doc);
}

json model_to_json(const Model& model) {
  const auto& space = model.space();
  json doc;
  json alphabets = json::array();
  for (int i = 0; i < space.num_factors(); ++i) alphabets.push_back(space.factor(i).labels());
  doc["alphabets"] = alphabets;
  doc["names"] = space.names();
  doc["output"] = model.output().labels();
  doc["mu"] = std::vector<double>(model.mu().begin(), model.mu().end());
  json nu = json::array();
  for (std::size_t x = 0; x < space.size(); ++x) {
    const auto row = model.nu_row(x);
    nu.push_back(std::vector<double>(row.begin(), row.end()));
  }
  doc["nu"] = nu;
  if (!model.gamma().is_discrete()) {
    json gamma = json::array();
    for (const auto& block : model.gamma().blocks()) {
      json labels = json::array();
      for (std::size_t z : block) labels.push_back(model.output().label(z));
      gamma.push_back(labels);
    }
    doc["gamma"] = gamma;
  }
  doc["tol"] = model.tol();
  return doc;
}

Partition parse_gamma(const std::string& text, const FiniteSet& output) {
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& block : split(text, ';')) {
    std::vector<std::size_t> members;
    for (const auto& raw : split(block, ',')) {
      const std::string label = trim(raw);
      auto idx = output.index_of(label);
      if (!idx) throw std::invalid_argument("gamma: unknown output label '" + label + "'");
      members.push_back(*idx);
    }
    blocks.push_back(std::move(members));
  }
  return Partition::from_blocks(output.size(), blocks);
}

Model with_gamma(const Model& model, Partition gamma) {
  return Model(model.input_distribution(), model.channel(), std::move(gamma), model.options());
}

std::vector<Subset> parse_ordering(const std::string& text, const ProductSpace& space) {
  auto factor = [&](const std::string& raw) {
    const std::string token = trim(raw);
    if (auto idx = space.factor_index(token)) return *idx;
    if (!token.empty() && token.find_first_not_of("0123456789") == std::string::npos) {
      const int i = std::stoi(token) - 1;
      if (i >= 0 && i < space.num_factors()) return i;
    }
    throw std::invalid_argument("ordering: unknown factor '" + token + "'");
  };
  std::vector<Subset> ordering;
  const bool grouped = text.find(';') != std::string::npos;
  for (const auto& block : split(text, grouped ? ';' : ',')) {
    Subset m;
    for (const auto& token : grouped ? split(block, ',') : std::vector<std::string>{block}) {
      const int i = factor(token);
      if (m.contains(i)) throw std::invalid_argument("ordering: factor listed twice in one block");
      m = m | Subset::of({i});
    }
    ordering.push_back(m);
  }
  return ordering;
}

json family_to_json(const PartitionFamily& family) {
  const auto& space = family.space();
  json doc;
  doc["kind"] = std::string(to_string(family.kind()));
  doc["projective"] = family.projective();
  if (const auto& w = family.certificate().witness) {
    doc["witness"] = {{"L", subset_names(space, w->first)}, {"M", subset_names(space, w->second)}};
  } else {
    doc["witness"] = nullptr;
  }
  doc["gamma_resolved"] = family.gamma_resolved();
  json subsets = json::array();
  for (std::size_t bits = 0; bits < family.members().size(); ++bits) {
    const Subset m(static_cast<std::uint32_t>(bits));
    json blocks = json::array();
    for (const auto& block : family[m].blocks()) {
      json labels = json::array();
      for (std::size_t x : block) labels.push_back(space.label(x, m));
      blocks.push_back(labels);
    }
    subsets.push_back({{"subset", subset_names(space, m)}, {"blocks", blocks}});
  }
  doc["subsets"] = subsets;
  return doc;
}

json report_to_json(const FlowReport& report, const ProductSpace& space, double scale, const std::string& unit) {
  json doc;
  doc["family"] = std::string(to_string(report.family_kind));
  doc["projective"] = report.projective;
  doc["gamma_resolved"] = report.gamma_resolved;
  doc["unit"] = unit;
  json ordering = json::array();
  for (Subset m : report.ordering) ordering.push_back(subset_names(space, m));
  doc["ordering"] = ordering;
  json terms = json::array();
  for (std::size_t j = 0; j < report.terms.size(); ++j) {
    terms.push_back({{"label", report.labels[j]}, {"value", report.terms[j] * scale}});
  }
  doc["terms"] = terms;
  doc["total"] = report.total * scale;
  doc["residual"] = report.residual * scale;
  return doc;
}

void write_report_csv(std::ostream& out, const FlowReport& report, const ProductSpace& space, double scale,
                      const std::string& unit) {
  const std::string ordering = csv_field(ordering_text(space, report.ordering));
  out << "ordering,step,term,value,unit\n";
  for (std::size_t j = 0; j < report.terms.size(); ++j) {
    out << ordering << ',' << (j + 1) << ',' << csv_field(report.labels[j]) << ','
        << format_number(report.terms[j] * scale) << ',' << unit << '\n';
  }
  out << ordering << ",total,total," << format_number(report.total * scale) << ',' << unit << '\n';
  out << ordering << ",residual,residual," << format_number(report.residual * scale) << ',' << unit << '\n';
}

void write_report_table(std::ostream& out, const FlowReport& report, const ProductSpace& space, double scale,
                        const std::string& unit) {
  std::size_t width = 8;
  for (const auto& l : report.labels) width = std::max(width, l.size());
  out << "family: " << to_string(report.family_kind) << (report.projective ? " (projective)" : " (NOT projective)")
      << "\nordering: " << ordering_text(space, report.ordering) << "\nunit: " << unit << "\n";
  for (std::size_t j = 0; j < report.terms.size(); ++j) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << report.labels[j] << "  "
        << format_number(report.terms[j] * scale) << '\n';
  }
  out << "  " << std::left << std::setw(static_cast<int>(width)) << "total" << "  " << format_number(report.total * scale)
      << '\n';
  out << "  " << std::left << std::setw(static_cast<int>(width)) << "residual" << "  "
      << format_number(report.residual * scale) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, double scale) {
  out << "beta,quantity,value\n";
  for (const auto& r : rows) out << format_number(r.beta) << ',' << r.quantity << ',' << format_number(r.value * scale) << '\n';
}

}  // namespace cflow
