#include "cflow/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cflow/measures.hpp"
#include "cflow/model_io.hpp"
#include "cflow/scenarios.hpp"
#include "cflow/sigma.hpp"

namespace cflow::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string model_path;
  std::string scenario;
  double beta = 0.0;
  int n = 3;
  int k = 2;
  std::string family = "extension";
  std::string order;
  std::string gamma;
  std::optional<double> tol;
  bool bits = false;
  std::string format;
  std::uint64_t seed = 0;
  std::string out_path;
  int random = 0;
  int max_alphabet = 3;
  int max_output = 3;
  std::string betas;
  std::string quantities;
};

void add_model_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model_path, "Model file (JSON)");
  cmd->add_option("--scenario", o.scenario, "Built-in scenario: copy | transfer | sum");
  cmd->add_option("--beta", o.beta, "Coupling parameter of the scenario");
  cmd->add_option("--n", o.n, "Number of inputs (sum scenario, random models)");
  cmd->add_option("--k", o.k, "Alphabet size (sum scenario)");
  cmd->add_option("--gamma", o.gamma, "Output partition, e.g. 'a,b;c'");
  cmd->add_option("--tol", o.tol, "Row-equality tolerance");
}

Model scenario_model(const std::string& id, double beta, int n, int k) {
  if (id == "copy") return build_copy(beta);
  if (id == "transfer") return build_transfer(beta);
  if (id == "sum") return build_sum_coupled(n, k, beta);
  throw UsageError("unknown scenario '" + id + "' (expected copy, transfer or sum)");
}

Model resolve_model(const Options& o, std::ostream& err) {
  if (o.model_path.empty() == o.scenario.empty()) throw UsageError("give exactly one of --model or --scenario");
  std::optional<Model> model;
  if (!o.model_path.empty()) {
    LoadedModel loaded = load_model(o.model_path);
    for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
    model.emplace(std::move(loaded.model));
  } else {
    model.emplace(scenario_model(o.scenario, o.beta, o.n, o.k));
  }
  if (!o.gamma.empty() || o.tol) {
    ModelOptions options = model->options();
    if (o.tol) options.tol = *o.tol;
    Partition gamma = o.gamma.empty() ? model->gamma() : parse_gamma(o.gamma, model->output());
    // Built before assignment: emplace would destroy the source first.
    Model rebuilt(model->input_distribution(), model->channel(), std::move(gamma), options);
    return rebuilt;
  }
  return *model;
}

FamilyKind resolve_family(const std::string& name) {
  auto kind = parse_family_kind(name);
  if (!kind || *kind == FamilyKind::custom) {
    throw UsageError("unknown family '" + name + "' (expected extension, reduction, classical or raw-trace)");
  }
  return *kind;
}

/// Writes to --out when given, otherwise to `out`.
template <class Fn>
void emit(const Options& o, std::ostream& out, Fn&& write) {
  if (o.out_path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out_path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + o.out_path + "'");
  write(file);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) {
      throw UsageError("beta grid must be start:stop:step with step > 0");
    }
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  }
  if (out.empty()) throw UsageError("empty beta grid");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double unit_scale(const Options& o) { return o.bits ? 1.0 / std::numbers::ln2 : 1.0; }
std::string unit_name(const Options& o) { return o.bits ? "bits" : "nats"; }

int cmd_flow(const Options& o, std::ostream& out, std::ostream& err) {
  const Model model = resolve_model(o, err);
  const PartitionFamily family = make_family(model, resolve_family(o.family));
  std::vector<Subset> ordering;
  if (o.order.empty()) {
    for (int i = 0; i < model.space().num_factors(); ++i) ordering.push_back(Subset::of({i}));
  } else {
    ordering = parse_ordering(o.order, model.space());
  }
  if (!family.projective()) err << "warning: the " << to_string(family.kind()) << " family is not projective\n";
  const FlowReport report = chain_decomposition(model, family, ordering);
  const std::string format = o.format.empty() ? "table" : o.format;
  emit(o, out, [&](std::ostream& os) {
    if (format == "json") {
      os << report_to_json(report, model.space(), unit_scale(o), unit_name(o)).dump(2) << '\n';
    } else if (format == "csv") {
      write_report_csv(os, report, model.space(), unit_scale(o), unit_name(o));
    } else if (format == "table") {
      write_report_table(os, report, model.space(), unit_scale(o), unit_name(o));
    } else {
      throw UsageError("unknown format '" + format + "'");
    }
  });
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const FamilyKind kind = resolve_family(o.family);
  std::vector<Model> models;
  if (o.random > 0) {
    if (!o.model_path.empty() || !o.scenario.empty()) throw UsageError("--random cannot be combined with a model source");
    models = random_corpus(o.seed, o.random, {o.n}, o.max_alphabet, o.max_output);
  } else {
    models.push_back(resolve_model(o, err));
  }

  int failed_models = 0;
  std::size_t total_checks = 0;
  emit(o, out, [&](std::ostream& os) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      const Model& model = models[i];
      const PartitionFamily family = make_family(model, kind);
      const AuditReport report = verify_family(model, family);
      total_checks += report.checks.size();
      if (report.passed()) {
        os << "model " << i << ": ok (" << report.checks.size() << " checks)\n";
      } else {
        ++failed_models;
        const auto failures = report.failures();
        os << "model " << i << ": " << failures.size() << " of " << report.checks.size() << " checks failed\n";
        for (const auto& f : failures) os << "  " << describe(f, model.space()) << '\n';
      }
    }
    os << (failed_models == 0 ? "PASS" : "FAIL") << ": " << models.size() - static_cast<std::size_t>(failed_models)
       << "/" << models.size() << " models, family " << to_string(kind) << ", " << total_checks << " checks\n";
  });
  return failed_models == 0 ? kExitOk : kExitAuditFailure;
}

int cmd_traces(const Options& o, std::ostream& out, std::ostream& err) {
  const Model model = resolve_model(o, err);
  const PartitionFamily family = make_family(model, resolve_family(o.family));
  emit(o, out, [&](std::ostream& os) { os << family_to_json(family).dump(2) << '\n'; });
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  if (o.scenario.empty()) throw UsageError("sweep needs --scenario");
  if (o.betas.empty()) throw UsageError("sweep needs --betas");
  const auto rows = sweep(o.scenario, parse_grid(o.betas), split_list(o.quantities), o.n, o.k);
  emit(o, out, [&](std::ostream& os) { write_sweep_csv(os, rows, unit_scale(o)); });
  return kExitOk;
}

int cmd_example(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.model_path.empty()) throw UsageError("example takes --scenario, not --model");
  const Model model = resolve_model(o, err);
  emit(o, out, [&](std::ostream& os) { os << model_to_json(model).dump(2) << '\n'; });
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal information flow through finite channels"};
  app.name("cflow");
  app.require_subcommand(1);
  Options o;

  auto* flow = app.add_subcommand("flow", "Chain-rule decomposition of the information flow");
  add_model_source(flow, o);
  flow->add_option("--family", o.family, "extension | reduction | classical | raw-trace");
  flow->add_option("--order", o.order, "Ordering, e.g. 'X,Y' or 'X1;X2,X3'");
  flow->add_option("--format", o.format, "table | json | csv");
  flow->add_flag("--bits", o.bits, "Report values in bits");
  flow->add_option("--out", o.out_path, "Output file");

  auto* verify = app.add_subcommand("verify", "Check projectivity, the chain rule and the flow properties");
  add_model_source(verify, o);
  verify->add_option("--family", o.family, "extension | reduction | classical | raw-trace");
  verify->add_option("--random", o.random, "Verify this many random models instead of one model");
  verify->add_option("--seed", o.seed, "Seed for --random");
  verify->add_option("--max-alphabet", o.max_alphabet, "Largest input alphabet of random models");
  verify->add_option("--max-output", o.max_output, "Largest output alphabet of random models");
  verify->add_option("--out", o.out_path, "Output file");

  auto* traces = app.add_subcommand("traces", "Dump a partition family as JSON");
  add_model_source(traces, o);
  traces->add_option("--family", o.family, "extension | reduction | classical | raw-trace");
  traces->add_option("--out", o.out_path, "Output file");

  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate scenario quantities over a beta grid (CSV)");
  sweep_cmd->add_option("--scenario", o.scenario, "copy | transfer | sum")->required();
  sweep_cmd->add_option("--betas", o.betas, "Grid 'start:stop:step' or list 'b1,b2,...'")->required();
  sweep_cmd->add_option("--quantities", o.quantities, "Comma-separated quantity ids (default: all)");
  sweep_cmd->add_option("--n", o.n, "Number of inputs (sum)");
  sweep_cmd->add_option("--k", o.k, "Alphabet size (sum)");
  sweep_cmd->add_flag("--bits", o.bits, "Report values in bits");
  sweep_cmd->add_option("--out", o.out_path, "Output file");

  auto* example = app.add_subcommand("example", "Write the model file of a scenario");
  add_model_source(example, o);
  example->add_option("--out", o.out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*flow) return cmd_flow(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
    if (*traces) return cmd_traces(o, out, err);
    if (*sweep_cmd) return cmd_sweep(o, out);
    if (*example) return cmd_example(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelFormatError& e) {
    err << "malformed model: " << e.what() << '\n';
    return kExitModelError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModelError;
  }
  return kExitUsage;
}

}  // namespace cflow::cli
