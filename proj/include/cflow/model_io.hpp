#pragma once

// JSON model files, family/report serialization, and the small text grammars
// used on the command line (orderings and output partitions).

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cflow/channel.hpp"
#include "cflow/measures.hpp"
#include "cflow/scenarios.hpp"
#include "cflow/sigma.hpp"

namespace cflow {

/// A model file that cannot be parsed or violates the model invariants.
class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  Model model;
  std::vector<std::string> warnings;
};

/// Normalization deviations up to this bound are silently accepted.
inline constexpr double kExactNormalization = 1e-12;
/// Deviations above kExactNormalization and up to this bound are renormalized
/// with a warning; larger ones are rejected.
inline constexpr double kRenormalizeLimit = 1e-6;

/// Parses the model schema:
///   alphabets: [[label,...], ...]   one list per input factor; labels are strings or numbers
///   names:     [name, ...]          optional, defaults to X1..Xn
///   mu:        [p, ...]             mixed radix, factor 1 fastest
///   nu:        [[p, ...], ...]      one row per input state, over `output`
///   output:    [label, ...]
///   gamma:     [[label, ...], ...]  optional partition of `output`
///   tol:       number               optional row-equality tolerance
LoadedModel model_from_json(const nlohmann::json& doc);
LoadedModel load_model(const std::string& path);
nlohmann::json model_to_json(const Model& model);

/// Parses "a,b;c" into a partition of the output labels (blocks separated by ';').
Partition parse_gamma(const std::string& text, const FiniteSet& output);
/// Rebuilds `model` with a different output partition.
Model with_gamma(const Model& model, Partition gamma);

/// Parses an ordering such as "X1;X2,X3" (blocks separated by ';', factors by
/// ','). A plain comma list "X,Y" with no ';' means one singleton block per factor.
/// Factors may be given by name or by 1-based index.
std::vector<Subset> parse_ordering(const std::string& text, const ProductSpace& space);

nlohmann::json family_to_json(const PartitionFamily& family);

/// `scale` converts nats to the reported unit (1 for nats, 1/ln 2 for bits).
nlohmann::json report_to_json(const FlowReport& report, const ProductSpace& space, double scale = 1.0,
                              const std::string& unit = "nats");
void write_report_csv(std::ostream& out, const FlowReport& report, const ProductSpace& space, double scale = 1.0,
                      const std::string& unit = "nats");
void write_report_table(std::ostream& out, const FlowReport& report, const ProductSpace& space, double scale = 1.0,
                        const std::string& unit = "nats");

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, double scale = 1.0);

/// Rendering with 15 significant digits.
std::string format_number(double value);

}  // namespace cflow
