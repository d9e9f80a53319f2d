#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stargraph/construct.hpp"
#include "stargraph/error.hpp"
#include "stargraph/graph.hpp"
#include "stargraph/harness.hpp"
#include "stargraph/jumpset.hpp"
#include "stargraph/test_function.hpp"
#include "stargraph/weights.hpp"

namespace stargraph {

enum class Task { Simulate, Resolvent, Verify, Export };

std::string to_string(Task t);

struct Numerics {
  double dt = 1e-3;
  double T = 1.0;       // simulated horizon for `simulate`
  double t_max = 0.0;   // resolvent truncation; 0 means 12 / alpha
  double eps = 1e-4;
  std::size_t n_paths = 1000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool bridge_max = true;

  bool operator==(const Numerics&) const = default;
};

struct RunConfig {
  StarGraph graph{{"a"}};
  BoundaryWeights weights;
  Numerics numerics;
  Task task = Task::Simulate;
  double alpha = 1.0;
  GraphPoint start;
  std::vector<FunctionSpec> functions;
  Construction construction = Construction::ItoMcKean;

  bool operator==(const RunConfig&) const = default;
};

struct SchemaViolation {
  std::string path;  // JSON pointer
  std::string message;
};

/// Raised by parse_config with every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<SchemaViolation> violations);
  const std::vector<SchemaViolation>& violations() const { return violations_; }

 private:
  std::vector<SchemaViolation> violations_;
};

/// Throws ConfigError (SchemaError) or Error(InadmissibleWeights).
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
nlohmann::json serialize_config(const RunConfig& config);

nlohmann::json weights_to_json(const BoundaryWeights& w, const StarGraph& graph);
nlohmann::json jumpset_to_json(const JumpSet& J, const StarGraph& graph);

/// Header line plus one row per node: t,edge,x,ltimeX,alive.  The edge column
/// is the edge name, "vertex" or "cemetery".  Numbers use 17 significant
/// digits and '.' as decimal point regardless of locale.
std::string path_to_csv(const GraphPath& path, const StarGraph& graph);
nlohmann::json path_meta_json(const GraphPath& path, const RunConfig& config);

/// The default verification panel for a configuration.
VerificationReport run_verify_panel(const RunConfig& config);

enum ExitCode : int { kExitPass = 0, kExitStatFail = 1, kExitConfigError = 2 };

/// Executes config.task, writing artifacts below out_dir.  Library errors are
/// reported on `log` and give kExitConfigError.
int run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace stargraph
