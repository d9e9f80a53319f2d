#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stargraph/config.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
};

int execute(const std::string& task, const Options& o) {
  using namespace stargraph;
  try {
    std::ifstream in(o.config);
    if (!in) {
      std::cerr << "error: cannot open " << o.config << "\n";
      return kExitConfigError;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& ex) {
      std::cerr << "SCHEMA_ERROR: malformed JSON: " << ex.what() << "\n";
      return kExitConfigError;
    }
    if (doc.is_object()) {
      doc["task"] = task;
      if (o.seed) doc["numerics"]["seed"] = *o.seed;
      if (o.threads) doc["numerics"]["threads"] = *o.threads;
    }
    const RunConfig cfg = parse_config(doc);
    return run(cfg, o.out, std::cout);
  } catch (const stargraph::ConfigError& ex) {
    for (const auto& v : ex.violations())
      std::cerr << "SCHEMA_ERROR at \"" << v.path << "\": " << v.message << "\n";
    return kExitConfigError;
  } catch (const stargraph::Error& ex) {
    std::cerr << ex.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian motion on a star graph with Feller-Wentzell boundary conditions"};
  app.require_subcommand(1);

  Options o;
  const char* env_out = std::getenv("STARGRAPH_OUT_DIR");
  o.out = env_out && *env_out ? env_out : "out";

  std::string chosen;
  for (const char* name : {"simulate", "resolvent", "verify", "export"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "JSON configuration file")->required();
    sub->add_option("--seed", o.seed, "override numerics.seed");
    sub->add_option("--threads", o.threads, "override numerics.threads")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory (default $STARGRAPH_OUT_DIR or ./out)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : stargraph::kExitConfigError;
  }
  return execute(chosen, o);
}
