#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "runner.hpp"

namespace {

std::string usage_operations() {
  std::string s;
  for (const auto& op : ergolab::cli::operations()) s += (s.empty() ? "" : " | ") + op;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ergolab::cli;
  CLI::App app{"ergolab: pressure, hyperbolic times and transfer operators for expanding and Viana maps"};
  app.footer("operations: " + usage_operations() +
             "\nexit codes: 0 success, 1 computation failure, 2 usage error\n"
             "ERGOLAB_OUT overrides the output directory unless --out is given");
  std::string operation;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = -1;
  bool reproducible = false;
  std::vector<std::string> overrides;
  app.add_option("operation", operation, "operation to run")->required();
  app.add_option("-c,--config", config_path, "config file ([map] [potential] [run] [output])");
  auto* seed_opt = app.add_option("-s,--seed", seed, "master seed");
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("-t,--threads", threads, "worker threads (0 = all cores)");
  app.add_flag("--reproducible", reproducible, "omit timestamps from SVG output");
  app.add_option("--set", overrides, "override, e.g. --set map.d=3 (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const auto& ops = operations();
  if (std::find(ops.begin(), ops.end(), operation) == ops.end()) {
    std::cerr << "unknown operation '" << operation << "'\n\n" << app.help();
    return 2;
  }

  ExperimentConfig cfg;
  try {
    std::string text;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file " + config_path);
      std::ostringstream buf;
      buf << f.rdbuf();
      text = buf.str();
    }
    cfg = parse_config(text, false);
    cfg.set("run", "operation", operation);
    for (const auto& o : overrides) cfg.set_assignment(o);
    if (*seed_opt) cfg.set("run", "seed", std::to_string(seed));
    if (threads >= 0) cfg.set("run", "threads", std::to_string(threads));
    if (reproducible) cfg.set("output", "reproducible", "true");
    if (!out_dir.empty()) {
      cfg.set("output", "dir", out_dir);
    } else if (const char* env = std::getenv("ERGOLAB_OUT"); env && *env) {
      cfg.set("output", "dir", env);
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    RunManifest m = run(cfg, std::cout);
    return m.passed ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ergolab::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 1;
  }
}
