#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "loveres/cli.hpp"
#include "loveres/errors.hpp"

using namespace loveres;

int main(int argc, char** argv) {
  CLI::App app{"Resonances, scattering data and inversion for half-line Schrodinger operators"};
  app.set_version_flag("--version", cli::kVersion);

  std::string config_path, command, out;
  unsigned workers = 0;
  double radius = 0.0, tol = 0.0;
  uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--command", command, "forward | resonances | invert | recover-mu | check");
  app.add_option("--out", out, "output directory");
  auto* w_opt = app.add_option("--workers", workers, "worker threads (default: LOVE_RES_WORKERS, else 1)");
  auto* r_opt = app.add_option("--radius", radius, "truncation radius / search half-width");
  auto* t_opt = app.add_option("--tol", tol, "zero-finder tolerance");
  auto* s_opt = app.add_option("--seed", seed, "seed for randomized checks");
  CLI11_PARSE(app, argc, argv);

  io::Json doc = io::Json::object();
  std::string base = ".";
  try {
    if (!config_path.empty()) {
      doc = io::read_json(config_path);
      base = std::filesystem::path(config_path).parent_path().string();
      if (base.empty()) base = ".";
    }
    // flags win over the file
    if (!command.empty()) doc["command"] = command;
    if (!out.empty()) doc["out"] = out;
    if (*w_opt) doc["workers"] = workers;
    if (*r_opt) doc["radius"] = radius;
    if (*t_opt) doc["tol"] = tol;
    if (*s_opt) doc["seed"] = seed;
    if (!doc.contains("out")) doc["out"] = "out";
    const cli::RunConfig cfg = cli::parse_config(doc, base);
    const cli::RunResult res = cli::run(cfg);
    for (const auto& f : res.files) std::cout << cfg.out_dir << "/" << f << "\n";
    if (res.exit_code != cli::kOk) std::cerr << "error [" << res.stage << "]: " << res.message << "\n";
    return res.exit_code;
  } catch (const Error& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
}
