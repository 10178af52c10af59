#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace finsler::lab;

int main(int argc, char** argv) {
  CLI::App app{"finsler-lab: Finsler norms, heat flows and curvature inequalities on grids"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;

  struct Sub {
    const char* name;
    const char* help;
    Output (*run)(const RunConfig&);
  };
  const Sub subs[] = {
      {"norm-info", "smoothness constants S_F, C_F, Lambda_F and the reversibility bound", cmd_norm_info},
      {"geodesic", "integrate a geodesic from geodesic.x0, geodesic.v0", cmd_geodesic},
      {"curvature", "sample Ric, Ric_inf and Ric_N over the chart", cmd_curvature},
      {"heat", "run the nonlinear heat flow and export the trace", cmd_heat},
      {"verify", "run the check suites listed in checks.suites", cmd_verify},
      {"isoperimetry", "isoperimetric profile against I_K", cmd_isoperimetry},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "TOML run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed (overrides the config)")->each([&](const std::string&) {
      have_seed = true;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const Sub* chosen = nullptr;
  for (const auto& s : subs)
    if (app.got_subcommand(s.name)) chosen = &s;

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (have_seed) cfg.seed = seed;
  } catch (const finsler::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  }

  Output out;
  try {
    out = chosen->run(cfg);
  } catch (const finsler::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const finsler::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::cout << out.text;
  if (out.code == kUsage) return kUsage;
  try {
    write_outputs(out, cfg.out);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }
  return out.code;
}
