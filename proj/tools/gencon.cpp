// Command-line front end: gencon <command> [flags].

#include "gencon/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

using namespace gencon;

namespace {

const std::map<std::string, std::string> kHelp{
    {"scenario", "flat_wire | dirac_monopole | su2_singular"},
    {"alpha", "coupling alpha"},
    {"eps0", "largest ladder epsilon"},
    {"ratio", "ladder ratio in (0, 1)"},
    {"count", "ladder length (>= 8)"},
    {"tol", "quadrature tolerance per sample (auto: 1e-8, relaxed below eps = 2^-10)"},
    {"step", "RK4 parameter step (0: (b - a) / 4096)"},
    {"out", "write the JSON report here instead of stdout"},
    {"trace", "transport trace CSV at the smallest epsilon"},
    {"csv", "ladder CSV (epsilon,value_re,value_im)"},
    {"patch", "disk:R=1 | sphere:R=1[,inward] | ball:R=1 | box, optional cx=,cy=,cz=,cw= and ,open"},
    {"loop", "circle:R=1[,cx=..,cy=..]"},
    {"region", "box | box:lo=-1,hi=1[,grid=17]"},
    {"a", "su2 regular part: zero | polynomial | gaussian"},
    {"piece", "curvature piece name or total"},
    {"test", "test function: one | gaussian[:s=1]"},
    {"k", "Chern class degree (1 or 2)"},
    {"deriv", "derivative order for classify (0..2)"},
    {"perturb", "power p of an eps^p non-equivariant defect (0: none)"},
    {"samples", "random sample count for decompose / axioms"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized gauge connections: flux, holonomy, classification and Chern numbers"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  const std::map<std::string, std::string> about{
      {"flux", "epsilon-limit of a curvature piece integrated over a patch"},
      {"holonomy", "holonomy net around a loop and its limit"},
      {"classify", "moderate growth order of the potential"},
      {"shadow", "distributional pairing of a curvature piece with a test function"},
      {"chern", "Chern number over a closed patch"},
      {"decompose", "curvature split residuals at random points"},
      {"axioms", "connection axiom residuals of the reconstructed bundle form"},
      {"canonicalize", "canonicalization of a perturbed bundle form"},
      {"list-scenarios", "built-in scenarios and their pieces"}};
  for (const auto& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd, about.at(cmd));
    sub->add_option("--config", config_paths[cmd], "key = value file; flags override it");
    for (const auto& key : config_keys()) {
      if (key == "command") continue;
      sub->add_option("--" + key, values[cmd][key], kHelp.at(key));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  RunConfig cfg;
  try {
    if (!config_paths[cmd].empty()) cfg = load_config(config_paths[cmd]);
    cfg.command = cmd;
    // Ladder flags are applied together so partial overrides stay valid.
    std::string ladder_text;
    for (const auto& key : config_keys()) {
      if (key == "command" || sub->get_option("--" + key)->count() == 0) continue;
      if (key == "eps0" || key == "ratio" || key == "count")
        ladder_text += key + " = " + values[cmd][key] + "\n";
      else
        apply_setting(cfg, key, values[cmd][key]);
    }
    if (!ladder_text.empty()) cfg = parse_config(ladder_text, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << dump_report(error_report(cfg, "usage", e.what()));
    return 2;
  }

  for (const auto& w : config_warnings(cfg)) std::cerr << "warning: " << w << "\n";

  int code = 0;
  nlohmann::ordered_json report;
  try {
    report = run(cfg);
  } catch (const UsageError& e) {
    report = error_report(cfg, "usage", e.what());
    code = 2;
  } catch (const ShapeError& e) {
    report = error_report(cfg, "shape", e.what());
    code = 2;
  } catch (const NumericalError& e) {
    report = error_report(cfg, "numerical", e.what());
    code = 3;
  }
  if (code != 0) std::cerr << "error: " << report["diagnostics"]["message"].get<std::string>() << "\n";

  const std::string text = dump_report(report);
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "error: cannot write '" << cfg.out << "'\n";
      return 2;
    }
    out << text;
  }
  return code;
}
