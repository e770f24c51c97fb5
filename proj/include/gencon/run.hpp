#pragma once

// Batch runs: configuration, dispatch to the numerical modules and JSON reports.

#include "gencon/epsilon.hpp"
#include "gencon/errors.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gencon {

/// Bad command, flag or config value (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string> kCommands{"flux",      "holonomy", "classify",     "shadow",        "chern",
                                                "decompose", "axioms",   "canonicalize", "list-scenarios"};

struct RunConfig {
  std::string command = "flux";
  std::string scenario = "flat_wire";
  double alpha = 1.0;
  EpsilonLadder ladder;
  std::optional<double> tol;  ///< quadrature tolerance; default_tolerance(eps) when empty
  double step = 0.0;          ///< RK4 step; 0 selects (b - a) / 4096
  std::string out;            ///< JSON path; stdout when empty
  std::string trace;          ///< transport trace CSV for the smallest eps
  std::string csv;            ///< ladder CSV
  std::string patch;          ///< disk:R=1 | sphere:R=1[,inward|outward] | ball:R=1 | box
  std::string loop;           ///< circle:R=1[,cx=..,cy=..,cz=..]
  std::string region;         ///< box | box:lo=-1,hi=1[,grid=17]
  std::string a = "polynomial";
  std::string piece;          ///< curvature piece name, or "total"
  std::string test = "one";   ///< one | gaussian[:s=1]
  int k = 1;                  ///< Chern class degree
  int deriv = 0;              ///< derivative order for classify
  int perturb = 0;            ///< eps^perturb defect for axioms / canonicalize (0: none)
  int samples = 100;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& config_keys();
/// Sets one key from its text form; throws UsageError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// `key = value` lines; `#` starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);

/// Warnings attached to a config (e.g. 2 alpha integral for su2_singular).
std::vector<std::string> config_warnings(const RunConfig& cfg);

/// Executes the command and returns the report. Errors propagate.
nlohmann::ordered_json run(const RunConfig& cfg);

/// Report for a failed run.
nlohmann::ordered_json error_report(const RunConfig& cfg, const std::string& kind, const std::string& message);

/// Deterministic text of a report.
std::string dump_report(const nlohmann::ordered_json& report);

}  // namespace gencon
