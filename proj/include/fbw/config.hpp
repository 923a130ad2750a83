#pragma once

#include <map>
#include <string>
#include <vector>

namespace fbw {

// Flat key = value file, '#' starts a comment. Keys:
//   pipeline      twoplane | counterexample | obstacle | verify
//   h             grid step, decimal or p/q (default 1/128)
//   xmin xmax ymin ymax   window (default [-1, 1]^2; twoplane and obstacle)
//   lambda_plus lambda_minus   positive constants (twoplane)
//   K             closed intervals "[a,b],[c,d]" or "{0}" (counterexample)
//   obstacle      case tag (obstacle)
//   tol           residual tolerance handed to the modules; 0 picks the pipeline default
//                 (1e-6 twoplane, 20 h^2 counterexample, per-check scales for obstacle)
//   tol.<check>   tolerance override for one named check
//   input         directory of a saved run (verify; default: out)
//   out           output directory
//   formats       comma list of json, csv, svg
struct RunConfig {
    std::string pipeline = "twoplane";
    double h = 1.0 / 128;
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
    double lambda_plus = 4.0, lambda_minus = 1.0;
    std::string K = "[-0.5,0.5]";
    std::string obstacle = "pinched:0.25,0.45";
    double tol = 0.0;
    std::map<std::string, double> tolerances;
    std::string input;
    std::string out = "fbw_out";
    std::vector<std::string> formats = {"json", "csv", "svg"};
};

void set_key(RunConfig& c, const std::string& key, const std::string& value);
RunConfig parse_config(const std::string& text, RunConfig base = {});
void validate(const RunConfig& c);

// sorted key=value lines of everything that affects results (out and formats are left out)
std::string canonical(const RunConfig& c);

double parse_number(const std::string& s);
std::vector<std::pair<double, double>> parse_intervals(const std::string& s);

}  // namespace fbw
