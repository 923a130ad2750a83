#pragma once

#include <string>
#include <vector>

#include "fbw/config.hpp"
#include "fbw/membrane.hpp"
#include "fbw/report.hpp"
#include "fbw/weierstrass.hpp"

namespace fbw {

struct Artifact {
    std::string name;    // file name inside the output directory
    std::string format;  // json | csv | svg
    std::string content;
};

struct PipelineResult {
    ResidualReport report;
    std::vector<Artifact> artifacts;
};

// runs one pipeline; throws InputError on bad input, ConvergenceError when a solver gives up
PipelineResult run_pipeline(const RunConfig& c);

// closed forms of the two-plane chain: psi1, psi2+, e3.nu+, J+ and d = w~- - w+
ResidualReport twoplane_closed_forms(const TwoPhaseSolution& sol, const WeierstrassPair& w, const MembraneState& st,
                                     double tol);

// report.json text; status is pass | fail | failed
std::string report_document(const ResidualReport& r, const std::string& status);
std::string failed_document(const RunConfig& c, const std::string& error);

enum ExitCode { kPass = 0, kCheckFailed = 1, kInputError = 2 };

// runs, writes the artifacts of the configured formats and then report.json; returns the exit code.
// Any error after validation leaves a report.json with status "failed".
int execute(const RunConfig& c, std::string* log = nullptr);

// test hook: when set, called on the finished report before anything is written; may throw
using ReportHook = void (*)(ResidualReport&);
void set_report_hook(ReportHook hook);

}  // namespace fbw
