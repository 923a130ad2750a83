#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "fbw/io.hpp"
#include "fbw/pipelines.hpp"

using namespace fbw;

namespace {

struct Flags {
    std::string config, pipeline, h, lambda_plus, lambda_minus, K, out, format;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--config", f.config, "flat key = value config file");
    cmd->add_option("--pipeline", f.pipeline, "twoplane | counterexample | obstacle | verify");
    cmd->add_option("--h", f.h, "grid step, e.g. 1/128");
    cmd->add_option("--lambda-plus", f.lambda_plus, "Lambda+ (twoplane)");
    cmd->add_option("--lambda-minus", f.lambda_minus, "Lambda- (twoplane)");
    cmd->add_option("--K", f.K, "intervals, e.g. \"[-0.6,-0.2],[0.2,0.6]\" or \"{0}\"");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--format", f.format, "comma list of json, csv, svg");
}

RunConfig build_config(const Flags& f) {
    RunConfig c;
    if (!f.config.empty()) c = parse_config(read_file(f.config));
    const std::pair<const char*, const std::string*> over[] = {
        {"pipeline", &f.pipeline}, {"h", &f.h},     {"lambda_plus", &f.lambda_plus}, {"lambda_minus", &f.lambda_minus},
        {"K", &f.K},               {"out", &f.out}, {"formats", &f.format}};
    for (const auto& [k, v] : over)
        if (!v->empty()) set_key(c, k, *v);
    return c;
}

int show_report(const Flags& f) {
    std::string dir = f.out;
    if (dir.empty() && !f.config.empty()) dir = parse_config(read_file(f.config)).out;
    if (dir.empty()) dir = RunConfig{}.out;
    if (const char* e = std::getenv("FBW_OUT_DIR"); e && *e) dir = e;
    const std::string name = f.pipeline == "verify" ? "verify.json" : "report.json";
    const auto doc = nlohmann::ordered_json::parse(read_file((std::filesystem::path(dir) / name).string()));
    const std::string status = doc.value("status", "failed");
    if (status == "failed") {
        std::printf("failed: %s\n", doc.value("error", "").c_str());
        return kCheckFailed;
    }
    const ResidualReport r = ResidualReport::from_json(doc);
    for (const auto& c : r.checks())
        std::printf("%-4s %-44s sup=%-12.4g tol=%-10.3g n=%ld excluded=%ld\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.sup, c.tolerance, c.samples, c.excluded);
    for (const auto& w : r.warnings()) std::printf("warning: %s\n", w.c_str());
    for (const auto& [k, v] : r.meta())
        if (k != "config") std::printf("%s = %s\n", k.c_str(), v.c_str());
    std::printf("status: %s\n", status.c_str());
    return status == "pass" ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-boundary branching toolkit"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1, 1);
    Flags run_f, exp_f, rep_f;
    auto* run = app.add_subcommand("run", "run a pipeline and write its report and artifacts");
    auto* exp = app.add_subcommand("export", "run a pipeline and write artifacts of one format");
    auto* rep = app.add_subcommand("report", "print a saved report");
    add_flags(run, run_f);
    add_flags(exp, exp_f);
    exp->get_option("--format")->required();
    rep->set_help_flag("--help", "print help");
    rep->add_option("--out", rep_f.out, "output directory");
    rep->add_option("--config", rep_f.config, "config file (for its out key)");
    rep->add_option("--pipeline", rep_f.pipeline, "pass verify to show verify.json");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }
    try {
        if (rep->parsed()) return show_report(rep_f);
        const Flags& f = run->parsed() ? run_f : exp_f;
        const RunConfig c = build_config(f);
        if (exp->parsed() && c.formats.size() != 1) throw InputError("export takes exactly one format");
        std::string log;
        const int code = execute(c, &log);
        std::fputs(log.c_str(), code == kInputError ? stderr : stdout);
        return code;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kInputError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInputError;
    }
}
