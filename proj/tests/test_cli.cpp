#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "fbw/io.hpp"
#include "fbw/pipelines.hpp"

using namespace fbw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("fbw_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small(const std::string& pipeline, const fs::path& out) {
    RunConfig c;
    c.pipeline = pipeline;
    c.h = 1.0 / 16;
    c.out = out.string();
    return c;
}

nlohmann::ordered_json load(const fs::path& p) { return nlohmann::ordered_json::parse(read_file(p.string())); }

void inject_failure(ResidualReport& r) { r.add_value("injected", 1.0, 0.5); }
void inject_divergence(ResidualReport&) { throw ConvergenceError("injected", 3.0); }

int shell(const std::string& args) {
    const int s = std::system((std::string(FBW_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

}  // namespace

TEST_CASE("passing run writes artifacts and a pass report") {
    const auto out = scratch("pass");
    CHECK(execute(small("twoplane", out)) == kPass);
    const auto doc = load(out / "report.json");
    CHECK(doc["status"] == "pass");
    CHECK(doc["meta"]["pipeline"] == "twoplane");
    CHECK(doc["meta"]["h"] == "0.0625");
    CHECK(doc["meta"]["lambda"] == "2");
    CHECK(doc["meta"]["input_hash"].get<std::string>().size() == 40);
    for (const char* f : {"u.csv", "d.csv", "graphs.svg", "traces.svg", "residuals.svg", "branching.json", "fields.json"})
        CHECK(fs::exists(out / f));
    const ScalarField u = field_from_csv(read_file((out / "u.csv").string()));
    CHECK(u.grid.nx == 33);
}

TEST_CASE("exit codes under injected failures") {
    const auto out = scratch("inject");
    set_report_hook(inject_failure);
    CHECK(execute(small("twoplane", out)) == kCheckFailed);
    CHECK(load(out / "report.json")["status"] == "fail");

    set_report_hook(inject_divergence);
    CHECK(execute(small("twoplane", out)) == kCheckFailed);
    auto doc = load(out / "report.json");
    CHECK(doc["status"] == "failed");
    CHECK(doc["failed"] == true);
    set_report_hook(nullptr);

    // input error during the run replaces the stale report with a failed marker
    RunConfig c = small("obstacle", out);
    c.obstacle = "radial:1.5";
    CHECK(execute(c) == kInputError);
    CHECK(load(out / "report.json")["status"] == "failed");

    // config errors stop before anything is written
    const auto none = scratch("none");
    RunConfig bad = small("counterexample", none);
    bad.K = "[0.5,0.2]";
    CHECK(execute(bad) == kInputError);
    CHECK_FALSE(fs::exists(none));
}

TEST_CASE("formats select the artifacts") {
    const auto out = scratch("formats");
    RunConfig c = small("twoplane", out);
    c.formats = {"svg"};
    CHECK(execute(c) == kPass);
    CHECK(fs::exists(out / "graphs.svg"));
    CHECK(fs::exists(out / "report.json"));
    CHECK_FALSE(fs::exists(out / "u.csv"));
    CHECK_FALSE(fs::exists(out / "branching.json"));
}

TEST_CASE("determinism") {
    for (const char* p : {"twoplane", "counterexample", "obstacle"}) {
        const auto a = scratch("det_a"), b = scratch("det_b");
        RunConfig c = small(p, a);
        c.h = 1.0 / 32;
        execute(c);
        c.out = b.string();
        execute(c);
        INFO(p);
        CHECK(read_file((a / "report.json").string()) == read_file((b / "report.json").string()));
        CHECK(read_file((a / "u.csv").string()) == read_file((b / "u.csv").string()));
    }
}

TEST_CASE("verify replays a saved run") {
    const auto out = scratch("verify");
    CHECK(execute(small("twoplane", out)) == kPass);
    RunConfig v = small("verify", out);
    CHECK(execute(v) == kPass);
    CHECK(load(out / "verify.json")["status"] == "pass");
    CHECK(load(out / "report.json")["meta"]["pipeline"] == "twoplane");

    // tamper with a saved field
    auto u = field_from_csv(read_file((out / "u.csv").string()));
    u.values[5] += 1e-6;
    write_file((out / "u.csv").string(), field_to_csv(u));
    CHECK(execute(v) == kCheckFailed);
    const auto doc = load(out / "verify.json");
    bool found = false;
    for (const auto& c : doc["checks"])
        if (c["name"] == "replay.u.csv") {
            found = true;
            CHECK(c["pass"] == false);
        }
    CHECK(found);

    v.input = scratch("verify_missing").string();
    CHECK(execute(v) == kInputError);
}

TEST_CASE("output directory override from the environment") {
    const auto out = scratch("env"), other = scratch("env_other");
    setenv("FBW_OUT_DIR", other.string().c_str(), 1);
    CHECK(execute(small("twoplane", out)) == kPass);
    unsetenv("FBW_OUT_DIR");
    CHECK(fs::exists(other / "report.json"));
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("command line") {
    const auto out = scratch("bin");
    const std::string o = " --out " + out.string();
    CHECK(shell("run --pipeline twoplane --h 1/16 --lambda-plus 9 --lambda-minus 1" + o) == 0);
    CHECK(load(out / "report.json")["meta"]["lambda"] == "3");
    CHECK(shell("report" + o) == 0);
    CHECK(shell("run --pipeline twoplane --h abc" + o) == 2);
    CHECK(shell("run --pipeline counterexample --h 1/16 --K [0.5,0.2]" + o) == 2);
    CHECK(shell("run --pipeline nope" + o) == 2);
    CHECK(shell("run --unknown-flag" + o) == 2);
    CHECK(shell("export --pipeline twoplane --h 1/16" + o) == 2);
    CHECK(shell("export --pipeline twoplane --h 1/16 --format pdf" + o) == 2);
    CHECK(shell("run --config /nonexistent.cfg" + o) == 2);
    const auto ex = scratch("bin_export");
    CHECK(shell("export --pipeline twoplane --h 1/16 --format csv --out " + ex.string()) == 0);
    CHECK(fs::exists(ex / "u.csv"));
    CHECK_FALSE(fs::exists(ex / "graphs.svg"));
}
