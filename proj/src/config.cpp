#include "fbw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "fbw/grid.hpp"
#include "fbw/io.hpp"

namespace fbw {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t a = 0;
    while (true) {
        const auto b = s.find(sep, a);
        out.push_back(trim(s.substr(a, b == std::string::npos ? std::string::npos : b - a)));
        if (b == std::string::npos) break;
        a = b + 1;
    }
    return out;
}

double plain_number(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw InputError("not a number: '" + s + "'");
    return v;
}

const std::set<std::string> kPipelines = {"twoplane", "counterexample", "obstacle", "verify"};
const std::set<std::string> kFormats = {"json", "csv", "svg"};

}  // namespace

double parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    const auto slash = s.find('/');
    if (slash == std::string::npos) return plain_number(s);
    const double p = plain_number(trim(s.substr(0, slash))), q = plain_number(trim(s.substr(slash + 1)));
    if (q == 0.0) throw InputError("division by zero in '" + s + "'");
    return p / q;
}

std::vector<std::pair<double, double>> parse_intervals(const std::string& raw) {
    const std::string s = trim(raw);
    std::vector<std::pair<double, double>> out;
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        for (const auto& p : split(s.substr(1, s.size() - 2), ',')) {
            const double v = parse_number(p);
            out.push_back({v, v});
        }
    } else {
        std::size_t k = 0;
        while (k < s.size()) {
            if (s[k] == ',' || s[k] == ' ') {
                ++k;
                continue;
            }
            if (s[k] != '[') throw InputError("K: expected '[' in '" + s + "'");
            const auto e = s.find(']', k);
            if (e == std::string::npos) throw InputError("K: missing ']'");
            const auto ab = split(s.substr(k + 1, e - k - 1), ',');
            if (ab.size() != 2) throw InputError("K: an interval needs two end points");
            out.push_back({parse_number(ab[0]), parse_number(ab[1])});
            k = e + 1;
        }
    }
    if (out.empty()) throw InputError("K is empty");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].second < out[i].first) throw InputError("K: interval with b < a");
        if (i > 0 && out[i].first <= out[i - 1].second)
            throw InputError("K: intervals must be sorted and disjoint (merge overlapping ones)");
    }
    return out;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "pipeline") c.pipeline = v;
    else if (key == "h") c.h = parse_number(v);
    else if (key == "xmin") c.xmin = parse_number(v);
    else if (key == "xmax") c.xmax = parse_number(v);
    else if (key == "ymin") c.ymin = parse_number(v);
    else if (key == "ymax") c.ymax = parse_number(v);
    else if (key == "lambda_plus") c.lambda_plus = parse_number(v);
    else if (key == "lambda_minus") c.lambda_minus = parse_number(v);
    else if (key == "K") c.K = v;
    else if (key == "obstacle") c.obstacle = v;
    else if (key == "tol") c.tol = parse_number(v);
    else if (key.rfind("tol.", 0) == 0 && key.size() > 4) c.tolerances[key.substr(4)] = parse_number(v);
    else if (key == "input") c.input = v;
    else if (key == "out") c.out = v;
    else if (key == "formats") c.formats = split(v, ',');
    else throw InputError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t a = 0;
    while (a <= text.size()) {
        auto b = text.find('\n', a);
        if (b == std::string::npos) b = text.size();
        std::string line = text.substr(a, b - a);
        a = b + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!seen.insert(key).second) throw InputError("config line " + std::to_string(line_no) + ": duplicate key " + key);
        try {
            set_key(base, key, line.substr(eq + 1));
        } catch (const InputError& e) {
            throw InputError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

void validate(const RunConfig& c) {
    if (!kPipelines.count(c.pipeline)) throw InputError("unknown pipeline '" + c.pipeline + "'");
    if (!(c.h > 0.0) || c.h > 0.5) throw InputError("h must lie in (0, 0.5]");
    if (!(c.xmax > c.xmin) || !(c.ymax > c.ymin)) throw InputError("empty window");
    if (!(c.lambda_plus > 0.0) || !(c.lambda_minus > 0.0)) throw InputError("lambda_plus and lambda_minus must be > 0");
    if (!(c.tol >= 0.0)) throw InputError("tol must be >= 0");
    for (const auto& [k, v] : c.tolerances)
        if (!(v > 0.0)) throw InputError("tol." + k + " must be > 0");
    if (c.formats.empty()) throw InputError("no output formats");
    for (const auto& f : c.formats)
        if (!kFormats.count(f)) throw InputError("unknown format '" + f + "'");
    if (c.pipeline == "counterexample") parse_intervals(c.K);
    if (c.out.empty()) throw InputError("empty output directory");
}

std::string canonical(const RunConfig& c) {
    std::map<std::string, std::string> kv;
    kv["pipeline"] = c.pipeline;
    kv["h"] = fmt_double(c.h);
    kv["tol"] = fmt_double(c.tol);
    for (const auto& [k, v] : c.tolerances) kv["tol." + k] = fmt_double(v);
    if (c.pipeline == "twoplane" || c.pipeline == "obstacle") {
        kv["xmin"] = fmt_double(c.xmin);
        kv["xmax"] = fmt_double(c.xmax);
        kv["ymin"] = fmt_double(c.ymin);
        kv["ymax"] = fmt_double(c.ymax);
    }
    if (c.pipeline == "twoplane") {
        kv["lambda_plus"] = fmt_double(c.lambda_plus);
        kv["lambda_minus"] = fmt_double(c.lambda_minus);
    }
    if (c.pipeline == "counterexample") {
        std::string k;
        for (const auto& [a, b] : parse_intervals(c.K)) k += "[" + fmt_double(a) + "," + fmt_double(b) + "]";
        kv["K"] = k;
    }
    if (c.pipeline == "obstacle") kv["obstacle"] = c.obstacle;
    if (c.pipeline == "verify") kv["input"] = c.input;
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

}  // namespace fbw
