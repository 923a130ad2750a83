#include "fbw/report.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbw {

ResidualCheck& ResidualReport::add(const std::string& name, const std::vector<double>& residuals, double tolerance,
                                   long excluded) {
    ResidualCheck c;
    c.name = name;
    c.tolerance = tolerance;
    c.excluded = excluded;
    double sq = 0.0;
    for (double r : residuals) {
        const double a = std::abs(r);
        if (std::isnan(a)) {
            c.sup = a;
        } else if (!std::isnan(c.sup)) {
            c.sup = std::max(c.sup, a);
        }
        sq += a * a;
        ++c.samples;
    }
    c.mean_square = c.samples > 0 ? sq / static_cast<double>(c.samples) : 0.0;
    c.pass = c.sup <= tolerance;
    checks_.push_back(c);
    return checks_.back();
}

ResidualCheck& ResidualReport::add_value(const std::string& name, double value, double tolerance) {
    return add(name, std::vector<double>{value}, tolerance);
}

void ResidualReport::merge(const ResidualReport& other, const std::string& prefix) {
    for (auto c : other.checks_) {
        c.name = prefix + c.name;
        checks_.push_back(c);
    }
    for (const auto& w : other.warnings_) warnings_.push_back(prefix + w);
    for (const auto& [k, v] : other.meta_) meta_.emplace(prefix + k, v);
}

const ResidualCheck& ResidualReport::at(const std::string& name) const {
    for (const auto& c : checks_)
        if (c.name == name) return c;
    throw std::out_of_range("no residual check named " + name);
}

bool ResidualReport::has(const std::string& name) const {
    return std::any_of(checks_.begin(), checks_.end(), [&](const auto& c) { return c.name == name; });
}

bool ResidualReport::all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const auto& c) { return c.pass; });
}

bool ResidualReport::set_tolerance(const std::string& name, double tolerance) {
    for (auto& c : checks_)
        if (c.name == name) {
            c.tolerance = tolerance;
            c.pass = c.sup <= tolerance;
            return true;
        }
    return false;
}

nlohmann::ordered_json ResidualReport::to_json() const {
    nlohmann::ordered_json j;
    j["pass"] = all_pass();
    auto& arr = j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks_) {
        nlohmann::ordered_json e;
        e["name"] = c.name;
        e["sup"] = std::isfinite(c.sup) ? nlohmann::ordered_json(c.sup) : nlohmann::ordered_json("nan");
        e["mean_square"] = std::isfinite(c.mean_square) ? nlohmann::ordered_json(c.mean_square)
                                                         : nlohmann::ordered_json("nan");
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        e["samples"] = c.samples;
        e["excluded"] = c.excluded;
        arr.push_back(e);
    }
    j["warnings"] = warnings_;
    auto& m = j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta_) m[k] = v;
    return j;
}

ResidualReport ResidualReport::from_json(const nlohmann::ordered_json& j) {
    ResidualReport r;
    for (const auto& e : j.at("checks")) {
        ResidualCheck c;
        c.name = e.at("name").get<std::string>();
        auto num = [](const nlohmann::ordered_json& v) {
            return v.is_string() ? std::nan("") : v.get<double>();
        };
        c.sup = num(e.at("sup"));
        c.mean_square = num(e.at("mean_square"));
        c.tolerance = e.at("tolerance").get<double>();
        c.pass = e.at("pass").get<bool>();
        c.samples = e.at("samples").get<long>();
        c.excluded = e.at("excluded").get<long>();
        r.checks_.push_back(c);
    }
    if (j.contains("warnings")) r.warnings_ = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("meta"))
        for (auto it = j.at("meta").begin(); it != j.at("meta").end(); ++it)
            r.meta_[it.key()] = it.value().get<std::string>();
    return r;
}

}  // namespace fbw
