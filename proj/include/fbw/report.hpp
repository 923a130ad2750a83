#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace fbw {

struct ResidualCheck {
    std::string name;
    double sup = 0.0;
    double mean_square = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    long samples = 0;
    long excluded = 0;
};

/// Named residual norms with pass flags; the universal output of every
/// verification operation. pass <=> sup <= tolerance.
class ResidualReport {
public:
    /// Adds a check from raw pointwise residual magnitudes (absolute values
    /// are taken). An empty sample set passes with sup 0.
    ResidualCheck& add(const std::string& name, const std::vector<double>& residuals, double tolerance,
                       long excluded = 0);
    /// Adds a one-number check.
    ResidualCheck& add_value(const std::string& name, double value, double tolerance);

    void merge(const ResidualReport& other, const std::string& prefix = "");

    const std::vector<ResidualCheck>& checks() const { return checks_; }
    const ResidualCheck& at(const std::string& name) const;
    bool has(const std::string& name) const;
    double sup(const std::string& name) const { return at(name).sup; }

    bool all_pass() const;
    // false when no check has that name
    bool set_tolerance(const std::string& name, double tolerance);

    std::map<std::string, std::string>& meta() { return meta_; }
    const std::map<std::string, std::string>& meta() const { return meta_; }
    std::vector<std::string>& warnings() { return warnings_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    nlohmann::ordered_json to_json() const;
    static ResidualReport from_json(const nlohmann::ordered_json& j);

private:
    std::vector<ResidualCheck> checks_;
    std::map<std::string, std::string> meta_;
    std::vector<std::string> warnings_;
};

}  // namespace fbw
