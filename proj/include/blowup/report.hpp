#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace blowup {

/// One certified property: measured residual against a tolerance. With
/// `at_least` the property requires residual >= tolerance instead of <=.
struct PropertyResult {
    std::string id;
    std::string statement;
    double residual = 0.0;
    double tolerance = 0.0;
    bool at_least = false;
    bool pass = false;
    std::string note;
};

PropertyResult at_most(std::string id, std::string statement, double residual, double tolerance,
                       std::string note = {});
PropertyResult at_least(std::string id, std::string statement, double residual, double tolerance,
                        std::string note = {});

class VerificationReport {
public:
    explicit VerificationReport(std::string construction = {}) : construction_(std::move(construction)) {}

    void add(PropertyResult r) { entries_.push_back(std::move(r)); }
    void add(const std::vector<PropertyResult>& rs) {
        for (const auto& r : rs) add(r);
    }
    void skip(std::string id, std::string reason) { skipped_.push_back({std::move(id), std::move(reason)}); }
    void set_info(const std::string& key, nlohmann::json value) { info_[key] = std::move(value); }
    void set_config(nlohmann::json config) { config_ = std::move(config); }

    const std::vector<PropertyResult>& entries() const { return entries_; }
    const PropertyResult* find(const std::string& id) const;
    bool all_pass() const;

    /// Entries sorted by id; identical inputs give identical text.
    nlohmann::json to_json() const;

private:
    std::string construction_;
    std::vector<PropertyResult> entries_;
    std::vector<std::pair<std::string, std::string>> skipped_;
    nlohmann::json info_ = nlohmann::json::object();
    nlohmann::json config_ = nlohmann::json::object();
};

/// %.17g, enough digits to round-trip a double.
std::string format17(double v);

}  // namespace blowup
