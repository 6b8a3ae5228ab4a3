#include "blowup/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace blowup {

PropertyResult at_most(std::string id, std::string statement, double residual, double tolerance,
                       std::string note) {
    PropertyResult r{std::move(id), std::move(statement), residual, tolerance, false, false,
                     std::move(note)};
    r.pass = residual <= tolerance;
    return r;
}

PropertyResult at_least(std::string id, std::string statement, double residual, double tolerance,
                        std::string note) {
    PropertyResult r{std::move(id), std::move(statement), residual, tolerance, true, false,
                     std::move(note)};
    r.pass = residual >= tolerance;
    return r;
}

const PropertyResult* VerificationReport::find(const std::string& id) const {
    for (const auto& e : entries_)
        if (e.id == id) return &e;
    return nullptr;
}

bool VerificationReport::all_pass() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const PropertyResult& r) { return r.pass; });
}

namespace {

nlohmann::json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

nlohmann::json VerificationReport::to_json() const {
    std::vector<PropertyResult> sorted = entries_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const PropertyResult& a, const PropertyResult& b) { return a.id < b.id; });
    nlohmann::json props = nlohmann::json::array();
    for (const auto& r : sorted) {
        nlohmann::json e = {{"id", r.id},
                            {"statement", r.statement},
                            {"residual", number(r.residual)},
                            {"tolerance", number(r.tolerance)},
                            {"comparison", r.at_least ? ">=" : "<="},
                            {"pass", r.pass}};
        if (!r.note.empty()) e["note"] = r.note;
        props.push_back(std::move(e));
    }
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& [id, why] : skipped_) skipped.push_back({{"id", id}, {"reason", why}});
    std::string config_text = config_.dump();
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016zx", std::hash<std::string>{}(config_text));
    return {{"construction", construction_},
            {"config", config_},
            {"config_hash", hash},
            {"all_pass", all_pass()},
            {"properties", props},
            {"skipped", skipped},
            {"info", info_}};
}

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace blowup
