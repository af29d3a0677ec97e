#pragma once

#include <string>

#include <json.hpp>

namespace qkzb {

using json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

struct CheckReport {
    std::string name;
    bool passed = false;
    double residual = 0;   // max over samples
    double tolerance = 0;
    int samples = 0;
    json details = json::object();  // check-specific extras (failing sample, etc.)

    json to_json() const;
};

CheckReport make_report(std::string name, double residual, double tolerance, int samples);

}  // namespace qkzb
