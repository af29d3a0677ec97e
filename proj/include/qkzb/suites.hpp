#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qkzb/errors.hpp"
#include "qkzb/report.hpp"

namespace qkzb {

// Empty lists and zero counts mean "suite default".
struct RunConfig {
    std::vector<double> nu;
    std::vector<int> n;                    // n, or chain length for qg-invariance/spectrum
    std::vector<std::pair<int, int>> nm;   // mpoly sizes
    int samples = 0;
    std::uint64_t seed = 1;
    std::map<std::string, double> tolerances;  // by check name prefix, longest match wins
    double quad_tol = 0;                       // 0: library default
    std::string data_dir;                      // shipped Q tables; empty: build-time path
    std::string output;                        // report path; empty: stdout only

    double tol(const std::string& check, double fallback) const;
    json to_json() const;
    // Unknown keys or wrong types throw DomainError. Keys absent keep the
    // values already in *this, so a file can be layered over defaults. On error
    // *this is unchanged.
    void merge_json(const json& j);

private:
    void merge_into(const json& j);
};

// "2..10", "2,3,5" or "4"; DomainError otherwise.
std::vector<int> parse_int_list(const std::string& text);

std::vector<std::string> suite_names();  // without "all"
// Runs one suite, or every suite in suite_names() order for "all". Reports come
// back sorted by name. DomainError for an unknown suite.
std::vector<CheckReport> run_suite(const std::string& name, const RunConfig& cfg);

// Negative controls pass when the residual exceeds the tolerance; the flag sits
// in details["negative_control"].
CheckReport make_negative_control(std::string name, double residual, double threshold, int samples);
// A check that fails for a recorded reason keeps passed = false and carries the
// reason in details["documented_deviation"]; it does not count as a failure.
void mark_deviation(CheckReport& r, const std::string& reason);
bool counts_as_failure(const CheckReport& r);

inline constexpr const char* kToolName = "qkzb";

// {schema_version, tool, suite, config, checks, summary, passed, timing}; the
// timing object is the only part that may differ between identical runs.
json suite_report(const std::string& suite, const RunConfig& cfg, const std::vector<CheckReport>& reports,
                  double runtime_s);
json report_schema();

}  // namespace qkzb
