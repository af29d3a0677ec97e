// qkzb: run check suites and write JSON reports.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qkzb/suites.hpp"

namespace fs = std::filesystem;
using namespace qkzb;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<std::pair<int, int>> parse_nm(const std::string& text) {
    // "2x2,3x2"
    std::vector<std::pair<int, int>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto x = item.find('x');
        if (x == std::string::npos) throw DomainError("--nm entries look like 3x2, got '" + item + "'");
        auto a = parse_int_list(item.substr(0, x)), b = parse_int_list(item.substr(x + 1));
        if (a.size() != 1 || b.size() != 1) throw DomainError("--nm entries look like 3x2, got '" + item + "'");
        out.emplace_back(a[0], b[0]);
    }
    return out;
}

// Relative output paths land in $QKZB_REPORT_DIR when it is set.
fs::path report_path(const std::string& output) {
    fs::path p(output);
    if (const char* dir = std::getenv("QKZB_REPORT_DIR"); dir && *dir && p.is_relative()) p = fs::path(dir) / p;
    return p;
}

void print_summary(const std::vector<CheckReport>& reports, std::ostream& os) {
    for (const auto& r : reports) {
        const char* status = r.passed ? "pass" : (counts_as_failure(r) ? "FAIL" : "dev ");
        os << status << "  " << r.name << "  residual=" << r.residual << "  tol=" << r.tolerance << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for the deformed qKZ / XXZ toolkit"};
    app.require_subcommand(0, 1);
    bool print_schema = false;
    app.add_flag("--schema", print_schema, "print the report JSON schema and exit");

    std::string nu_text, n_text, nm_text, config_path, output;
    std::vector<std::string> tol_items;
    int samples = -1;
    std::uint64_t seed = 0;
    double quad_tol = -1;
    bool seed_set = false, quiet = false;

    std::vector<std::string> names = suite_names();
    names.push_back("all");
    for (const auto& name : names) {
        auto* sub = app.add_subcommand(name, "run the " + name + " checks");
        sub->add_option("--nu", nu_text, "coupling values, comma separated");
        sub->add_option("--n", n_text, "sizes: 2..10, 2,3,5 or 4");
        sub->add_option("--nm", nm_text, "mpoly sizes, e.g. 2x2,3x2");
        sub->add_option("--samples", samples, "sample count override");
        sub->add_option("--seed", seed, "random seed")->each([&](const std::string&) { seed_set = true; });
        sub->add_option("--tol", tol_items, "tolerance override, PREFIX=VALUE or VALUE for every check");
        sub->add_option("--quad-tol", quad_tol, "quadrature tolerance");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--output", output, "report file");
        sub->add_flag("--quiet", quiet, "no per-check summary");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (print_schema) {
        std::cout << report_schema().dump(2) << "\n";
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return kExitUsage;
    }
    const std::string suite = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw DomainError("cannot read config '" + config_path + "'");
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw DomainError("config is not JSON: " + std::string(e.what()));
            }
            cfg.merge_json(j);
        }
        json flags = json::object();
        if (!nu_text.empty()) {
            std::vector<double> v;
            std::stringstream ss(nu_text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                std::size_t pos = 0;
                double x = 0;
                try {
                    x = std::stod(item, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos == 0 || pos != item.size()) throw DomainError("bad --nu value '" + item + "'");
                v.push_back(x);
            }
            flags["nu"] = v;
        }
        if (!n_text.empty()) flags["n"] = parse_int_list(n_text);
        if (!nm_text.empty()) {
            json a = json::array();
            for (auto [x, y] : parse_nm(nm_text)) a.push_back({x, y});
            flags["nm"] = a;
        }
        if (samples >= 0) flags["samples"] = samples;
        if (seed_set) flags["seed"] = seed;
        if (quad_tol >= 0) flags["quad_tol"] = quad_tol;
        if (!output.empty()) flags["output"] = output;
        for (const auto& item : tol_items) {
            auto eq = item.find('=');
            const std::string key = eq == std::string::npos ? "" : item.substr(0, eq);
            const std::string val = eq == std::string::npos ? item : item.substr(eq + 1);
            try {
                flags["tolerances"][key] = std::stod(val);
            } catch (const std::exception&) {
                throw DomainError("bad --tol '" + item + "'");
            }
        }
        cfg.merge_json(flags);
    } catch (const std::exception& e) {
        std::cerr << "qkzb: " << e.what() << "\n";
        return kExitUsage;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckReport> reports;
    try {
        reports = run_suite(suite, cfg);
    } catch (const std::exception& e) {
        // suite-level errors become a failed check so a report is still written
        CheckReport r = make_report(suite + ".error", 0, 0, 0);
        r.passed = false;
        r.details["error"] = e.what();
        reports.push_back(r);
    }
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const json report = suite_report(suite, cfg, reports, runtime);

    int status = report["passed"].get<bool>() ? 0 : kExitFail;
    if (!cfg.output.empty()) {
        const fs::path p = report_path(cfg.output);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << report.dump(2) << "\n";
        if (!out) {
            std::cerr << "qkzb: cannot write " << p << "\n";
            return kExitUsage;
        }
    } else {
        std::cout << report.dump(2) << "\n";
    }
    if (!quiet) print_summary(reports, cfg.output.empty() ? std::cerr : std::cout);
    return status;
}
