// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when a criterion fails for a reason other than a documented deviation.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "../unit/poly_oracle.hpp"
#include "qkzb/poly.hpp"
#include "qkzb/suites.hpp"

using namespace qkzb;

namespace {

struct Outcome {
    bool passed = true;
    bool deviation_only = true;  // every failure is a documented deviation
    double worst = 0;            // largest residual among ordinary checks
    std::vector<std::string> notes;

    void take(const std::vector<CheckReport>& reps) {
        for (const auto& r : reps) {
            if (!r.details.contains("negative_control") && !r.details.contains("documented_deviation"))
                worst = std::max(worst, r.residual);
            if (r.passed) continue;
            passed = false;
            if (counts_as_failure(r)) {
                deviation_only = false;
                notes.push_back(r.name + " residual=" + fmt(r.residual) + " tol=" + fmt(r.tolerance));
            } else {
                notes.push_back(r.name + " (documented deviation)");
            }
        }
    }
    void fail(const std::string& why) {
        passed = false;
        deviation_only = false;
        notes.push_back(why);
    }
    static std::string fmt(double x) {
        std::ostringstream os;
        os.precision(3);
        os << x;
        return os.str();
    }
};

std::vector<CheckReport> keep(std::vector<CheckReport> reps, const std::vector<std::string>& prefixes) {
    std::vector<CheckReport> out;
    for (auto& r : reps)
        for (const auto& p : prefixes)
            if (r.name.rfind(p, 0) == 0) {
                out.push_back(std::move(r));
                break;
            }
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void time_limit(Outcome& o, double took, double limit) {
    if (took > limit) o.fail("runtime " + Outcome::fmt(took) + " s over " + Outcome::fmt(limit) + " s");
}

Outcome criterion_ybe() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c;
    c.nu = {0.1, 0.3, 0.5, 0.7};
    c.samples = 100;
    o.take(keep(run_suite("ybe", c), {"ybe."}));
    time_limit(o, seconds_since(t0), 5);
    return o;
}

Outcome criterion_reflection() {
    Outcome o;
    RunConfig c;
    c.nu = {0.1, 0.3, 0.5, 0.7};
    c.samples = 50;
    o.take(keep(run_suite("ybe", c), {"r0.reflection", "r.unitarity"}));
    return o;
}

Outcome criterion_qg() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c;
    c.nu = {0.1, 0.3, 0.7};
    c.n = {2, 3, 4, 5, 6};
    o.take(run_suite("qg-invariance", c));
    time_limit(o, seconds_since(t0), 30);
    return o;
}

Outcome criterion_dims() {
    Outcome o;
    RunConfig c;
    c.n = parse_int_list("1..12");
    auto reps = run_suite("dims", c);
    int ranks = 0;
    for (const auto& r : reps) ranks += r.name.rfind("dims.singlet_rank", 0) == 0;
    if (ranks != 3) o.fail("expected singlet rank checks for n = 1, 2, 3");
    o.take(reps);
    return o;
}

Outcome criterion_riemann() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c;
    c.n = {2, 3};
    c.nu = {0.2, 0.3};
    c.samples = 5;
    o.take(run_suite("riemann", c));
    time_limit(o, seconds_since(t0), 120);
    return o;
}

Outcome criterion_mpoly() {
    Outcome o;
    RunConfig c;
    c.nm = {{2, 2}, {3, 2}, {2, 3}};
    c.samples = 20;
    o.take(run_suite("mpoly", c));

    // X kernel against the brute-force double sum, exact
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 7);
    int mismatches = 0, points = 0;
    for (auto [n, m] : c.nm) {
        const auto ts = oracle::subsets(2 * n, n - 1), tps = oracle::subsets(2 * m, m - 1);
        for (int s = 0; s < 50; ++s, ++points) {
            std::vector<GaussQ> v;
            while (static_cast<int>(v.size()) < 2 * n + 2 * m) {
                GaussQ x(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
                bool clash = false;
                for (const auto& y : v) clash = clash || x == y || x == -y || x == GaussQ::i() * y || y == GaussQ::i() * x;
                if (!clash) v.push_back(x);
            }
            std::vector<GaussQ> t(v.begin() + 2 * n, v.end()), b(v.begin(), v.begin() + 2 * n);
            const auto& T1 = ts[s % ts.size()];
            const auto& T2 = tps[(s / ts.size()) % tps.size()];
            SubsetPair sp(n, m, T1, T2);
            mismatches += x_kernel(sp, b, t) != oracle::brute_x(n, m, T1, T2, b, t, false);
            mismatches += x_kernel(sp, b, t, {PairReading::Distinct, XDenominator::ComplementS}) !=
                          oracle::brute_x(n, m, T1, T2, b, t, true);
        }
    }
    if (mismatches) o.fail("x kernel differs from the brute-force sum at " + std::to_string(mismatches) + " of " +
                           std::to_string(2 * points) + " evaluations");
    return o;
}

Outcome criterion_special() {
    Outcome o;
    RunConfig c;
    c.nu = {0.2, 0.3, 0.5};
    c.samples = 20;
    o.take(run_suite("special-fns", c));
    return o;
}

Outcome criterion_hyperelliptic() {
    Outcome o;
    o.take(run_suite("periods", RunConfig{}));
    RunConfig c;
    c.nu = {0.05, 0.02, 0.01};
    auto cl = run_suite("classical-limit", c);
    bool monotone = false;
    for (const auto& r : cl) monotone = monotone || r.name == "classical.monotone";
    if (!monotone) o.fail("no monotonicity check ran");
    o.take(cl);
    return o;
}

Outcome criterion_qkz() {
    Outcome o;
    RunConfig c;
    c.nu = {0.3};
    o.take(run_suite("qkz-check", c));
    o.take(keep(run_suite("correlator-n1", c), {"correlator.n1.singlet_complement", "correlator.n1.residuals"}));
    return o;
}

Outcome criterion_reproducible() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig c;
    c.seed = 2024;
    json first;
    for (int run = 0; run < 2; ++run) {
        const auto ts = std::chrono::steady_clock::now();
        json rep = suite_report("all", c, run_suite("all", c), seconds_since(ts));
        time_limit(o, rep["timing"]["runtime_s"].get<double>(), 600);
        rep.erase("timing");
        if (run == 0) {
            first = rep;
        } else if (rep.dump() != first.dump()) {
            o.fail("second run differs from the first");
        }
    }
    std::cout << "    (two full runs took " << Outcome::fmt(seconds_since(t0)) << " s)\n";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Yang-Baxter for all R and S matrices", criterion_ybe},
        {"R0 reflection and R unitarity", criterion_reflection},
        {"quantum-group invariance of H_RXXZ", criterion_qg},
        {"dimension identities and singlet rank", criterion_dims},
        {"deformed Riemann bilinear relations", criterion_riemann},
        {"M polynomiality, skew symmetry, X kernel", criterion_mpoly},
        {"psi, chi and dispersion identities", criterion_special},
        {"hyperelliptic periods and classical limit", criterion_hyperelliptic},
        {"qKZ n = 1 solution and controls", criterion_qkz},
        {"reproducibility and total runtime", criterion_reproducible},
    };
    int hard_failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("threw: ") + e.what());
        }
        const double took = seconds_since(t0);
        std::printf("criterion %2zu: %s  %s  (max residual %.3g, %.2f s)%s\n", i + 1, o.passed ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), o.worst, took,
                    !o.passed && o.deviation_only ? "  [documented deviation]" : "");
        for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
        if (!o.passed && !o.deviation_only) ++hard_failures;
    }
    return hard_failures == 0 ? 0 : 1;
}
