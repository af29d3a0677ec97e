#include "qkzb/report.hpp"

#include <cmath>

namespace qkzb {

json CheckReport::to_json() const {
    return json{{"name", name},           {"passed", passed},   {"residual", residual},
                {"tolerance", tolerance}, {"samples", samples}, {"details", details}};
}

CheckReport make_report(std::string name, double residual, double tolerance, int samples) {
    CheckReport r;
    r.name = std::move(name);
    r.residual = residual;
    r.tolerance = tolerance;
    r.samples = samples;
    r.passed = std::isfinite(residual) && residual <= tolerance;
    return r;
}

}  // namespace qkzb
