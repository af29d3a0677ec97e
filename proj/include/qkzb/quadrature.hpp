#pragma once

#include <functional>
#include <vector>

#include "qkzb/errors.hpp"

namespace qkzb {

enum class QuadRule { TanhSinh, GaussLegendrePanels };

struct QuadratureSpec {
    QuadRule rule = QuadRule::TanhSinh;
    double tol = 1e-13;       // target absolute error (relative to the running magnitude)
    double cutoff = 0;        // upper limit for half-line integrals; 0 = choose from decay
    int max_level = 10;       // tanh-sinh halvings
    int panels = 64;          // Gauss-Legendre panels
    int order = 20;           // nodes per panel
    bool throw_on_failure = true;
};

struct QuadResult {
    cplx value;
    double error = 0;  // estimate
    int evaluations = 0;
    bool converged = true;
};

using Integrand = std::function<cplx(double)>;

// Double-exponential rule on [a, b]; error estimate from successive halvings.
QuadResult tanh_sinh(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

// Composite Gauss-Legendre on the given panel edges; error from comparing
// `order` against order/2+1 nodes per panel.
QuadResult gauss_panels(const Integrand& f, const std::vector<double>& edges, int order = 20);

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Nodes and weights of a composite rule, reusable across many integrands.
struct NodeSet {
    std::vector<double> x;
    std::vector<double> w;
};
NodeSet panel_nodes(const std::vector<double>& edges, int order);

// Edges refined geometrically towards `a`: a, a+s, a+2s, a+4s, ... up to a+1,
// then uniform steps of `step` up to b.
std::vector<double> graded_edges(double a, double b, double first, double step);

}  // namespace qkzb
