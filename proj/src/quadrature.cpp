#include "qkzb/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace qkzb {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

// Abscissa offset from the nearer endpoint and the weight, at parameter t.
struct TsNode {
    double offset;  // 1 - |x| on [-1, 1], computed without cancellation
    double weight;
};

TsNode ts_node(double t) {
    const double u = kHalfPi * std::sinh(std::abs(t));
    const double e = std::exp(-2 * u);
    const double ch = std::cosh(u);
    return {2 * e / (1 + e), kHalfPi * std::cosh(t) / (ch * ch)};
}

}  // namespace

QuadResult tanh_sinh(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    constexpr double tmax = 4.5;  // reaches ~1e-61 from the endpoints
    int evals = 0;
    auto eval_pair = [&](double t) -> cplx {
        const TsNode n = ts_node(t);
        if (n.offset <= 0 || n.weight < 1e-300) return 0;
        const double dx = d * n.offset;
        cplx s = f(b - dx) + f(a + dx);
        evals += 2;
        return s * n.weight;
    };

    double h = 1.0;
    cplx sum = f(c) * kHalfPi;
    ++evals;
    for (double t = h; t <= tmax; t += h) sum += eval_pair(t);
    cplx est = sum * h * d;
    double err = std::abs(est);
    bool converged = false;
    for (int level = 1; level <= spec.max_level; ++level) {
        h *= 0.5;
        for (double t = h; t <= tmax; t += 2 * h) sum += eval_pair(t);
        const cplx next = sum * h * d;
        err = std::abs(next - est);
        est = next;
        if (level >= 3 && err <= spec.tol * std::max(1.0, std::abs(est))) {
            converged = true;
            break;
        }
    }
    if (!converged && spec.throw_on_failure)
        throw ConvergenceError("tanh-sinh did not converge", err);
    return {est, err, evals, converged};
}

const GaussRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(order); it != cache.end()) return it->second;
    if (order < 1) throw DomainError("Gauss-Legendre order must be positive");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = rule.weights[order - 1 - i] = w;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

NodeSet panel_nodes(const std::vector<double>& edges, int order) {
    const GaussRule& g = gauss_legendre(order);
    NodeSet ns;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double c = 0.5 * (edges[p] + edges[p + 1]), d = 0.5 * (edges[p + 1] - edges[p]);
        for (int i = 0; i < order; ++i) {
            ns.x.push_back(c + d * g.nodes[i]);
            ns.w.push_back(d * g.weights[i]);
        }
    }
    return ns;
}

std::vector<double> graded_edges(double a, double b, double first, double step) {
    std::vector<double> e{a};
    for (double s = first; s < 1 && a + s < b; s *= 2) e.push_back(a + s);
    for (double x = a + 1; x < b; x += step) e.push_back(x);
    e.push_back(b);
    return e;
}

QuadResult gauss_panels(const Integrand& f, const std::vector<double>& edges, int order) {
    const int low = order / 2 + 1;
    const NodeSet hi = panel_nodes(edges, order);
    const NodeSet lo = panel_nodes(edges, low);
    cplx sh = 0, sl = 0;
    for (std::size_t i = 0; i < hi.x.size(); ++i) sh += hi.w[i] * f(hi.x[i]);
    for (std::size_t i = 0; i < lo.x.size(); ++i) sl += lo.w[i] * f(lo.x[i]);
    return {sh, std::abs(sh - sl), static_cast<int>(hi.x.size() + lo.x.size()), true};
}

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
    if (spec.rule == QuadRule::TanhSinh) return tanh_sinh(f, a, b, spec);
    std::vector<double> edges(spec.panels + 1);
    for (int i = 0; i <= spec.panels; ++i) edges[i] = a + (b - a) * i / spec.panels;
    QuadResult r = gauss_panels(f, edges, spec.order);
    r.converged = r.error <= spec.tol * std::max(1.0, std::abs(r.value));
    if (!r.converged && spec.throw_on_failure)
        throw ConvergenceError("Gauss-Legendre panels did not converge", r.error);
    return r;
}

}  // namespace qkzb
