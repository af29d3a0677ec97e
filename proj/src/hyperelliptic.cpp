#include "qkzb/hyperelliptic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "qkzb/special.hpp"

namespace qkzb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0, 1};

double seg_point_distance(cplx u, cplx v, cplx z) {
    cplx d = v - u;
    double t = std::clamp(std::real((z - u) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    return std::abs(z - (u + t * d));
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
    double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
    double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double seg_seg_distance(cplx p1, cplx p2, cplx q1, cplx q2) {
    if (segments_intersect(p1, p2, q1, q2)) return 0;
    return std::min({seg_point_distance(p1, p2, q1), seg_point_distance(p1, p2, q2),
                     seg_point_distance(q1, q2, p1), seg_point_distance(q1, q2, p2)});
}

cplx horner(const CPoly& p, cplx x) {
    cplx s = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
    return s;
}

}  // namespace

// ---- curve ------------------------------------------------------------------

HyperellipticCurve::HyperellipticCurve(std::vector<cplx> bp) : e_(std::move(bp)) {
    if (e_.empty() || e_.size() % 2) throw DomainError("hyperelliptic curve needs 2n >= 2 branch points");
    for (const cplx& b : e_)
        if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) throw DomainError("branch point not finite");
    std::sort(e_.begin(), e_.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    double scale = 0;
    for (const cplx& b : e_) scale = std::max(scale, std::abs(b));
    sep_ = INFINITY;
    for (std::size_t i = 0; i < e_.size(); ++i)
        for (std::size_t j = i + 1; j < e_.size(); ++j) sep_ = std::min(sep_, std::abs(e_[i] - e_[j]));
    if (!(sep_ > 1e-12 * std::max(scale, 1.0))) throw DomainError("coincident branch points");
    auto cs = cuts();
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = a + 1; b < cs.size(); ++b)
            if (seg_seg_distance(e_[cs[a].first], e_[cs[a].second], e_[cs[b].first], e_[cs[b].second]) == 0)
                throw DomainError("default cuts cross");
}

std::vector<std::pair<int, int>> HyperellipticCurve::cuts() const {
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < n(); ++k) out.emplace_back(2 * k, 2 * k + 1);
    return out;
}

cplx HyperellipticCurve::c2(cplx a) const {
    cplx p = 1;
    for (const cplx& b : e_) p *= a - b;
    return p;
}

cplx HyperellipticCurve::c(cplx a) const {
    cplx p = 1;
    for (int k = 0; k < n(); ++k) {
        cplx d1 = a - e_[2 * k], d2 = a - e_[2 * k + 1];
        if (d1 == 0.0) return 0;
        p *= d1 * std::sqrt(d2 / d1);
    }
    return p;
}

CycleBasis CycleBasis::standard(const HyperellipticCurve& curve) {
    CycleBasis cb;
    int n = curve.n();
    for (int k = 1; k <= n - 1; ++k) {
        cb.a.push_back(Cycle{{{2 * k - 2, 2 * k - 1}}});
        Cycle b;
        for (int j = k; j <= n - 1; ++j) b.loops.emplace_back(2 * j - 1, 2 * j);
        cb.b.push_back(b);
    }
    return cb;
}

// ---- loops ------------------------------------------------------------------

namespace {

struct Node {
    cplx z, dz;
};

// edges on [0, len], graded geometrically towards the ends flagged
std::vector<double> graded(double len, double r, bool left, bool right) {
    auto one_side = [&](double span) {
        std::vector<double> e{0};
        while (e.back() < span) e.push_back(std::min(span, e.back() + std::max(0.5 * r, e.back())));
        return e;
    };
    if (left && right) {
        auto h = one_side(len / 2);
        std::vector<double> e = h;
        for (auto it = h.rbegin() + 1; it != h.rend(); ++it) e.push_back(len - *it);
        return e;
    }
    auto h = one_side(len);
    if (left) return h;
    std::vector<double> e;
    for (auto it = h.rbegin(); it != h.rend(); ++it) e.push_back(len - *it);
    return e;
}

std::vector<double> refine(const std::vector<double>& edges, int level) {
    std::vector<double> out{edges.front()};
    int parts = 1 << level;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        for (int p = 1; p <= parts; ++p) out.push_back(edges[k] + (edges[k + 1] - edges[k]) * p / parts);
    return out;
}

std::vector<Node> stadium_nodes(cplx u, cplx v, double r, int order, int level) {
    const cplx d = (v - u) / std::abs(v - u), nrm = I * d;
    const double L = std::abs(v - u);
    std::vector<Node> nodes;
    auto line = [&](cplx base, cplx dir, double s0, double s1, const std::vector<double>& edges_in) {
        // edges_in on [0, |s1-s0|] measured from s0
        NodeSet ns = panel_nodes(refine(edges_in, level), order);
        double sgn = s1 >= s0 ? 1 : -1;
        for (std::size_t k = 0; k < ns.x.size(); ++k)
            nodes.push_back({base + (s0 + sgn * ns.x[k]) * dir, sgn * ns.w[k] * dir});
    };
    auto arc = [&](cplx centre, double th0) {
        std::vector<double> edges{0, pi / 4, pi / 2, 3 * pi / 4, pi};
        NodeSet ns = panel_nodes(refine(edges, level), order);
        for (std::size_t k = 0; k < ns.x.size(); ++k) {
            cplx w = std::polar(r, th0 + ns.x[k]);
            nodes.push_back({centre + w, I * w * ns.w[k]});
        }
    };
    const cplx top = u + r * nrm, bottom = u - r * nrm;
    // top side, midpoint to u (graded towards u, which is the far end here)
    {
        auto e = graded(L / 2, r, false, true);
        line(top, d, L / 2, 0, e);
    }
    arc(u, std::arg(nrm));
    line(bottom, d, 0, L, graded(L, r, true, true));
    arc(v, std::arg(d) - pi / 2);
    line(top, d, L, L / 2, graded(L / 2, r, true, false));
    return nodes;
}

void check_stadium(const HyperellipticCurve& curve, int i, int j, double r) {
    const auto& e = curve.branch_points();
    for (int k = 0; k < static_cast<int>(e.size()); ++k) {
        if (k == i || k == j) continue;
        if (seg_point_distance(e[i], e[j], e[k]) <= 2 * r) {
            std::ostringstream os;
            os << "contour around branch points " << i + 1 << "," << j + 1 << " meets branch point " << k + 1;
            throw DomainError(os.str());
        }
    }
    for (auto [p, q] : curve.cuts()) {
        if (p == i || p == j || q == i || q == j) continue;
        if (seg_seg_distance(e[i], e[j], e[p], e[q]) <= 2 * r) {
            std::ostringstream os;
            os << "contour around branch points " << i + 1 << "," << j + 1 << " crosses the cut " << p + 1 << "-"
               << q + 1;
            throw DomainError(os.str());
        }
    }
}

struct Sweep {
    std::vector<cplx> values;
    bool step_ok = true;
    bool closed = true;
};

// c along the nodes by continuation from the sheet-1 value at the first node
Sweep continue_c(const HyperellipticCurve& curve, const std::vector<Node>& nodes, double max_step) {
    Sweep s;
    s.values.reserve(nodes.size());
    cplx prev = curve.c(nodes.front().z);
    s.values.push_back(prev);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        cplx w = std::sqrt(curve.c2(nodes[k].z));
        if (std::abs(w - prev) > std::abs(w + prev)) w = -w;
        if (std::abs(std::arg(w / prev)) >= max_step) s.step_ok = false;
        s.values.push_back(w);
        prev = w;
    }
    cplx back = std::sqrt(curve.c2(nodes.front().z));
    if (std::abs(back - prev) > std::abs(back + prev)) back = -back;
    s.closed = std::abs(back - s.values.front()) < std::abs(back + s.values.front());
    return s;
}

std::vector<LoopResult> loop_integrals(const HyperellipticCurve& curve, int i, int j, const std::vector<CPoly>& ps,
                                       const PeriodOptions& opt) {
    const auto& e = curve.branch_points();
    const int N = static_cast<int>(e.size());
    if (i < 0 || j < 0 || i >= N || j >= N || i == j) throw DomainError("loop: bad branch point indices");
    const double r = curve.clearance();
    check_stadium(curve, i, j, r);

    std::vector<LoopResult> out(ps.size());
    for (int level = 0; level <= opt.max_refine; ++level) {
        auto fine = stadium_nodes(e[i], e[j], r, opt.order, level);
        auto coarse = stadium_nodes(e[i], e[j], r, opt.order / 2 + 1, level);
        Sweep sf = continue_c(curve, fine, opt.max_arg_step);
        Sweep sc = continue_c(curve, coarse, opt.max_arg_step);
        if (!sf.step_ok || !sc.step_ok) continue;
        if (!sf.closed || !sc.closed)
            throw ConvergenceError("monodromy closure failure: c does not return to its sheet", 1.0);
        for (std::size_t q = 0; q < ps.size(); ++q) {
            cplx vf = 0, vc = 0;
            for (std::size_t k = 0; k < fine.size(); ++k) vf += horner(ps[q], fine[k].z) / sf.values[k] * fine[k].dz;
            for (std::size_t k = 0; k < coarse.size(); ++k)
                vc += horner(ps[q], coarse[k].z) / sc.values[k] * coarse[k].dz;
            out[q] = {vf, std::abs(vf - vc), level};
        }
        return out;
    }
    throw ConvergenceError("sheet tracking: step control not met after refinement", opt.max_arg_step);
}

void check_degrees(const HyperellipticCurve& curve, const std::vector<CPoly>& ps, bool meromorphic) {
    int cap = meromorphic ? 2 * curve.n() - 2 : curve.n() - 2;
    for (const auto& p : ps)
        if (degree(p) > cap) {
            std::ostringstream os;
            os << "differential of degree " << degree(p) << " exceeds " << cap
               << (meromorphic ? "" : " (holomorphic; set allow_meromorphic)");
            throw DomainError(os.str());
        }
}

}  // namespace

LoopResult loop_integral(const HyperellipticCurve& curve, int i, int j, const CPoly& p, const PeriodOptions& opt) {
    return loop_integrals(curve, i, j, {p}, opt).front();
}

PeriodMatrixResult periods(const HyperellipticCurve& curve, const std::vector<CPoly>& differentials,
                           const CycleBasis& cycles, const PeriodOptions& opt) {
    check_degrees(curve, differentials, opt.allow_meromorphic);
    const int g = static_cast<int>(cycles.a.size());
    if (static_cast<int>(cycles.b.size()) != g) throw DomainError("cycle basis needs as many b- as a-cycles");
    PeriodMatrixResult res{Mat::Zero(static_cast<Eigen::Index>(differentials.size()), 2 * g), 0};
    std::map<std::pair<int, int>, std::vector<LoopResult>> cache;
    auto loops = [&](std::pair<int, int> ij) -> const std::vector<LoopResult>& {
        auto it = cache.find(ij);
        if (it == cache.end()) it = cache.emplace(ij, loop_integrals(curve, ij.first, ij.second, differentials, opt)).first;
        return it->second;
    };
    for (int col = 0; col < 2 * g; ++col) {
        const Cycle& cyc = col < g ? cycles.a[col] : cycles.b[col - g];
        for (auto ij : cyc.loops) {
            const auto& lr = loops(ij);
            for (std::size_t q = 0; q < differentials.size(); ++q) {
                res.values(static_cast<Eigen::Index>(q), col) += lr[q].value;
                res.error = std::max(res.error, lr[q].error);
            }
        }
    }
    return res;
}

// ---- bilinear relations -----------------------------------------------------

BilinearData bilinear_data(const HyperellipticCurve& curve) {
    const int n = curve.n(), g = n - 1;
    const int H = 3 * n + 6;  // series order in t = 1/a
    // u(t) = prod (1 - e_j t)^{-1/2}
    std::vector<cplx> l(H + 1, 0.0), u(H + 1, 0.0);
    for (int m = 1; m <= H; ++m) {
        cplx pm = 0;
        for (const cplx& b : curve.branch_points()) pm += std::pow(b, m);
        l[m] = 0.5 * pm / static_cast<double>(m);
    }
    u[0] = 1;
    for (int m = 1; m <= H; ++m) {
        cplx s = 0;
        for (int k = 1; k <= m; ++k) s += static_cast<double>(k) * l[k] * u[m - k];
        u[m] = s / static_cast<double>(m);
    }

    BilinearData out;
    for (int i = 0; i < g; ++i) {
        CPoly p(i + 1, 0.0);
        p[i] = 1;
        out.differentials.push_back(p);
    }
    for (int i = n; i <= 2 * n - 2; ++i) {
        CPoly p(i + 1, 0.0);
        p[i] = 1;
        p[n - 1] -= u[i - n + 1];
        out.differentials.push_back(p);
    }
    // expansion at the sheet-1 infinity: a^i da/c = -sum_m u_m t^{n-i-2+m} dt
    const int lo = -n - 1, hi = H;  // exponent window
    auto series = [&](const CPoly& p) {
        std::vector<cplx> s(hi - lo + 1, 0.0);
        for (int i = 0; i < static_cast<int>(p.size()); ++i) {
            if (p[i] == 0.0) continue;
            for (int m = 0; m <= H; ++m) {
                int ex = n - i - 2 + m;
                if (ex > hi) break;
                s[ex - lo] -= p[i] * u[m];
            }
        }
        return s;
    };
    const int D = 2 * g;
    out.residue_pairing = Mat::Zero(D, D);
    for (int a = 0; a < D; ++a) {
        auto sa = series(out.differentials[a]);
        // primitive: exponent e -> e+1
        for (int b = 0; b < D; ++b) {
            auto sb = series(out.differentials[b]);
            cplx res = 0;
            for (int ea = lo; ea <= hi; ++ea) {
                if (ea == -1 || sa[ea - lo] == 0.0) continue;
                int eb = -1 - (ea + 1);
                if (eb < lo || eb > hi) continue;
                res += sa[ea - lo] / static_cast<double>(ea + 1) * sb[eb - lo];
            }
            out.residue_pairing(a, b) = 2.0 * res;  // both points at infinity contribute equally
        }
    }
    return out;
}

CheckReport check_classical_riemann(const Mat& P, const Mat& M, int genus, double tol) {
    const Eigen::Index D = 2 * genus;
    if (genus < 0 || P.rows() != D || P.cols() != D || M.rows() != D || M.cols() != D)
        throw DomainError("incomplete period data: need 2g x 2g periods and residue pairing");
    Mat J = Mat::Zero(D, D);
    for (int k = 0; k < genus; ++k) {
        J(k, genus + k) = 1;
        J(genus + k, k) = -1;
    }
    Mat defect = P * J * P.transpose() - cplx(0, 2 * pi) * M;
    double res = D ? defect.cwiseAbs().maxCoeff() : 0.0;
    CheckReport r = make_report("hyperelliptic.riemann_bilinear", res, tol, 1);
    r.details["genus"] = genus;
    return r;
}

std::vector<std::vector<int>> enumerate_forms(int n) {
    if (n < 2) throw DomainError("enumerate_forms: n >= 2");
    const int k = n - 1, top = 2 * n - 2;
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == top - (k - 1 - i)) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// ---- classical limit --------------------------------------------------------

ClassicalLimit classical_limit_pairing(const CPoly& p, const PairingSpec& spec, int k) {
    const double nu = spec.nu;
    const int n = spec.rapidities.n();
    if (!(nu > 0 && nu <= 0.05)) throw DomainError("classical limit needs 0 < nu <= 0.05");
    if (k < 1 || k > n - 1) throw DomainError("cycle index must be in 1..n-1");
    std::vector<double> betas;
    for (const cplx& b : spec.rapidities.betas()) {
        if (std::abs(b.imag()) > 1e-14) throw DomainError("classical limit needs real rapidities");
        betas.push_back(b.real());
    }
    std::sort(betas.begin(), betas.end());
    std::vector<cplx> bp;
    for (double b : betas) bp.emplace_back(std::exp(2 * nu * b), 0.0);
    double scale = 0, sep = INFINITY;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        scale = std::max(scale, std::abs(bp[i]));
        if (i) sep = std::min(sep, std::abs(bp[i] - bp[i - 1]));
    }
    if (!std::isfinite(scale) || !(sep > 1e-6 * scale)) throw DomainError("rescaled branch points are degenerate");
    HyperellipticCurve curve(bp);

    ClassicalLimit out;
    const int r = 2 * k - 2;
    const int dp = std::max(degree(p), 0);
    CPoly upper(r + 1, 0.0);
    upper[r] = 1;
    PairingEngine engine(spec, r, dp);
    out.deformed = degree(p) < 0 ? cplx(0) : engine.pair(upper, p).value;
    PeriodOptions po;
    po.allow_meromorphic = true;
    out.classical = degree(p) < 0 ? cplx(0) : loop_integral(curve, 2 * k - 2, 2 * k - 1, p, po).value;

    const PhiKernel kernel(nu, spec.phi);
    const double xref = 1 / (2 * nu);
    out.phi_constant = kernel.reduced(xref).real() + xref / 2 + 0.5 * std::log(std::abs(2 * std::sinh(nu * xref)));
    const double astar = 0.5 * (betas[2 * k - 2] + betas[2 * k - 1]);
    double E = (1 + 2 * nu + r) * astar;
    double sum_beta = 0;
    for (double b : betas) {
        E += -(1 + nu) * (astar + b) / 2 - std::abs(astar - b) / 2;
        sum_beta += b;
    }
    double logN = 2 * n * out.phi_constant + E + (n - 2) * nu * astar + 0.5 * nu * sum_beta - std::log(2 * nu);
    // a_k = -2 int over the upper lip of p / c_up; p da / |c| carries the rest
    const cplx mid = 0.5 * (bp[2 * k - 2] + bp[2 * k - 1]);
    const cplx cup = curve.c(mid + cplx(0, 1e-9 * std::max(1.0, std::abs(mid))));
    const cplx lip = -std::abs(cup) / cup;
    out.log_scale = logN - std::log(2.0);
    out.normalization = std::exp(logN) / (2.0 * lip);
    out.gap = degree(p) < 0 ? 0.0 : std::abs(out.deformed / out.normalization - out.classical) / std::abs(out.classical);
    return out;
}

}  // namespace qkzb
