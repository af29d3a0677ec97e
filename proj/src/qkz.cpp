#include "qkzb/qkz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "qkzb/quadrature.hpp"
#include "qkzb/special.hpp"

namespace qkzb {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0, 1};

std::int64_t binom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

bool spin_down(Eigen::Index idx, int site, int sites) { return (idx >> (sites - site)) & 1; }

void check_two_site_nu(double nu) {
    if (!(nu > 0 && nu < 0.5)) throw DomainError("the two-site solution needs 0 < nu < 1/2");
}

// log of S(k) = (K + K2)/(2 sinh pi k) + 4/(e^{2 pi k} - 1), with K the xxz
// kernel and K2 = -2 sinh(pi k (1-2nu)/(2nu)) / sinh(pi k/(2nu)). Written in
// t = e^{-pi k} with the cancelling e^{-2 pi k} terms removed by hand, so it
// stays accurate when the cos factor grows like e^{k |Im x|}.
double log_rest_weight(double k, double nu) {
    const double a = pi * k;
    const double p = (1 - nu) / nu, r = (1 - 2 * nu) / nu;
    const double e0 = std::min(1.0, r);
    const double t = std::exp(-a);
    const double inv = -1 / std::expm1(-a / nu);  // 1/(1 - t^{1/nu})
    const double inner = 2 - (t + std::exp(-p * a)) / (1 + t) - std::exp(-r * a);
    const double b = 2 * (std::exp(-(1 - e0) * a) + std::exp(-(p - e0) * a)) / (1 + t) +
                     2 * std::exp(-(r - e0) * a) - 2 * std::exp(-(1 / nu - e0) * a) * inv * inner;
    return -(2 + e0) * a + std::log(b) - std::log(-std::expm1(-2 * a));
}

// Rest(x) = int_0^inf S(k) (1 - cos kx)/k dk, x = beta + pi i.
cplx rest_integral(cplx x, double nu) {
    const double margin = two_site_strip(nu) - std::abs(x.imag());
    if (margin < 0.3) {
        std::ostringstream os;
        os << "two-site scalar: |Im(beta + pi i)| = " << std::abs(x.imag()) << " too close to the strip edge "
           << two_site_strip(nu);
        throw DomainError(os.str());
    }
    const double cutoff = 40 / margin;
    auto f = [=](double k) -> cplx {
        if (k < 1e-12) return (5 * nu + 1) / (2 * pi) * x * x / 2.0;
        const double ls = log_rest_weight(k, nu);
        if (std::abs(x.imag()) * k < 30) {
            const cplx s = std::sin(k * x / 2.0);
            return std::exp(ls) * 2.0 * s * s / k;
        }
        return (std::exp(ls) - 0.5 * (std::exp(I * k * x + ls) + std::exp(-I * k * x + ls))) / k;
    };
    std::vector<double> edges;
    for (double e = 0; e < cutoff; e += 0.5) edges.push_back(e);
    edges.push_back(cutoff);
    const QuadResult q = gauss_panels(f, edges, 20);
    if (q.error > 1e-12 * std::max(1.0, std::abs(q.value)))
        throw ConvergenceError("two-site scalar integral did not converge", q.error);
    return q.value;
}

// Component-wise multiplier on one site: up gets `up`, down gets `down`.
void scale_site(Vec& v, int site, int sites, cplx up, cplx down) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= spin_down(i, site, sites) ? down : up;
}

// (C v)^{e_first .. e_last} = v^{e_last e_first .. e_{last-1}} on the block
// of `len` sites starting at `first`.
Vec rotate_block(const Vec& v, int first, int len, int sites) {
    Vec out(v.size());
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        Eigen::Index src = idx;
        for (int i = 0; i < len; ++i) {
            const int from = first + (i + len - 1) % len;  // spin of the result at this site
            const int to = first + i;                      // position in the source
            const Eigen::Index bit_to = Eigen::Index{1} << (sites - to);
            src = spin_down(idx, from, sites) ? (src | bit_to) : (src & ~bit_to);
        }
        out(idx) = v(src);
    }
    return out;
}

// s on the adjacent pair (a, a+1) tensored with `lower` on the remaining sites.
Vec insert_pair(const Vec& s, int a, const Vec& lower, int sites) {
    Vec out(Eigen::Index{1} << sites);
    for (Eigen::Index idx = 0; idx < out.size(); ++idx) {
        const int pair = (spin_down(idx, a, sites) ? 2 : 0) + (spin_down(idx, a + 1, sites) ? 1 : 0);
        Eigen::Index low = 0;
        for (int site = 1; site <= sites; ++site) {
            if (site == a || site == a + 1) continue;
            low = (low << 1) | (spin_down(idx, site, sites) ? 1 : 0);
        }
        out(idx) = s(pair) * lower(low);
    }
    return out;
}

QkzPoint with_beta(QkzPoint p, int idx, cplx value) {
    p.betas.at(idx) = value;
    return p;
}

QkzPoint with_theta(QkzPoint p, int idx, cplx value) {
    p.thetas.at(idx) = value;
    return p;
}

void require_continuation(const CandidateSolution& c) {
    if (c.continuation == Continuation::Refuse)
        throw DomainError("candidate '" + c.name + "' refuses continuation to the 2 pi i shifted point");
}

const CandidateSolution& require_lower(const std::shared_ptr<const CandidateSolution>& l,
                                       const CandidateSolution& c) {
    if (!l) throw DomainError("candidate '" + c.name + "' has no lower-size candidate");
    return *l;
}

void require_hatted(const CandidateSolution& c) {
    if (c.level != QkzLevel::Minus4 && c.gauge != QkzGauge::Hatted)
        throw DomainError("level-0 and mixed equations are stated for the hatted gauge only");
}

}  // namespace

std::string to_string(QkzLevel l) {
    switch (l) {
        case QkzLevel::Minus4: return "level-4";
        case QkzLevel::Zero: return "level0";
        case QkzLevel::Mixed: return "mixed";
    }
    return "?";
}

std::string to_string(QkzGauge g) { return g == QkzGauge::Plain ? "plain" : "hatted"; }

Vec CandidateSolution::operator()(const QkzPoint& p) const {
    if (static_cast<int>(p.betas.size()) != 2 * n || static_cast<int>(p.thetas.size()) != 2 * m) {
        std::ostringstream os;
        os << "candidate '" << name << "' takes " << 2 * n << " betas and " << 2 * m << " thetas";
        throw DomainError(os.str());
    }
    Vec v = evaluator(p);
    if (v.size() != (Eigen::Index{1} << sites())) throw DomainError("candidate '" + name + "' returned the wrong dimension");
    return v;
}

// ---- singlets ---------------------------------------------------------------

SingletVector SingletVector::hatted(const Anisotropy& an) {
    Vec s = Vec::Zero(4);
    s(1) = an.q_pow(0.25);
    s(2) = -an.q_pow(-0.25);
    return {s};
}

SingletVector SingletVector::hatted_dual(const Anisotropy& an) {
    Vec s = Vec::Zero(4);
    s(1) = an.qtilde_pow(0.25);
    s(2) = -an.qtilde_pow(-0.25);
    return {s};
}

SingletVector SingletVector::plain() {
    Vec s = Vec::Zero(4);
    s(1) = s(2) = 1;
    return {s};
}

double singlet_residual(const SingletVector& s, const Anisotropy& an, QConvention c) {
    const QGGenerators g = build_generators(2, an, c);
    return std::max((g.splus.matrix() * s.components).cwiseAbs().maxCoeff(),
                    (g.sminus.matrix() * s.components).cwiseAbs().maxCoeff());
}

int singlet_count(int n) { return static_cast<int>(binom(2 * n, n) - binom(2 * n, n - 1)); }

ChainOperator singlet_projector(int n, const Anisotropy& an, QConvention c) {
    if (n < 1) throw DomainError("singlet projector needs n >= 1");
    const int sites = 2 * n;
    const QGGenerators g = build_generators(sites, an, c);
    const Mat& sp = g.splus.matrix();
    const Mat& sm = g.sminus.matrix();
    const Eigen::Index dim = sp.rows();
    // singlets have zero magnetization
    std::vector<Eigen::Index> zero;
    for (Eigen::Index i = 0; i < dim; ++i)
        if (std::abs(g.s3.matrix()(i, i)) < 0.5) zero.push_back(i);
    const auto nz = static_cast<Eigen::Index>(zero.size());
    Mat right(2 * dim, nz), left(2 * dim, nz);
    for (Eigen::Index j = 0; j < nz; ++j) {
        right.col(j) << sp.col(zero[j]), sm.col(zero[j]);
        left.col(j) << sp.row(zero[j]).transpose(), sm.row(zero[j]).transpose();
    }
    auto kernel = [](const Mat& m) {
        Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-9 * sv(0)) ++rank;
        return Mat(svd.matrixV().rightCols(m.cols() - rank));
    };
    const Mat v = kernel(right), w = kernel(left);
    const int expected = singlet_count(n);
    if (v.cols() != expected || w.cols() != expected) {
        std::ostringstream os;
        os << "singlet projector: kernel ranks " << v.cols() << "/" << w.cols() << ", expected " << expected
           << " (generator convention inconsistent with the singlet count)";
        throw DomainError(os.str());
    }
    const Mat core = v * (w.transpose() * v).inverse() * w.transpose();
    Mat pi_full = Mat::Zero(dim, dim);
    for (Eigen::Index a = 0; a < nz; ++a)
        for (Eigen::Index b = 0; b < nz; ++b) pi_full(zero[a], zero[b]) = core(a, b);
    return ChainOperator(sites, std::move(pi_full));
}

// ---- exchange ---------------------------------------------------------------

Vec apply_pair(const Mat4& op, int a, int b, int sites, const Vec& v) {
    if (a == b || a < 1 || b < 1 || a > sites || b > sites) throw DomainError("apply_pair: bad slot pair");
    const Eigen::Index ba = Eigen::Index{1} << (sites - a), bb = Eigen::Index{1} << (sites - b);
    Vec out = Vec::Zero(v.size());
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        if (idx & (ba | bb)) continue;  // visit each block once, from its up-up member
        Eigen::Index members[4] = {idx, idx | bb, idx | ba, idx | ba | bb};
        for (int r = 0; r < 4; ++r) {
            cplx acc = 0;
            for (int col = 0; col < 4; ++col) acc += op(r, col) * v(members[col]);
            out(members[r]) = acc;
        }
    }
    return out;
}

Mat4 exchange_matrix(QkzLevel level, QkzGauge gauge, const QkzPoint& p, int j, bool theta_slot, double nu,
                     const R0Options& opt) {
    const std::vector<cplx>& x = theta_slot ? p.thetas : p.betas;
    if (j < 1 || j >= static_cast<int>(x.size())) throw DomainError("exchange index out of range");
    const Anisotropy an(nu);
    const cplx a = x[j - 1], b = x[j];
    Mat4 m;
    if (theta_slot) {
        if (level != QkzLevel::Mixed) throw DomainError("theta exchange exists only in the mixed system");
        m = gauge_s(a, b, an, opt);
    } else if (gauge == QkzGauge::Plain) {
        if (level != QkzLevel::Minus4) throw DomainError("level-0 and mixed equations are stated for the hatted gauge only");
        m = r_matrix(a - b, an, opt).entries;
    } else {
        m = gauge_r(a, b, an, opt);
    }
    return m * permutation4();
}

double residual_exchange(const CandidateSolution& c, int j, const QkzPoint& p, const QkzOptions& opt) {
    require_hatted(c);
    const Mat4 x = exchange_matrix(c.level, c.gauge, p, j, false, c.nu, opt.r0);
    QkzPoint sw = p;
    std::swap(sw.betas.at(j - 1), sw.betas.at(j));
    if (c.level == QkzLevel::Zero) return (c(sw) - apply_pair(x.transpose(), j, j + 1, c.sites(), c(p))).norm();
    return (c(p) - apply_pair(x, j, j + 1, c.sites(), c(sw))).norm();
}

double residual_exchange_theta(const CandidateSolution& c, int j, const QkzPoint& p, const QkzOptions& opt) {
    const Mat4 x = exchange_matrix(c.level, c.gauge, p, j, true, c.nu, opt.r0);
    require_hatted(c);
    QkzPoint sw = p;
    std::swap(sw.thetas.at(j - 1), sw.thetas.at(j));
    const int a = 2 * c.n + j;
    return (c(sw) - apply_pair(x.transpose(), a, a + 1, c.sites(), c(p))).norm();
}

// ---- shift ------------------------------------------------------------------

double residual_shift(const CandidateSolution& c, const QkzPoint& p, const QkzOptions& opt) {
    require_hatted(c);
    require_continuation(c);
    const Anisotropy an(c.nu);
    const int last = 2 * c.n;
    if (last < 2) throw DomainError("shift needs at least two beta slots");
    const Vec lhs = c(with_beta(p, last - 1, p.betas[last - 1] + 2 * pi * I));
    QkzPoint rot = p;
    std::rotate(rot.betas.begin(), rot.betas.end() - 1, rot.betas.end());
    Vec rhs = rotate_block(c(rot), 1, last, c.sites());
    const bool printed = opt.reading == Reading::Printed;
    cplx up = 1, down = 1;  // twist on the last beta slot
    switch (c.level) {
        case QkzLevel::Minus4:
            if (c.gauge == QkzGauge::Plain) {
                if (!printed) up = an.q_pow(-1), down = an.q_pow(1);
            } else {
                up = -an.q_pow(-0.5), down = -an.q_pow(0.5);
            }
            break;
        case QkzLevel::Zero:
            up = -an.q_pow(-0.5), down = -an.q_pow(0.5);
            break;
        case QkzLevel::Mixed: {
            cplx t = 1;
            for (cplx th : p.thetas) t *= std::tanh(0.5 * (p.betas[last - 1] - th + pi * I / 2.0));
            const double e = printed ? 0.5 : -0.5;
            up = -t * an.q_pow(e), down = -t * an.q_pow(-e);
            break;
        }
    }
    scale_site(rhs, last, c.sites(), up, down);
    return (lhs - rhs).norm();
}

double residual_shift_theta(const CandidateSolution& c, const QkzPoint& p, const QkzOptions& opt) {
    if (c.level != QkzLevel::Mixed || c.m < 1) throw DomainError("theta shift exists only in the mixed system");
    require_hatted(c);
    require_continuation(c);
    const Anisotropy an(c.nu);
    const int last = 2 * c.m;
    const Vec lhs = c(with_theta(p, last - 1, p.thetas[last - 1] + 2 * pi * I));
    QkzPoint rot = p;
    std::rotate(rot.thetas.begin(), rot.thetas.end() - 1, rot.thetas.end());
    Vec rhs = rotate_block(c(rot), 2 * c.n + 1, last, c.sites());
    cplx t = 1;
    for (cplx b : p.betas) t *= std::tanh(0.5 * (p.thetas[last - 1] - b + pi * I / 2.0));
    cplx up, down;
    if (opt.reading == Reading::Printed) up = an.q_pow(-0.5), down = an.q_pow(0.5);
    else up = an.qtilde_pow(-0.5), down = an.qtilde_pow(0.5);
    scale_site(rhs, c.sites(), c.sites(), -t * up, -t * down);
    return (lhs - rhs).norm();
}

// ---- specialization and residues -------------------------------------------

Vec contour_residue(const CandidateSolution& c, const QkzPoint& p, int index, bool theta_slot, cplx pole,
                    const QkzOptions& opt) {
    if (opt.residue_points < 4 || !(opt.residue_radius > 0)) throw DomainError("bad residue contour");
    Vec acc = Vec::Zero(Eigen::Index{1} << c.sites());
    for (int k = 0; k < opt.residue_points; ++k) {
        const cplx e = std::exp(2 * pi * I * static_cast<double>(k) / static_cast<double>(opt.residue_points));
        const cplx z = pole + opt.residue_radius * e;
        const QkzPoint q = theta_slot ? with_theta(p, index, z) : with_beta(p, index, z);
        acc += c(q) * e;
    }
    return 2 * pi * I * acc * (opt.residue_radius / opt.residue_points);
}

double residual_specialization(const CandidateSolution& c, int j, const QkzPoint& p, const QkzOptions& opt) {
    require_hatted(c);
    const Anisotropy an(c.nu);
    const int nb = 2 * c.n;
    if (j < 1 || j >= nb) throw DomainError("specialization index out of range");
    const CandidateSolution& low = require_lower(c.lower, c);
    auto lower_point = [&](int a) {
        QkzPoint q = p;
        q.betas.erase(q.betas.begin() + (a - 1), q.betas.begin() + (a + 1));
        return q;
    };
    if (c.level == QkzLevel::Minus4) {
        const QkzPoint at = with_beta(p, j, p.betas[j - 1] - pi * I);
        Vec s;
        cplx lambda = 1;
        if (c.gauge == QkzGauge::Plain) {
            s = SingletVector::plain().components;
        } else {
            s = SingletVector::hatted(an).components;
            lambda = opt.reading == Reading::Printed ? I : -I;
        }
        const Vec rhs = lambda * insert_pair(s, j, low(lower_point(j)), c.sites());
        return (c(at) - rhs).norm();
    }
    if (j != nb - 1) throw DomainError("the residue condition is stated for the last pair only");
    const Vec s = SingletVector::hatted(an).components;
    if (c.level == QkzLevel::Mixed) {
        const QkzPoint at = with_beta(p, nb - 1, p.betas[nb - 2] + pi * I);
        return (c(at) - insert_pair(s, nb - 1, low(lower_point(nb - 1)), c.sites())).norm();
    }
    // level 0, residue form; rows act by transposes on the column components
    const cplx pole = p.betas[nb - 2] + pi * I;
    const Vec res = contour_residue(c, p, nb - 1, false, pole, opt);
    const Vec base = insert_pair(s, nb - 1, low(lower_point(nb - 1)), c.sites());
    Vec y = base;
    for (int k = 1; k <= nb - 2; ++k)
        y = apply_pair(gauge_r(p.betas[nb - 2], p.betas[k - 1], an, opt.r0).transpose(), nb - 1, k, c.sites(), y);
    return (res - (base - y)).norm();
}

double residual_specialization_theta(const CandidateSolution& c, const QkzPoint& p, const QkzOptions& opt) {
    if (c.level != QkzLevel::Mixed || c.m < 1) throw DomainError("theta residue exists only in the mixed system");
    require_hatted(c);
    const Anisotropy an(c.nu);
    const CandidateSolution& low = require_lower(c.lower_theta, c);
    const int nt = 2 * c.m, off = 2 * c.n;
    const cplx th = p.thetas[nt - 2];
    const Vec res = contour_residue(c, p, nt - 1, true, th + pi * I, opt);
    QkzPoint q = p;
    q.thetas.resize(nt - 2);
    const Vec base = insert_pair(SingletVector::hatted_dual(an).components, off + nt - 1, low(q), c.sites());
    Vec y = base;
    const Anisotropy dual = an.dual();
    for (int k = 1; k <= nt - 2; ++k)
        y = apply_pair(gauge_r(th, p.thetas[k - 1], dual, opt.r0).transpose(), off + nt - 1, off + k, c.sites(), y);
    cplx t = 1;
    for (cplx b : p.betas) t *= std::tanh(0.5 * (th - b + pi * I / 2.0));
    return (res - (base - t * y)).norm();
}

// ---- wrappers ---------------------------------------------------------------

CandidateSolution gauge_transform_solution(const CandidateSolution& c, GaugeDirection d) {
    if (c.level == QkzLevel::Zero) throw DomainError("gauge transform applies to level -4 and mixed candidates");
    CandidateSolution out = c;
    const double sign = d == GaugeDirection::Hat ? 1 : -1;
    const int sites = c.sites(), nb = 2 * c.n;
    const double nu = c.nu;
    auto inner = c.evaluator;
    out.evaluator = [inner, sign, sites, nb, nu](const QkzPoint& p) {
        Vec v = inner(p);
        for (int j = 1; j <= nb; ++j) {
            const cplx e = std::exp(sign * nu * p.betas[j - 1] / 2.0);
            scale_site(v, j, sites, e, 1.0 / e);
        }
        return v;
    };
    out.gauge = d == GaugeDirection::Hat ? QkzGauge::Hatted : QkzGauge::Plain;
    out.name = c.name + (d == GaugeDirection::Hat ? ".hat" : ".unhat");
    if (c.lower) out.lower = std::make_shared<CandidateSolution>(gauge_transform_solution(*c.lower, d));
    if (c.lower_theta)
        out.lower_theta = std::make_shared<CandidateSolution>(gauge_transform_solution(*c.lower_theta, d));
    return out;
}

CandidateSolution psi_dress(const CandidateSolution& c, bool dress) {
    if (c.level != QkzLevel::Mixed) throw DomainError("psi dressing applies to mixed candidates");
    CandidateSolution out = c;
    auto inner = c.evaluator;
    out.evaluator = [inner, dress](const QkzPoint& p) {
        cplx f = 1;
        for (cplx b : p.betas)
            for (cplx t : p.thetas) f *= psi(b, t);
        return Vec(inner(p) * (dress ? f : 1.0 / f));
    };
    out.name = c.name + (dress ? ".psi" : ".unpsi");
    if (c.lower) out.lower = std::make_shared<CandidateSolution>(psi_dress(*c.lower, dress));
    if (c.lower_theta) out.lower_theta = std::make_shared<CandidateSolution>(psi_dress(*c.lower_theta, dress));
    return out;
}

// ---- built-in candidates ----------------------------------------------------

double two_site_strip(double nu) {
    check_two_site_nu(nu);
    return 2 * pi + pi * std::min(1.0, (1 - 2 * nu) / nu);
}

cplx two_site_scalar(cplx beta, double nu) {
    check_two_site_nu(nu);
    const cplx x = beta + pi * I;
    return -x * x / 2.0 * std::exp(rest_integral(x, nu));
}

CandidateSolution unit_candidate(QkzLevel level, QkzGauge gauge, double nu) {
    CandidateSolution c;
    c.name = "unit";
    c.level = level;
    c.gauge = gauge;
    c.n = 0;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [](const QkzPoint&) { return Vec(Vec::Ones(1)); };
    return c;
}

CandidateSolution two_site_solution(double nu, QkzGauge gauge) {
    check_two_site_nu(nu);
    const Vec s = SingletVector::hatted(Anisotropy(nu)).components;
    const cplx norm = -I / two_site_scalar(pi * I, nu);
    CandidateSolution c;
    c.name = "two-site";
    c.level = QkzLevel::Minus4;
    c.gauge = QkzGauge::Hatted;
    c.n = 1;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [s, norm, nu](const QkzPoint& p) {
        return Vec(norm * two_site_scalar(p.betas[0] - p.betas[1], nu) * s);
    };
    c.lower = std::make_shared<CandidateSolution>(unit_candidate(QkzLevel::Minus4, QkzGauge::Hatted, nu));
    if (gauge == QkzGauge::Hatted) return c;
    CandidateSolution plain = gauge_transform_solution(c, GaugeDirection::Unhat);
    plain.name = "two-site-plain";
    return plain;
}

CandidateSolution two_site_level0(double nu) {
    check_two_site_nu(nu);
    const Vec s = SingletVector::hatted(Anisotropy(nu)).components;
    CandidateSolution c;
    c.name = "two-site-level0";
    c.level = QkzLevel::Zero;
    c.gauge = QkzGauge::Hatted;
    c.n = 1;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [s, nu](const QkzPoint& p) {
        const cplx b = p.betas[0] - p.betas[1];
        const cplx x = b + pi * I;
        // (cosh b + 1)/u(b); the double zero of u at b = -pi i cancels
        cplx h = std::exp(-rest_integral(x, nu));
        if (std::abs(x) > 1e-8) {
            const cplx ch = std::cosh(b / 2.0);
            h *= -4.0 * ch * ch / (x * x);
        }
        return Vec(h * s);
    };
    c.lower = std::make_shared<CandidateSolution>(unit_candidate(QkzLevel::Zero, QkzGauge::Hatted, nu));
    return c;
}

CandidateSolution constant_candidate(QkzLevel level, QkzGauge gauge, int n, double nu, Vec value,
                                     std::string name) {
    if (value.size() != (Eigen::Index{1} << (2 * n))) throw DomainError("constant candidate: wrong dimension");
    CandidateSolution c;
    c.name = std::move(name);
    c.level = level;
    c.gauge = gauge;
    c.n = n;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [value](const QkzPoint&) { return value; };
    if (n == 1) c.lower = std::make_shared<CandidateSolution>(unit_candidate(level, gauge, nu));
    return c;
}

CandidateSolution random_candidate(QkzLevel level, QkzGauge gauge, int n, double nu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Vec v(Eigen::Index{1} << (2 * n));
    for (auto& x : v) x = cplx(g(rng), g(rng));
    CandidateSolution c = constant_candidate(level, gauge, n, nu, v / v.norm(), "random");
    if (n > 1) c.lower = std::make_shared<CandidateSolution>(random_candidate(level, gauge, n - 1, nu, seed + 1));
    return c;
}

CandidateSolution mixed_product_candidate(double nu) {
    if (!(nu > 0 && nu < 1.0 / 3)) throw DomainError("mixed product candidate needs 0 < nu < 1/3");
    const double nud = Anisotropy(nu).dual().nu();
    const CandidateSolution g = two_site_solution(nu, QkzGauge::Hatted);
    const CandidateSolution f = two_site_level0(nud);
    auto gv = g.evaluator;
    auto fv = f.evaluator;
    CandidateSolution c;
    c.name = "mixed-product";
    c.level = QkzLevel::Mixed;
    c.gauge = QkzGauge::Hatted;
    c.n = 1;
    c.m = 1;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [gv, fv](const QkzPoint& p) {
        const Vec a = gv({p.betas, {}}), b = fv({p.thetas, {}});
        Vec out(a.size() * b.size());
        for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
        return out;
    };
    CandidateSolution low = c;  // no beta slots: f0 alone
    low.name = "mixed-product.lower";
    low.n = 0;
    low.evaluator = [fv](const QkzPoint& p) { return fv({p.thetas, {}}); };
    CandidateSolution low_t = c;  // no theta slots: g-hat alone
    low_t.name = "mixed-product.lower-theta";
    low_t.m = 0;
    low_t.evaluator = [gv](const QkzPoint& p) { return gv({p.betas, {}}); };
    c.lower = std::make_shared<CandidateSolution>(low);
    c.lower_theta = std::make_shared<CandidateSolution>(low_t);
    return psi_dress(c);
}

std::vector<std::string> builtin_candidate_names() {
    return {"two-site", "two-site-plain", "two-site-level0", "singlet-constant", "random", "mixed-product"};
}

CandidateSolution builtin_candidate(const std::string& name, double nu) {
    if (name == "two-site") return two_site_solution(nu, QkzGauge::Hatted);
    if (name == "two-site-plain") return two_site_solution(nu, QkzGauge::Plain);
    if (name == "two-site-level0") return two_site_level0(nu);
    if (name == "singlet-constant")
        return constant_candidate(QkzLevel::Minus4, QkzGauge::Hatted, 1, nu,
                                  -I * SingletVector::hatted(Anisotropy(nu)).components, "singlet-constant");
    if (name == "random") return random_candidate(QkzLevel::Minus4, QkzGauge::Hatted, 1, nu, 1);
    if (name == "mixed-product") return mixed_product_candidate(nu);
    throw DomainError("unknown candidate '" + name + "'");
}

// ---- reports ----------------------------------------------------------------

std::vector<CheckReport> check_candidate(const CandidateSolution& c, const QkzCheckOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    // theta offset keeping beta - theta inside the psi strip after beta + 2 pi i
    const cplx lift = c.level == QkzLevel::Mixed ? cplx(0, 1.9 * pi) : cplx(0);
    std::vector<QkzPoint> pts, lifted;
    for (int s = 0; s < opt.samples; ++s) {
        QkzPoint p;
        for (int j = 0; j < 2 * c.n; ++j) p.betas.push_back(u(rng));
        for (int j = 0; j < 2 * c.m; ++j) p.thetas.push_back(u(rng));
        QkzPoint q = p;
        for (cplx& t : q.thetas) t += lift;
        pts.push_back(p);
        lifted.push_back(q);
    }
    std::vector<CheckReport> out;
    auto run = [&](const std::string& name, const std::vector<QkzPoint>& at,
                   const std::function<double(const QkzPoint&)>& f) {
        double worst = 0;
        json err = nullptr;
        for (const QkzPoint& p : at) {
            try {
                worst = std::max(worst, f(p));
            } catch (const std::exception& e) {
                err = e.what();
                worst = std::numeric_limits<double>::infinity();
                break;
            }
        }
        CheckReport r = make_report(name, worst, opt.tol, static_cast<int>(at.size()));
        if (!err.is_null()) {
            r.passed = false;
            r.details["error"] = err;
        }
        r.details["candidate"] = c.name;
        r.details["level"] = to_string(c.level);
        r.details["gauge"] = to_string(c.gauge);
        r.details["reading"] = opt.qkz.reading == Reading::Printed ? "printed" : "consistent";
        out.push_back(r);
    };
    const int nb = 2 * c.n;
    const auto& beta_pts = c.level == QkzLevel::Mixed ? lifted : pts;
    run("qkz.exchange", beta_pts, [&](const QkzPoint& p) {
        double w = 0;
        for (int j = 1; j < nb; ++j) w = std::max(w, residual_exchange(c, j, p, opt.qkz));
        return w;
    });
    run("qkz.shift", beta_pts, [&](const QkzPoint& p) { return residual_shift(c, p, opt.qkz); });
    run(c.level == QkzLevel::Zero ? "qkz.residue" : "qkz.specialization", beta_pts, [&](const QkzPoint& p) {
        if (c.level != QkzLevel::Minus4) return residual_specialization(c, nb - 1, p, opt.qkz);
        double w = 0;
        for (int j = 1; j < nb; ++j) w = std::max(w, residual_specialization(c, j, p, opt.qkz));
        return w;
    });
    if (c.level == QkzLevel::Mixed) {
        run("qkz.exchange_theta", pts, [&](const QkzPoint& p) {
            double w = 0;
            for (int j = 1; j < 2 * c.m; ++j) w = std::max(w, residual_exchange_theta(c, j, p, opt.qkz));
            return w;
        });
        run("qkz.shift_theta", pts, [&](const QkzPoint& p) { return residual_shift_theta(c, p, opt.qkz); });
        run("qkz.residue_theta", pts,
            [&](const QkzPoint& p) { return residual_specialization_theta(c, p, opt.qkz); });
    }
    return out;
}

}  // namespace qkzb
