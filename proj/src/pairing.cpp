#include "qkzb/pairing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace qkzb {

namespace {

int sgn(int j) { return (j > 0) - (j < 0); }

std::int64_t binom(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

constexpr double kTailLog = 40.0;  // e^-40 relative truncation of the alpha line

// position of a label in upper_labels order
int label_pos(int label) { return label > 0 ? 2 * label - 2 : -2 * label - 1; }

Vec padded(const CPoly& p, int size) {
    if (degree(p) >= size) throw DomainError("polynomial degree outside the pairing engine budget");
    Vec v = Vec::Zero(size);
    for (int i = 0; i <= degree(p); ++i) v(i) = p[i];
    return v;
}

CPoly monomial(int deg) {
    CPoly p(deg + 1, 0.0);
    p[deg] = 1;
    return p;
}

}  // namespace

int degree(const CPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i] != cplx(0)) return i;
    return -1;
}

RapiditySet::RapiditySet(std::vector<cplx> betas) : betas_(std::move(betas)) {
    if (betas_.empty() || betas_.size() % 2) throw DomainError("need an even, nonzero number of rapidities");
    for (std::size_t i = 0; i < betas_.size(); ++i)
        for (std::size_t j = i + 1; j < betas_.size(); ++j)
            if (std::abs(betas_[i] - betas_[j]) < 1e-12) {
                std::ostringstream os;
                os << "rapidities " << i << " and " << j << " coincide (singular Gram matrix)";
                throw DomainError(os.str());
            }
}

RapiditySet RapiditySet::shifted(cplx by) const {
    std::vector<cplx> b = betas_;
    for (auto& x : b) x += by;
    return RapiditySet(std::move(b));
}

bool within_decay_budget(int deg_upper, int deg_lower, int n, double nu) {
    return deg_upper + 1 + 2 * nu * (deg_lower + 1) < 2 * n * (1 + nu);
}

PairingEngine::PairingEngine(const PairingSpec& spec, int max_deg_upper, int max_deg_lower)
    : spec_(spec), du_(max_deg_upper), dl_(max_deg_lower) {
    const double nu = spec.nu;
    const int n = spec.rapidities.n();
    if (!(nu > 0 && nu < 1)) throw DomainError("nu must lie in (0, 1)");
    if (du_ < 0 || dl_ < 0) throw DomainError("negative degree budget");
    if (!within_decay_budget(du_, dl_, n, nu)) {
        std::ostringstream os;
        os << "decay budget violated: deg P=" << du_ << ", deg p=" << dl_ << ", n=" << n << ", nu=" << nu;
        throw DomainError(os.str());
    }
    const PhiKernel kernel(nu, spec.phi);
    double lo = INFINITY, hi = -INFINITY;
    for (const cplx& b : spec.rapidities.betas()) {
        if (std::abs(b.imag()) > spec.phi.imag_bound)
            throw DomainError("rapidity outside the phi strip around the real alpha line");
        lo = std::min(lo, b.real());
        hi = std::max(hi, b.real());
    }
    // left: prod phi tends to a constant, a A supplies e^{(1+2nu) alpha};
    // right: the budget slack is the decay rate
    const double right_rate = 2 * n * (1 + nu) - (du_ + 1) - 2 * nu * (dl_ + 1);
    const double left = lo - kTailLog / (1 + 2 * nu) - 2;
    const double right = hi + kTailLog / right_rate + 2;
    const int panels = static_cast<int>(std::ceil((right - left) / spec.panel_width));
    std::vector<double> edges(panels + 1);
    for (int i = 0; i <= panels; ++i) edges[i] = left + (right - left) * i / panels;

    auto assemble = [&](int order) {
        const NodeSet ns = panel_nodes(edges, order);
        Mat g = Mat::Zero(du_ + 1, dl_ + 1);
        for (std::size_t i = 0; i < ns.x.size(); ++i) {
            const double x = ns.x[i];
            cplx lw = (1 + 2 * nu) * x;
            for (const cplx& b : spec.rapidities.betas()) lw += kernel.log_phi(x, b);
            for (int r = 0; r <= du_; ++r)
                for (int c = 0; c <= dl_; ++c) g(r, c) += ns.w[i] * std::exp(lw + (r + 2 * nu * c) * x);
        }
        return g;
    };
    gram_ = assemble(spec.quadrature.order);
    const Mat coarse = assemble(spec.quadrature.order / 2 + 1);
    gram_err_ = (gram_ - coarse).cwiseAbs();
}

QuadResult PairingEngine::pair(const CPoly& upper, const CPoly& lower) const {
    const int du = degree(upper), dl = degree(lower);
    if (du < 0 || dl < 0) return {0, 0, 0, true};
    if (du > du_ || dl > dl_) throw DomainError("polynomial degree outside the pairing engine budget");
    cplx v = 0;
    double err = 0;
    for (int r = 0; r <= du; ++r)
        for (int c = 0; c <= dl; ++c) {
            v += upper[r] * gram_(r, c) * lower[c];
            err += std::abs(upper[r] * lower[c]) * gram_err_(r, c);
        }
    const bool ok = err <= spec_.quadrature.tol * std::max(1.0, std::abs(v));
    if (!ok && spec_.quadrature.throw_on_failure) throw ConvergenceError("pairing quadrature", err);
    return {v, err, static_cast<int>(gram_.size()), ok};
}

QuadResult pairing(const CPoly& upper, const CPoly& lower, const PairingSpec& spec) {
    const int du = degree(upper), dl = degree(lower);
    if (du < 0 || dl < 0) return {0, 0, 0, true};
    return PairingEngine(spec, du, dl).pair(upper, lower);
}

std::vector<int> upper_labels(int n) {
    std::vector<int> l;
    for (int k = 1; k < n; ++k) {
        l.push_back(k);
        l.push_back(-k);
    }
    return l;
}

const CPoly& PolyBasisPair::S(int k) const {
    if (k == 0 || std::abs(k) >= n) throw DomainError("upper basis label out of range");
    return upper.at(label_pos(k));
}

CPoly& PolyBasisPair::S(int k) {
    if (k == 0 || std::abs(k) >= n) throw DomainError("upper basis label out of range");
    return upper.at(label_pos(k));
}

void validate_degrees(const PolyBasisPair& b) {
    if (static_cast<int>(b.lower.size()) != 2 * b.n - 1 || static_cast<int>(b.upper.size()) != 2 * b.n - 2)
        throw DomainError("basis sizes do not match n");
    for (int j = 1 - b.n; j < b.n; ++j)
        if (degree(b.s(j)) != j + b.n - 1) throw DomainError("lower basis polynomial has the wrong degree");
    for (int k = 1; k < b.n; ++k)
        if (degree(b.S(k)) != 2 * k - 2 || degree(b.S(-k)) != 2 * k - 1)
            throw DomainError("upper basis polynomial has the wrong degree");
}

namespace {

Mat symplectic_unit(int n) {
    const auto labels = upper_labels(n);
    const auto m = static_cast<Eigen::Index>(labels.size());
    Mat j = Mat::Zero(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            if (labels[a] == -labels[b]) j(a, b) = sgn(labels[a]);
    return j;
}

}  // namespace

PolyBasisPair build_bases(const PairingEngine& engine, BuildDiagnostics* diag) {
    const int n = engine.spec().rapidities.n();
    PolyBasisPair out{n, {}, {}};
    for (int j = 1 - n; j < n; ++j) out.lower.push_back(monomial(j + n - 1));
    if (n == 1) return out;
    const int m = 2 * n - 2;
    if (engine.max_deg_upper() < m - 1 || engine.max_deg_lower() < m)
        throw DomainError("pairing engine degree budget too small for the bases");

    const auto labels = upper_labels(n);
    const Mat& g = engine.monomial_gram();
    Mat gs(m, m);
    for (int r = 0; r < m; ++r)
        for (int b = 0; b < m; ++b) gs(r, b) = g(r, labels[b] + n - 1);
    const Mat q = gs * symplectic_unit(n) * gs.transpose();
    auto form = [&](const Vec& x, const Vec& y) -> cplx { return (x.transpose() * q * y)(0, 0); };

    const Eigen::JacobiSVD<Mat> svd(gs);
    const auto& sv = svd.singularValues();
    const double scale = q.cwiseAbs().maxCoeff();
    std::vector<Vec> up(m);
    double min_pivot = INFINITY;
    auto reduce = [&](Vec v, int pairs) {
        for (int l = 0; l < pairs; ++l) {
            const Vec& a = up[2 * l];
            const Vec& b = up[2 * l + 1];
            const cplx wa = form(v, a), wb = form(v, b);
            v = v - wb * a + wa * b;
        }
        return v;
    };
    for (int k = 1; k < n; ++k) {
        Vec e = reduce(Vec::Unit(m, 2 * k - 2), k - 1);
        Vec f = reduce(Vec::Unit(m, 2 * k - 1), k - 1);
        // second pass against rounding in the projections
        e = reduce(e, k - 1);
        f = reduce(f, k - 1);
        const cplx piv = form(e, f);
        min_pivot = std::min(min_pivot, std::abs(piv));
        if (!(std::abs(piv) > 1e-13 * scale)) {
            std::ostringstream os;
            os << "singular Gram matrix at pair " << k << ": pivot " << std::abs(piv) << ", condition "
               << sv(0) / sv(m - 1);
            throw DomainError(os.str());
        }
        up[2 * k - 2] = e;
        up[2 * k - 1] = f / piv;
    }
    for (const Vec& v : up) {
        CPoly p(v.data(), v.data() + v.size());
        p.resize(degree(p) + 1);
        out.upper.push_back(std::move(p));
    }
    if (diag) {
        diag->gram_condition = sv(0) / sv(m - 1);
        diag->min_pivot = min_pivot;
    }
    validate_degrees(out);
    return out;
}

PolyBasisPair build_bases(int n, const PairingSpec& spec, BuildDiagnostics* diag) {
    if (spec.rapidities.n() != n) throw DomainError("rapidity count does not match n");
    if (n < 1) throw DomainError("n must be positive");
    if (n == 1) return build_bases(PairingEngine(spec, 0, 0), diag);
    return build_bases(PairingEngine(spec, 2 * n - 3, 2 * n - 2), diag);
}

Mat pairing_matrix(const PolyBasisPair& bases, const PairingEngine& engine) {
    const int n = bases.n;
    const auto labels = upper_labels(n);
    const int m = 2 * n - 2;
    const Mat& g = engine.monomial_gram();
    Mat u(m, g.rows()), l(g.cols(), m);
    for (int a = 0; a < m; ++a) {
        u.row(a) = padded(bases.upper[a], static_cast<int>(g.rows())).transpose();
        l.col(a) = padded(bases.s(labels[a]), static_cast<int>(g.cols()));
    }
    return u * g * l;
}

Vec pairing_s0(const PolyBasisPair& bases, const PairingEngine& engine) {
    const Mat& g = engine.monomial_gram();
    const Vec s0 = padded(bases.s(0), static_cast<int>(g.cols()));
    Vec out(bases.upper.size());
    for (std::size_t a = 0; a < bases.upper.size(); ++a)
        out(a) = (padded(bases.upper[a], static_cast<int>(g.rows())).transpose() * g * s0)(0, 0);
    return out;
}

CheckReport check_deformed_riemann(const PolyBasisPair& bases, const PairingEngine& engine, double tol) {
    validate_degrees(bases);
    const int n = bases.n;
    if (n == 1) return make_report("deformed_riemann", 0, tol, 0);
    const Mat v = pairing_matrix(bases, engine);
    const Mat j = symplectic_unit(n);
    const Mat r1 = v.transpose() * j * v - j;
    const Mat r2 = v * j * v.transpose() - j;
    const double e1 = r1.cwiseAbs().maxCoeff(), e2 = r2.cwiseAbs().maxCoeff();
    CheckReport rep = make_report("deformed_riemann", std::max(e1, e2), tol, static_cast<int>(2 * v.size()));
    rep.details["relation_sum_over_upper"] = e1;
    rep.details["relation_sum_over_lower"] = e2;
    // s_0 is not part of the symplectic pairing; report how far its row is from zero
    const Vec s0 = pairing_s0(bases, engine);
    rep.details["s0_row"] = (s0.transpose() * j * v).cwiseAbs().maxCoeff();
    rep.details["n"] = n;
    return rep;
}

// ---- wedges -----------------------------------------------------------------

int period_dimension(int n) {
    if (n < 1) throw DomainError("n must be positive");
    if (n == 1) return 0;
    return static_cast<int>(binom(2 * n - 2, n - 1) - binom(2 * n - 2, n - 3));
}

std::vector<unsigned> index_sets(int n) {
    const int m = 2 * n - 2;
    if (m > 24) throw DomainError("too many labels for index sets");
    std::vector<unsigned> sets;
    for (unsigned s = 0; s < (1u << m); ++s)
        if (std::popcount(s) == n - 1) sets.push_back(s);
    return sets;
}

Eigen::MatrixXd irreducible_basis(int n) {
    const auto sets = index_sets(n);
    const auto cols = static_cast<Eigen::Index>(sets.size());
    if (n < 3) return Eigen::MatrixXd::Identity(cols, cols);  // nothing to contract
    std::vector<unsigned> smaller;
    for (unsigned s = 0; s < (1u << (2 * n - 2)); ++s)
        if (std::popcount(s) == n - 3) smaller.push_back(s);
    // pair k occupies adjacent positions, so no reordering sign appears
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(smaller.size()), cols);
    for (std::size_t r = 0; r < smaller.size(); ++r)
        for (int k = 0; k < n - 1; ++k) {
            const unsigned pair = 3u << (2 * k);
            if (smaller[r] & pair) continue;
            const auto it = std::find(sets.begin(), sets.end(), smaller[r] | pair);
            c(static_cast<Eigen::Index>(r), it - sets.begin()) = 1;
        }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10) ++rank;
    Eigen::MatrixXd e = svd.matrixV().rightCols(cols - rank);
    if (e.cols() != period_dimension(n)) throw ConvergenceError("contraction kernel has the wrong dimension", 0);
    return e;
}

Mat wedge_matrix(const Mat& v, int n) {
    const auto sets = index_sets(n);
    const int k = n - 1;
    const auto dim = static_cast<Eigen::Index>(sets.size());
    Mat w(dim, dim);
    auto positions = [](unsigned s) {
        std::vector<int> p;
        for (int i = 0; s; ++i, s >>= 1)
            if (s & 1) p.push_back(i);
        return p;
    };
    for (Eigen::Index a = 0; a < dim; ++a) {
        const auto ra = positions(sets[a]);
        for (Eigen::Index b = 0; b < dim; ++b) {
            const auto cb = positions(sets[b]);
            Mat sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = v(ra[i], cb[j]);
            w(a, b) = k == 0 ? cplx(1) : sub.determinant();
        }
    }
    return w;
}

PeriodMatrix period_matrix_from(const Mat& v, int n) {
    if (n == 1) return {1, Mat(0, 0)};
    const Eigen::MatrixXcd e = irreducible_basis(n).cast<cplx>();
    return {n, e.transpose() * wedge_matrix(v, n).transpose() * e};
}

PeriodMatrix period_matrix(const PolyBasisPair& bases, const PairingEngine& engine) {
    validate_degrees(bases);
    if (bases.n == 1) return {1, Mat(0, 0)};
    return period_matrix_from(pairing_matrix(bases, engine), bases.n);
}

Mat dagger_matrix(const Mat& v, int n) {
    const auto labels = upper_labels(n);
    const auto m = static_cast<Eigen::Index>(labels.size());
    Mat d(m, m);
    // <S^i | s_j^dagger> = sgn(i) sgn(j) <S_{-i} | s_{-j}>
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            d(a, b) = double(sgn(labels[a]) * sgn(labels[b])) * v(label_pos(-labels[a]), label_pos(-labels[b]));
    return d;
}

PeriodMatrix invert_period(const PolyBasisPair& bases, const PairingEngine& engine, double tol) {
    if (bases.n == 1) return {1, Mat(0, 0)};
    const CheckReport rel = check_deformed_riemann(bases, engine, tol);
    if (!rel.passed) throw ConvergenceError("deformed Riemann relations not certified", rel.residual);
    const Mat v = pairing_matrix(bases, engine);
    const Eigen::MatrixXcd e = irreducible_basis(bases.n).cast<cplx>();
    return {bases.n, e.transpose() * wedge_matrix(dagger_matrix(v, bases.n), bases.n) * e};
}

}  // namespace qkzb
