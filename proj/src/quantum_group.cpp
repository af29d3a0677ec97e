#include "qkzb/quantum_group.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qkzb {

using std::numbers::pi;
namespace {
const cplx I{0, 1};

std::int64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace

std::string to_string(QConvention c) {
    switch (c) {
        case QConvention::ExpForm: return "exp(2 pi i (nu+1))";
        case QConvention::HalfAngle: return "exp(i pi nu)";
        case QConvention::Reduced: return "exp(2 pi i nu)";
        case QConvention::Conjugate: return "exp(-2 pi i nu)";
    }
    return "?";
}

cplx q_quarter(const Anisotropy& an, QConvention c) {
    const double nu = an.nu();
    switch (c) {
        case QConvention::ExpForm: return an.q_pow(0.25);
        case QConvention::HalfAngle: return std::exp(I * pi * nu / 4.0);
        case QConvention::Reduced: return std::exp(I * pi * nu / 2.0);
        case QConvention::Conjugate: return std::exp(-I * pi * nu / 2.0);
    }
    throw DomainError("unknown q convention");
}

cplx q_value(const Anisotropy& an, QConvention c) {
    switch (c) {
        case QConvention::ExpForm: return an.q();
        case QConvention::HalfAngle: return std::exp(I * pi * an.nu());
        case QConvention::Reduced: return std::exp(2.0 * I * pi * an.nu());
        case QConvention::Conjugate: return std::exp(-2.0 * I * pi * an.nu());
    }
    throw DomainError("unknown q convention");
}

QGGenerators build_generators(int sites, cplx qq) {
    const auto dim = static_cast<Eigen::Index>(chain_dim(sites));
    // Every term is diagonal dressing times a single flip, so build entrywise.
    Mat s3 = Mat::Zero(dim, dim), sp = Mat::Zero(dim, dim), sm = Mat::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        int mag = 0;
        for (int k = 1; k <= sites; ++k) mag += ((col >> (sites - k)) & 1) ? -1 : 1;
        s3(col, col) = mag;
        for (int k = 1; k <= sites; ++k) {
            const int bit = sites - k;
            const bool down = (col >> bit) & 1;
            const Eigen::Index row = col ^ (Eigen::Index{1} << bit);
            // dressing evaluated on the spins of sites != k, which the flip leaves alone
            cplx dress = 1;
            for (int j = 1; j <= sites; ++j) {
                if (j == k) continue;
                const int s = ((col >> (sites - j)) & 1) ? -1 : 1;
                const int e = (j < k) ? -s : s;  // q^{-s3/4} left of k, q^{s3/4} right
                dress *= (e > 0) ? qq : 1.0 / qq;
            }
            if (down) sp(row, col) = dress;
            else sm(row, col) = dress;
        }
    }
    return {ChainOperator(sites, std::move(s3)), ChainOperator(sites, std::move(sp)),
            ChainOperator(sites, std::move(sm)), qq, sites};
}

QGGenerators build_generators(int sites, const Anisotropy& an, QConvention c) {
    return build_generators(sites, q_quarter(an, c));
}

cplx default_boundary_coeff(double delta) { return I * std::sqrt(1 - delta * delta); }

namespace {

ChainOperator bond_sum(int sites, double delta, bool periodic) {
    ChainOperator h = ChainOperator::zero(sites);
    const int last = periodic ? sites : sites - 1;
    const Mat4 bond = kron(pauli::sigma1(), pauli::sigma1()) + kron(pauli::sigma2(), pauli::sigma2()) +
                      delta * kron(pauli::sigma3(), pauli::sigma3());
    for (int k = 1; k <= last; ++k) {
        const int next = (k == sites) ? 1 : k + 1;
        h = h + embed_pair(bond, k, next, sites);
    }
    return h;
}

}  // namespace

ChainOperator build_hxxz(const HamiltonianSpec& spec) {
    if (spec.boundary != Boundary::Periodic)
        throw DomainError("build_hxxz needs a periodic spec; use build_hrxxz");
    if (spec.sites < 2) throw DomainError("chain needs at least two sites");
    if (spec.sites == 2) {
        // sigma_3 = sigma_1: both bonds couple the same pair
        return bond_sum(2, spec.delta, false) * cplx(2);
    }
    return bond_sum(spec.sites, spec.delta, true);
}

ChainOperator build_hrxxz(const HamiltonianSpec& spec) {
    if (spec.boundary != Boundary::OpenWithBoundaryTerm)
        throw DomainError("build_hrxxz needs an open spec");
    if (spec.sites < 2) throw DomainError("chain needs at least two sites");
    const int n = spec.sites;
    return bond_sum(n, spec.delta, false) +
           (embed(pauli::sigma3(), 1, n) - embed(pauli::sigma3(), n, n)) * spec.boundary_coeff;
}

ChainOperator build_hamiltonian(const HamiltonianSpec& spec) {
    return spec.boundary == Boundary::Periodic ? build_hxxz(spec) : build_hrxxz(spec);
}

std::vector<BoundaryCandidate> default_boundary_candidates(const Anisotropy& an) {
    const double d = an.delta();
    std::vector<BoundaryCandidate> c{
        {"i*sqrt(1-delta)", I * std::sqrt(1 - d)},
        {"i*sqrt(1-delta^2)", I * std::sqrt(1 - d * d)},
        {"-i*sqrt(1-delta^2)", -I * std::sqrt(1 - d * d)},
    };
    for (QConvention qc : {QConvention::ExpForm, QConvention::HalfAngle, QConvention::Reduced,
                           QConvention::Conjugate}) {
        const cplx q = q_value(an, qc);
        c.push_back({"(q-1/q)/2, q=" + to_string(qc), (q - 1.0 / q) / 2.0});
    }
    return c;
}

CalibrationReport calibrate_invariance(int sites, const Anisotropy& an,
                                       const std::vector<BoundaryCandidate>& candidates,
                                       const std::vector<QConvention>& conventions, double tol) {
    if (sites < 2 || sites > 6) throw DomainError("calibration runs on 2..6 sites");
    CalibrationReport rep{sites, an.nu(), tol, {}, false};
    for (QConvention qc : conventions) {
        const QGGenerators g = build_generators(sites, an, qc);
        for (const auto& cand : candidates) {
            const ChainOperator h = build_hrxxz(
                {sites, an.delta(), Boundary::OpenWithBoundaryTerm, cand.coeff});
            CalibrationEntry e{cand.label,
                               cand.coeff,
                               qc,
                               max_abs(commutator(h, g.splus).matrix()),
                               max_abs(commutator(h, g.sminus).matrix()),
                               max_abs(commutator(h, g.s3).matrix()),
                               false};
            e.commutes = std::max({e.splus_residual, e.sminus_residual, e.s3_residual}) <= tol;
            rep.passed = rep.passed || e.commutes;
            rep.entries.push_back(e);
        }
    }
    return rep;
}

CalibrationReport calibrate_invariance(int sites, const Anisotropy& an, double tol) {
    return calibrate_invariance(sites, an, default_boundary_candidates(an),
                                {QConvention::ExpForm, QConvention::HalfAngle, QConvention::Reduced,
                                 QConvention::Conjugate},
                                tol);
}

json CalibrationReport::to_json() const {
    json j{{"sites", sites}, {"nu", nu}, {"tolerance", tol}, {"passed", passed}};
    json list = json::array();
    for (const auto& e : entries)
        list.push_back({{"coefficient", e.coeff_label},
                        {"coefficient_value", {e.coeff.real(), e.coeff.imag()}},
                        {"q_convention", to_string(e.convention)},
                        {"splus_residual", e.splus_residual},
                        {"sminus_residual", e.sminus_residual},
                        {"s3_residual", e.s3_residual},
                        {"commutes", e.commutes}});
    j["candidates"] = list;
    return j;
}

std::vector<cplx> spectrum(const ChainOperator& h) {
    Eigen::ComplexEigenSolver<Mat> es(h.matrix(), false);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed", 0);
    std::vector<cplx> ev(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

std::vector<int> degeneracies(const std::vector<cplx>& eigs, double tol) {
    // cluster greedily on the real-sorted list; fine for well-separated levels
    std::vector<int> sizes;
    std::vector<bool> used(eigs.size(), false);
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        if (used[i]) continue;
        int n = 0;
        for (std::size_t j = i; j < eigs.size(); ++j)
            if (!used[j] && std::abs(eigs[j] - eigs[i]) <= tol) {
                used[j] = true;
                ++n;
            }
        sizes.push_back(n);
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

std::vector<int> expected_multiplets(int sites) {
    std::vector<int> sizes;
    for (int twice_j = sites % 2; twice_j <= sites; twice_j += 2) {
        const int k = (sites - twice_j) / 2;
        const auto mult = binom(sites, k) - binom(sites, k - 1);
        for (std::int64_t m = 0; m < mult; ++m) sizes.push_back(twice_j + 1);
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

}  // namespace qkzb
