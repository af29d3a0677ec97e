#include "qkzb/rmatrix.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qkzb/special.hpp"

namespace qkzb {

using std::numbers::pi;
constexpr cplx I{0, 1};

Anisotropy::Anisotropy(double nu) : nu_(nu) {
    if (!(nu > 0 && nu < 1)) {
        std::ostringstream os;
        os << "coupling nu=" << nu << " outside (0,1)";
        throw DomainError(os.str());
    }
}

double Anisotropy::delta() const { return std::cos(pi * nu_); }
cplx Anisotropy::q_pow(double x) const { return std::exp(2 * pi * I * (nu_ + 1) * x); }
cplx Anisotropy::qtilde_pow(double x) const { return std::exp(2 * pi * I * x / (1 - nu_)); }
Anisotropy Anisotropy::dual() const { return Anisotropy(nu_ / (1 - nu_)); }

namespace {

// sin(beta k)/k, patched near k = 0.
cplx sinc_k(cplx beta, double k) {
    const cplx z = beta * k;
    if (std::abs(z) < 1e-3) return beta * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
    return std::sin(z) / k;
}

}  // namespace

namespace {

// Any coupling > 0. For nu > 1 the kernel decays only like e^{-pi k/nu}, which
// also narrows the strip; that case is reached through the S-matrix at nu >= 1/2.
QuadResult r0_exponent_any(cplx beta, double nu, const R0Options& opt) {
    if (!(nu > 0) || !std::isfinite(nu)) throw DomainError("R0: coupling must be positive");
    const double rate = pi * std::min(1.0, 1.0 / nu);
    const double strip = std::min(opt.strip, rate);
    if (std::abs(beta.imag()) >= strip) {
        std::ostringstream os;
        os << "R0 integral diverges: |Im beta|=" << std::abs(beta.imag()) << " >= " << strip;
        throw DomainError(os.str());
    }
    // Integrand decays like e^{-(rate-|Im beta|)k}.
    double cutoff = opt.quad.cutoff;
    if (cutoff <= 0) cutoff = 40.0 / (rate - std::abs(beta.imag()));
    auto f = [=](double k) { return sinc_k(beta, k) * xxz_kernel(k, nu); };
    return integrate(f, 0, cutoff, opt.quad);
}

RMatrixValue r_matrix_any(cplx beta, cplx r0_value, double nu) {
    const cplx den = std::sinh(nu * (pi * I - beta));
    if (std::abs(den) < 1e-14) throw PoleError("R-matrix pole: sinh nu(pi i - beta) = 0", den);
    RMatrixValue v;
    v.a = r0_value;
    v.b = r0_value * std::sinh(nu * beta) / den;
    v.c = r0_value * std::sinh(nu * pi * I) / den;
    v.entries = Mat4::Zero();
    v.entries(0, 0) = v.entries(3, 3) = v.a;
    v.entries(1, 1) = v.entries(2, 2) = v.b;
    v.entries(1, 2) = v.entries(2, 1) = v.c;
    return v;
}

RMatrixValue r_matrix_coupling(cplx beta, double nu, const R0Options& opt) {
    const cplx den = std::sinh(nu * (pi * I - beta));
    if (std::abs(den) < 1e-14) throw PoleError("R-matrix pole: sinh nu(pi i - beta) = 0", den);
    return r_matrix_any(beta, std::exp(I * r0_exponent_any(beta, nu, opt).value), nu);
}

}  // namespace

QuadResult r0_exponent(cplx beta, double nu, const R0Options& opt) {
    (void)Anisotropy(nu);
    return r0_exponent_any(beta, nu, opt);
}

cplx r0(cplx beta, double nu, const R0Options& opt) {
    return std::exp(I * r0_exponent(beta, nu, opt).value);
}

RMatrixValue r_matrix_from(cplx beta, cplx r0_value, const Anisotropy& an) {
    return r_matrix_any(beta, r0_value, an.nu());
}

RMatrixValue r_matrix(cplx beta, const Anisotropy& an, const R0Options& opt) {
    // check the pole before paying for the quadrature
    const cplx den = std::sinh(an.nu() * (pi * I - beta));
    if (std::abs(den) < 1e-14) throw PoleError("R-matrix pole: sinh nu(pi i - beta) = 0", den);
    return r_matrix_from(beta, r0(beta, an.nu(), opt), an);
}

Mat4 gauge_factor(cplx beta1, cplx beta2, double nu) {
    const cplx e1 = std::exp(nu * beta1 / 2.0), e2 = std::exp(nu * beta2 / 2.0);
    Mat4 g = Mat4::Zero();
    g(0, 0) = e1 * e2;
    g(1, 1) = e1 / e2;
    g(2, 2) = e2 / e1;
    g(3, 3) = 1.0 / (e1 * e2);
    return g;
}

Mat4 gauge_r(cplx beta1, cplx beta2, const Anisotropy& an, const R0Options& opt) {
    const Mat4 g = gauge_factor(beta1, beta2, an.nu());
    const Mat4 gi = gauge_factor(-beta1, -beta2, an.nu());
    return g * r_matrix(beta1 - beta2, an, opt).entries * gi;
}

Mat4 constant_rq(cplx q_half) {
    if (q_half == cplx(0)) throw DomainError("q must be nonzero");
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(3, 3) = q_half;
    m(1, 1) = m(2, 2) = 1;
    m(1, 2) = q_half - 1.0 / q_half;
    return m;
}

Mat4 constant_rq(const Anisotropy& an) { return constant_rq(an.q_pow(0.5)); }

Mat4 gauge_r_decomposed(cplx beta1, cplx beta2, const Anisotropy& an, const R0Options& opt) {
    const double nu = an.nu();
    const cplx d = beta1 - beta2;
    const cplx den = 2.0 * std::sinh(nu * (pi * I - d));
    if (std::abs(den) < 1e-14) throw PoleError("R-matrix pole: sinh nu(pi i - beta) = 0", den);
    // With site 1 slowest the identity holds for the transposed constant matrix.
    const Mat4 r12 = constant_rq(an).transpose();
    const Mat4 p = permutation4();
    const Mat4 r21 = p * r12 * p;
    return r0(d, nu, opt) / den * (std::exp(nu * d) * r21.inverse() - std::exp(-nu * d) * r12);
}

double dual_coupling(const Anisotropy& an) { return an.nu() / (1 - an.nu()); }

RMatrixValue s_matrix(cplx theta, const Anisotropy& an, const R0Options& opt) {
    if (an.nu() < 0.5) return r_matrix(theta, an.dual(), opt);
    return r_matrix_coupling(theta, dual_coupling(an), opt);
}

Mat4 gauge_s(cplx theta1, cplx theta2, const Anisotropy& an, const R0Options& opt) {
    if (an.nu() < 0.5) return gauge_r(theta1, theta2, an.dual(), opt);
    const double nud = dual_coupling(an);
    return gauge_factor(theta1, theta2, nud) * s_matrix(theta1 - theta2, an, opt).entries *
           gauge_factor(-theta1, -theta2, nud);
}

Mat embed3(const Mat4& m, int i, int j) { return embed_pair(m, i, j, 3).matrix(); }

CheckReport check_ybe(const PairEvaluator& r, const YbeOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-opt.range, opt.range);
    double worst = 0;
    json worst_sample;
    for (int s = 0; s < opt.samples; ++s) {
        const double b1 = u(rng), b2 = u(rng), b3 = u(rng);
        Mat lhs, rhs;
        try {
            const Mat r12 = embed3(r(b1, b2), 1, 2);
            const Mat r13 = embed3(r(b1, b3), 1, 3);
            const Mat r23 = embed3(r(b2, b3), 2, 3);
            lhs = r12 * r13 * r23;
            rhs = r23 * r13 * r12;
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << e.what() << " at sample (" << b1 << ", " << b2 << ", " << b3 << ")";
            throw std::runtime_error(os.str());
        }
        const double res = max_abs(lhs - rhs);
        if (res >= worst) {
            worst = res;
            worst_sample = {b1, b2, b3};
        }
    }
    CheckReport rep = make_report("ybe", worst, opt.tol, opt.samples);
    rep.details["worst_sample"] = worst_sample;
    rep.details["seed"] = opt.seed;
    return rep;
}

CheckReport check_ybe(const DifferenceEvaluator& r, const YbeOptions& opt) {
    return check_ybe(PairEvaluator([&r](cplx a, cplx b) { return r(a - b); }), opt);
}

}  // namespace qkzb
