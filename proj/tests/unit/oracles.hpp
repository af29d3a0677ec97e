#pragma once

// Independent reference evaluations used only by tests.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "qkzb/tensor.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Adaptive Gauss-Kronrod of a real integrand over [a, b].
template <class F>
double gk(F f, double a, double b, double tol = 1e-13) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

// Integrand of the R0 exponent written straight from the definition.
inline cplx r0(cplx beta, double nu) {
    const double pi = M_PI;
    auto g = [&](double k) {
        return std::sinh(pi * k * (nu - 1) / (2 * nu)) /
               (std::sinh(pi * k / (2 * nu)) * std::cosh(pi * k / 2));
    };
    auto re = [&](double k) { return k < 1e-300 ? 0.0 : (std::sin(beta * k) / k * g(k)).real(); };
    auto im = [&](double k) { return k < 1e-300 ? 0.0 : (std::sin(beta * k) / k * g(k)).imag(); };
    const double top = 60.0 / (pi - std::abs(beta.imag()));
    return std::exp(cplx(0, 1) * cplx(gk(re, 0, top), gk(im, 0, top)));
}

// F(x) of log phi straight from the sin^2 form, naive hyperbolics.
inline double phi_reduced(double x, double nu) {
    const double pi = M_PI;
    const double a = pi * (nu + 1) / (2 * nu), b = pi / (2 * nu);
    auto f = [&](double k) {
        if (k < 1e-8) return 0.0;
        const double s = std::sin(x * k / 2);
        return s * s * std::sinh(a * k) / (k * std::sinh(b * k) * std::sinh(pi * k));
    };
    return -2 * gk(f, 0, 30, 1e-14);
}

// Brute-force Kronecker embedding: builds I (x) ... (x) op (x) ... I factor by factor.
inline qkzb::Mat kron_chain(const std::vector<qkzb::Mat>& factors) {
    qkzb::Mat out = qkzb::Mat::Identity(1, 1);
    for (const auto& f : factors) {
        qkzb::Mat next(out.rows() * f.rows(), out.cols() * f.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
        out = next;
    }
    return out;
}

inline qkzb::Mat random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    qkzb::Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

// u(beta) of the two-site solution from the plain hyperbolic form of its
// exponent, cut at k = 25; needs real beta (Im(beta + pi i) = pi).
inline cplx two_site_scalar(double beta, double nu) {
    const double pi = M_PI;
    const cplx x(beta, pi);
    auto w = [&](double k) {
        const double kk = std::sinh(pi * k * (nu - 1) / (2 * nu)) / (std::sinh(pi * k / (2 * nu)) * std::cosh(pi * k / 2));
        const double k2 = -2 * std::sinh(pi * k * (1 - 2 * nu) / (2 * nu)) / std::sinh(pi * k / (2 * nu));
        return (kk + k2) / (2 * std::sinh(pi * k)) + 4 / std::expm1(2 * pi * k);
    };
    auto f = [&](double k) {
        const cplx s = std::sin(k * x / 2.0);
        return k < 1e-200 ? cplx(0) : w(k) * 2.0 * s * s / k;
    };
    cplx rest = 0;
    for (auto [a, b] : {std::pair{0.0, 1.0}, {1.0, 5.0}, {5.0, 25.0}})
        rest += cplx(gk([&](double k) { return f(k).real(); }, a, b), gk([&](double k) { return f(k).imag(); }, a, b));
    return -x * x / 2.0 * std::exp(rest);
}

}  // namespace oracle
