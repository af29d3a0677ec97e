#pragma once

#include <numbers>
#include <vector>

#include "qkzb/quadrature.hpp"

namespace qkzb {

// sinh(pi k (nu-1)/(2nu)) / (sinh(pi k/(2nu)) cosh(pi k/2)); shared by R0 and chi.
double xxz_kernel(double k, double nu);

// sinh(pi k (nu+1)/(2nu)) / (sinh(pi k/(2nu)) sinh(pi k)), the weight inside phi.
double phi_kernel(double k, double nu);

// ---- phi ------------------------------------------------------------------
// log phi(alpha, beta) = -(1+nu)(alpha+beta)/2 + F(alpha-beta), with
// F(x) = -int_0^inf 2 sin^2(xk/2) phi_kernel(k)/k dk, even in x.

// Direct tanh-sinh evaluation of F; needs |Im x| < pi/2.
QuadResult phi_reduced(cplx x, double nu, const QuadratureSpec& spec = {});
cplx phi(cplx alpha, cplx beta, double nu, const QuadratureSpec& spec = {});

struct PhiOptions {
    double switch_point = 2.0;          // |Re x| below this uses the integral
    double residue_min_re = 0.25;       // residue series usable for Re x >= this
    double imag_bound = std::numbers::pi / 4;  // integral nodes valid for |Im x| <= this
    int order = 20;
};

// Fast evaluator for many phi values at fixed nu: fixed Gauss-Legendre nodes for
// the integral, and for |Re x| large the pole expansion of the Fourier integral,
// which also continues F off the strip. The two are glued by a constant fitted
// at the switch point.
class PhiKernel {
public:
    explicit PhiKernel(double nu, PhiOptions opt = {});

    double nu() const { return nu_; }
    cplx reduced(cplx x) const;
    cplx reduced_direct(cplx x) const;
    cplx reduced_residue(cplx x) const;
    cplx log_phi(cplx alpha, cplx beta) const;
    cplx operator()(cplx alpha, cplx beta) const { return std::exp(log_phi(alpha, beta)); }

    cplx constant() const { return constant_; }  // F(x) + (nu+1)x/2 -> constant, x -> +inf
    double matching_error() const { return matching_error_; }
    std::size_t pole_clusters() const { return clusters_.size(); }
    const PhiOptions& options() const { return opt_; }

private:
    struct Cluster {
        double height;              // pole location i*height (cluster centre)
        std::vector<cplx> coeffs;   // residue of e^{ixk} g = e^{-x height} sum coeffs[n] x^n
    };
    cplx residue_sum(cplx x) const;

    double nu_;
    PhiOptions opt_;
    NodeSet nodes_;
    std::vector<double> weights_;  // w_i * phi_kernel(k_i)/k_i
    std::vector<Cluster> clusters_;
    cplx constant_{0};
    double matching_error_ = 0;
};

// ---- psi ------------------------------------------------------------------
// psi(beta, theta) = 2^{-3/4} exp(-(beta+theta)/4 - I(beta-theta)); the integral
// is rearranged so it converges for -5pi/2 < Im(beta-theta) < pi/2, which covers
// the shifts theta+pi i and theta+2pi i of the functional equations.
QuadResult psi_exponent(cplx x, const QuadratureSpec& spec = {});
cplx psi(cplx beta, cplx theta, const QuadratureSpec& spec = {});

// ---- chi ------------------------------------------------------------------
QuadResult chi_integral(cplx alpha, double nu, const QuadratureSpec& spec = {});
cplx chi(cplx alpha, double nu, const QuadratureSpec& spec = {});

struct ChiSeries {
    double nu;
    std::vector<double> coeffs;  // chi(alpha) = i sum coeffs[m] alpha^{2m}
    std::vector<double> errors;  // quadrature estimates of the moments, scaled like coeffs
    double radius;               // ratio-test estimate of the convergence radius
    cplx operator()(cplx alpha) const;
};

ChiSeries chi_series(double nu, int terms, const QuadratureSpec& spec = {});
QuadResult chi_moment(int m, double nu, const QuadratureSpec& spec = {});

// ---- dispersion -----------------------------------------------------------
struct Dispersion {
    cplx momentum;  // log tanh((theta - pi i/2)/2)
    cplx energy;    // d momentum / d theta
};
Dispersion dispersion(cplx theta);

}  // namespace qkzb
