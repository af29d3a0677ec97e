#pragma once

#include <cstdint>
#include <functional>
#include <numbers>

#include "qkzb/quadrature.hpp"
#include "qkzb/report.hpp"
#include "qkzb/tensor.hpp"

namespace qkzb {

// Coupling bundle. Fractional powers of q and q-tilde always go through the
// exponent form; the principal branch of q itself is never used.
class Anisotropy {
public:
    explicit Anisotropy(double nu);

    double nu() const { return nu_; }
    double delta() const;             // cos(pi nu)
    cplx q() const { return q_pow(1); }
    cplx q_pow(double x) const;       // exp(2 pi i (nu+1) x)
    cplx qtilde() const { return qtilde_pow(1); }
    cplx qtilde_pow(double x) const;  // exp(2 pi i x / (1-nu))
    Anisotropy dual() const;          // coupling nu/(1-nu), requires nu < 1/2

private:
    double nu_;
};

struct R0Options {
    double strip = std::numbers::pi / 2;  // enforced |Im beta| bound, at most pi
    QuadratureSpec quad{};
};

// R0(beta) = exp(i * integral over (0, inf) in k).
cplx r0(cplx beta, double nu, const R0Options& opt = {});
QuadResult r0_exponent(cplx beta, double nu, const R0Options& opt = {});

struct RMatrixValue {
    Mat4 entries;
    cplx a, b, c;
};

RMatrixValue r_matrix(cplx beta, const Anisotropy& an, const R0Options& opt = {});
RMatrixValue r_matrix_from(cplx beta, cplx r0_value, const Anisotropy& an);

// e^{nu b1 s3/2} (x) e^{nu b2 s3/2} R(b1-b2) (inverse gauge).
Mat4 gauge_r(cplx beta1, cplx beta2, const Anisotropy& an, const R0Options& opt = {});
// Same matrix assembled from the constant R(q). The constant matrix enters
// transposed; see constant_rq.
Mat4 gauge_r_decomposed(cplx beta1, cplx beta2, const Anisotropy& an, const R0Options& opt = {});
Mat4 gauge_factor(cplx beta1, cplx beta2, double nu);  // the left conjugating matrix

// Upper-triangular U_q(sl2) R-matrix built from a given q^{1/2}.
Mat4 constant_rq(cplx q_half);
Mat4 constant_rq(const Anisotropy& an);

// R at the dual coupling nu/(1-nu). For nu >= 1/2 that coupling is >= 1, outside
// Anisotropy's range; the same formula is evaluated there directly, with the R0
// strip narrowed to |Im theta| < pi (1-nu)/nu.
double dual_coupling(const Anisotropy& an);
RMatrixValue s_matrix(cplx theta, const Anisotropy& an, const R0Options& opt = {});
Mat4 gauge_s(cplx theta1, cplx theta2, const Anisotropy& an, const R0Options& opt = {});

using DifferenceEvaluator = std::function<Mat4(cplx)>;
using PairEvaluator = std::function<Mat4(cplx, cplx)>;

struct YbeOptions {
    int samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    double range = 1.0;  // rapidities drawn uniformly from (-range, range)
};

CheckReport check_ybe(const DifferenceEvaluator& r, const YbeOptions& opt = {});
CheckReport check_ybe(const PairEvaluator& r, const YbeOptions& opt = {});

// Embeds a 4x4 acting on factors (i, j) of (C^2)^3 as an 8x8 matrix.
Mat embed3(const Mat4& m, int i, int j);

}  // namespace qkzb
