#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qkzb/quantum_group.hpp"
#include "qkzb/report.hpp"
#include "qkzb/rmatrix.hpp"
#include "qkzb/tensor.hpp"

namespace qkzb {

// Component layout: the 2n beta slots are sites 1..2n, the 2m theta slots (mixed
// system only) follow as sites 2n+1..2n+2m. Tensor factors travel with their
// rapidities, so swapping two rapidities also swaps the factors; in fixed-slot
// components every exchange carries a permutation P.

enum class QkzLevel { Minus4, Zero, Mixed };
enum class QkzGauge { Plain, Hatted };
enum class Continuation { Analytic, Refuse };
// Consistent: the readings that hold for the constructed solutions and are
// related by the gauge. Printed: the equations exactly as displayed.
enum class Reading { Consistent, Printed };
enum class GaugeDirection { Hat, Unhat };

std::string to_string(QkzLevel l);
std::string to_string(QkzGauge g);

struct QkzPoint {
    std::vector<cplx> betas;
    std::vector<cplx> thetas;
};

struct CandidateSolution {
    std::string name;
    QkzLevel level = QkzLevel::Minus4;
    QkzGauge gauge = QkzGauge::Hatted;
    int n = 1;  // 2n beta slots
    int m = 0;  // 2m theta slots
    double nu = 0.3;
    Continuation continuation = Continuation::Refuse;
    std::function<Vec(const QkzPoint&)> evaluator;
    // Same family with two beta slots fewer (resp. two theta slots fewer).
    std::shared_ptr<const CandidateSolution> lower;
    std::shared_ptr<const CandidateSolution> lower_theta;

    int sites() const { return 2 * n + 2 * m; }
    // Checks the point's shape and the output dimension.
    Vec operator()(const QkzPoint& p) const;
};

// ---- singlets ---------------------------------------------------------------

// Components on (up up, up down, down up, down down).
struct SingletVector {
    Vec components;
    static SingletVector hatted(const Anisotropy& an);        // q^{1/4} ud - q^{-1/4} du, exp-form q
    static SingletVector hatted_dual(const Anisotropy& an);   // same with q-tilde
    static SingletVector plain();                             // ud + du
};
// max |S+- s| for the two-site generators of the given convention
double singlet_residual(const SingletVector& s, const Anisotropy& an,
                        QConvention c = QConvention::ExpForm);

// Projector onto the singlets of (C^2)^{2n}, built from the right and left
// kernels of S+ and S-; commutes with S3 and S+-. Throws DomainError when the
// rank differs from C(2n,n) - C(2n,n-1).
ChainOperator singlet_projector(int n, const Anisotropy& an, QConvention c = QConvention::ExpForm);
int singlet_count(int n);

// ---- residuals --------------------------------------------------------------

struct QkzOptions {
    Reading reading = Reading::Consistent;
    double residue_radius = 1e-2;
    int residue_points = 16;
    R0Options r0{};
};

// X = M(x_j, x_{j+1}) P on the pair (j, j+1), M the system's R, gauged R or S.
// Vectors: f(point) = X f(swapped). Covectors: f(swapped) = f(point) X.
// Both give X(point) X(swapped) = 1. j is 1-based within the beta slots, or
// within the theta slots when theta_slot.
Mat4 exchange_matrix(QkzLevel level, QkzGauge gauge, const QkzPoint& p, int j, bool theta_slot,
                     double nu, const R0Options& opt = {});

// Apply a 4x4 to the ordered slot pair (a, b) of an N-site vector (1-based).
Vec apply_pair(const Mat4& op, int a, int b, int sites, const Vec& v);

double residual_exchange(const CandidateSolution& c, int j, const QkzPoint& p,
                         const QkzOptions& opt = {});
// theta exchange of the mixed system (s2)
double residual_exchange_theta(const CandidateSolution& c, int j, const QkzPoint& p,
                               const QkzOptions& opt = {});
double residual_shift(const CandidateSolution& c, const QkzPoint& p, const QkzOptions& opt = {});
double residual_shift_theta(const CandidateSolution& c, const QkzPoint& p, const QkzOptions& opt = {});
// Level -4: j = 1..2n-1, beta_{j+1} set to beta_j - pi i (point's value ignored).
// Level 0 and mixed: residue form at the last pair; j must be 2n-1.
double residual_specialization(const CandidateSolution& c, int j, const QkzPoint& p,
                               const QkzOptions& opt = {});
double residual_specialization_theta(const CandidateSolution& c, const QkzPoint& p,
                                     const QkzOptions& opt = {});

// 2 pi i times the residue of f in slot `beta_index` (0-based within betas, or
// within thetas when theta_slot) at `pole`, by the trapezoid rule on a circle.
Vec contour_residue(const CandidateSolution& c, const QkzPoint& p, int index, bool theta_slot,
                    cplx pole, const QkzOptions& opt = {});

// ---- wrappers ---------------------------------------------------------------

// exp((nu/2) sum_j beta_j sigma3_j) on the beta slots (Hat) or its inverse.
CandidateSolution gauge_transform_solution(const CandidateSolution& c, GaugeDirection d);
// Multiplies (or divides) by prod_{i,j} psi(beta_i, theta_j); mixed only.
CandidateSolution psi_dress(const CandidateSolution& c, bool dress = true);

// ---- built-in candidates ----------------------------------------------------

// u(beta) = -(beta + pi i)^2 / 2 * exp(Rest(beta)): u(beta) = rho(beta) u(-beta)
// with rho the singlet eigenvalue of the gauged R P, and u(beta - 2 pi i) = u(-beta).
// Needs 0 < nu < 1/2 and Im(beta + pi i) inside the strip of the integral.
cplx two_site_scalar(cplx beta, double nu);
double two_site_strip(double nu);  // |Im(beta + pi i)| must stay below this

// The empty-slot candidate (value 1).
CandidateSolution unit_candidate(QkzLevel level, QkzGauge gauge, double nu);
// n = 1, level -4: g-hat = -i u(b12)/u(pi i) s-hat; the plain one is its gauge image.
CandidateSolution two_site_solution(double nu, QkzGauge gauge = QkzGauge::Hatted);
// n = 1, level 0: (cosh b12 + 1)/u(b12) s-hat^T.
CandidateSolution two_site_level0(double nu);
// Constant vector candidate; a constant continues trivially. For n = 1 the
// unit candidate sits below it, otherwise no lower candidate is attached.
CandidateSolution constant_candidate(QkzLevel level, QkzGauge gauge, int n, double nu, Vec value,
                                     std::string name = "constant");
// Unit-norm random constant, with random constants of every smaller size below.
CandidateSolution random_candidate(QkzLevel level, QkzGauge gauge, int n, double nu,
                                   std::uint64_t seed);
// g-hat(beta1, beta2) (x) f0(theta1, theta2) with f0 the level-0 solution at the
// dual coupling, dressed with prod psi. Needs nu < 1/3.
CandidateSolution mixed_product_candidate(double nu);

std::vector<std::string> builtin_candidate_names();
CandidateSolution builtin_candidate(const std::string& name, double nu);

// ---- reports ----------------------------------------------------------------

struct QkzCheckOptions {
    int samples = 4;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    QkzOptions qkz{};
};

// One report per equation of the candidate's system, residual = max over samples.
// A sample whose evaluation throws makes that report fail with the message in
// details["error"].
std::vector<CheckReport> check_candidate(const CandidateSolution& c, const QkzCheckOptions& opt = {});

}  // namespace qkzb
