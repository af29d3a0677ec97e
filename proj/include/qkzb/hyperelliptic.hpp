#pragma once

#include <utility>
#include <vector>

#include "qkzb/pairing.hpp"
#include "qkzb/report.hpp"
#include "qkzb/tensor.hpp"

namespace qkzb {

// c^2 = prod (a - e_j). Branch points are kept sorted by real part (ties by
// imaginary part); cut k joins e_{2k-1} and e_{2k} (1-based). The sheet-1
// function is the product over cuts of (a - e_{2k-1}) sqrt((a - e_{2k})/(a - e_{2k-1})),
// analytic off the straight cuts and ~ a^n at infinity.
class HyperellipticCurve {
public:
    explicit HyperellipticCurve(std::vector<cplx> branch_points);

    int n() const { return static_cast<int>(e_.size()) / 2; }
    int genus() const { return n() - 1; }
    const std::vector<cplx>& branch_points() const { return e_; }
    std::vector<std::pair<int, int>> cuts() const;  // 0-based index pairs
    double min_separation() const { return sep_; }
    double clearance() const { return 0.1 * sep_; }

    cplx c(cplx a) const;     // sheet 1
    cplx c2(cplx a) const;    // prod (a - e_j)

private:
    std::vector<cplx> e_;
    double sep_ = 0;
};

// A cycle is a signed sum of stadium loops, each encircling one pair of
// branch points (0-based) counterclockwise and starting on sheet 1 at the
// midpoint left of the segment direction.
struct Cycle {
    std::vector<std::pair<int, int>> loops;
};

// a_k: loop around cut k. b_k: sum of the gap loops (e_{2j}, e_{2j+1}) for j = k..n-1.
struct CycleBasis {
    std::vector<Cycle> a, b;
    static CycleBasis standard(const HyperellipticCurve& curve);
};

struct PeriodOptions {
    int order = 20;
    bool allow_meromorphic = false;  // degree up to 2n-2 instead of n-2
    double max_arg_step = 0.7853981633974483;  // |delta arg c| per node
    int max_refine = 6;
};

struct LoopResult {
    cplx value;
    double error = 0;  // order vs order/2+1 nodes
    int refinements = 0;
};

// Integral of p(a)/c da around the stadium enclosing segment (e_i, e_j), c
// continued node by node from its sheet-1 value. Throws DomainError when the
// stadium comes near another branch point, and ConvergenceError when the
// continuation does not close or the step control cannot be met.
LoopResult loop_integral(const HyperellipticCurve& curve, int i, int j, const CPoly& p,
                         const PeriodOptions& opt = {});

struct PeriodMatrixResult {
    Mat values;  // rows: differentials; columns a_1..a_g, b_1..b_g
    double error = 0;
};

PeriodMatrixResult periods(const HyperellipticCurve& curve, const std::vector<CPoly>& differentials,
                           const CycleBasis& cycles, const PeriodOptions& opt = {});

// 2g differentials without residues: a^i da/c for i = 0..g-1, then
// (a^i - r_i a^{n-1}) da/c for i = n..2n-2 with r_i removing the residue at infinity;
// plus the residue pairing M with M_ij = sum over both points at infinity of Res(F_i w_j).
struct BilinearData {
    std::vector<CPoly> differentials;
    Mat residue_pairing;
};
BilinearData bilinear_data(const HyperellipticCurve& curve);

// residual = max |P J P^T - 2 pi i M|, J the standard symplectic form on (a, b).
CheckReport check_classical_riemann(const Mat& period_matrix, const Mat& residue_pairing, int genus,
                                    double tol = 1e-8);

// Strictly increasing (n-1)-tuples from 0..2n-2, lexicographic.
std::vector<std::vector<int>> enumerate_forms(int n);

struct ClassicalLimit {
    cplx deformed;        // <A^{2k-2} | p> at the given nu
    cplx classical;       // period of p(a) da / c over a_k, b_j = e^{2 nu beta_j}
    cplx normalization;   // deformed ~ normalization * classical
    double log_scale = 0; // log |normalization|, the rescaling part
    double phi_constant = 0;  // C(nu) read off phi at the reference argument
    double gap = 0;       // |deformed / normalization - classical| / |classical|
};

// The deformed pairing with the leading monomial of S_k against the a_k
// period. As nu -> 0, F(x) = -|x|/2 - log|2 sinh(nu x)|/2 + C(nu) + o(1); with
// that form the integrand is flat over (beta_{2k-1}, beta_{2k}) and becomes
// p(a) da / |c| times an explicit factor, which is the normalization. C(nu) is
// taken from phi at y = 1. Needs real rapidities and nu <= 0.05.
ClassicalLimit classical_limit_pairing(const CPoly& p, const PairingSpec& spec, int cycle);

}  // namespace qkzb
