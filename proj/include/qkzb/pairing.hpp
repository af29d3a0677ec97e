#pragma once

#include <vector>

#include "qkzb/report.hpp"
#include "qkzb/special.hpp"
#include "qkzb/tensor.hpp"

namespace qkzb {

// Coefficients by ascending degree.
using CPoly = std::vector<cplx>;
int degree(const CPoly& p);  // -1 for the zero polynomial

class RapiditySet {
public:
    // even length 2n, pairwise distinct; the strip condition is checked by the
    // pairing engine, which knows nu
    explicit RapiditySet(std::vector<cplx> betas);

    int n() const { return static_cast<int>(betas_.size()) / 2; }
    const std::vector<cplx>& betas() const { return betas_; }
    cplx b(int j, double nu) const { return std::exp(2 * nu * betas_.at(j)); }
    cplx B(int j) const { return std::exp(betas_.at(j)); }
    RapiditySet shifted(cplx by) const;

private:
    std::vector<cplx> betas_;
};

struct PairingSpec {
    RapiditySet rapidities;
    double nu;
    // Gauss-Legendre panels along alpha; the error estimate compares `order`
    // against order/2+1 nodes on the same panels.
    QuadratureSpec quadrature{QuadRule::GaussLegendrePanels, 1e-10};
    double panel_width = 0.5;
    PhiOptions phi{};
};

// Precomputed weights along the real alpha line for a fixed spec and degree
// budget; every pairing with degrees inside the budget is a dot product.
class PairingEngine {
public:
    PairingEngine(const PairingSpec& spec, int max_deg_upper, int max_deg_lower);

    QuadResult pair(const CPoly& upper, const CPoly& lower) const;
    // <A^r | a^c> for r <= max_deg_upper, c <= max_deg_lower
    const Mat& monomial_gram() const { return gram_; }
    const Eigen::MatrixXd& gram_error() const { return gram_err_; }
    const PairingSpec& spec() const { return spec_; }
    int max_deg_upper() const { return du_; }
    int max_deg_lower() const { return dl_; }

private:
    PairingSpec spec_;
    int du_, dl_;
    Mat gram_;
    Eigen::MatrixXd gram_err_;
};

// Growth exponent check: deg P + 1 + 2 nu (deg p + 1) < 2n (1 + nu).
bool within_decay_budget(int deg_upper, int deg_lower, int n, double nu);

QuadResult pairing(const CPoly& upper, const CPoly& lower, const PairingSpec& spec);

// Lower basis s_j, j = -(n-1)..(n-1), deg s_j = j + n - 1 (index j + n - 1).
// Upper basis S_k, |k| = 1..n-1, deg S_{-k} = 2k-1, deg S_k = 2k-2, stored in
// the order S_1, S_-1, S_2, S_-2, ... (see upper_labels).
struct PolyBasisPair {
    int n;
    std::vector<CPoly> lower;
    std::vector<CPoly> upper;

    const CPoly& s(int j) const { return lower.at(j + n - 1); }
    const CPoly& S(int k) const;
    CPoly& S(int k);
};

std::vector<int> upper_labels(int n);  // 1, -1, 2, -2, ...

struct BuildDiagnostics {
    double gram_condition = 0;
    double min_pivot = 0;  // smallest |omega(S_k, S_-k)| before normalization
};

PolyBasisPair build_bases(const PairingEngine& engine, BuildDiagnostics* diag = nullptr);
PolyBasisPair build_bases(int n, const PairingSpec& spec, BuildDiagnostics* diag = nullptr);

// V[a][b] = <S_{label a} | s_{label b}> with labels from upper_labels on both
// sides (s_0 excluded).
Mat pairing_matrix(const PolyBasisPair& bases, const PairingEngine& engine);
// <S_{label a} | s_0>, the column left out of the relations.
Vec pairing_s0(const PolyBasisPair& bases, const PairingEngine& engine);
// Throws DomainError unless every polynomial has its stated exact degree.
void validate_degrees(const PolyBasisPair& bases);

CheckReport check_deformed_riemann(const PolyBasisPair& bases, const PairingEngine& engine,
                                   double tol = 1e-6);

// ---- wedges and the period matrix -------------------------------------------

// C(2n-2, n-1) - C(2n-2, n-3) for n >= 2; 0 for n = 1 (empty wedge).
int period_dimension(int n);
// (n-1)-subsets of the 2n-2 labels as bitmasks over positions of upper_labels.
std::vector<unsigned> index_sets(int n);
// Orthonormal basis (columns) of the kernel of the symplectic contraction on
// skew (n-1)-tensors; rows follow index_sets.
Eigen::MatrixXd irreducible_basis(int n);
// All (n-1)-minors of V (rows and columns over index_sets).
Mat wedge_matrix(const Mat& v, int n);

struct PeriodMatrix {
    int n;
    Mat entries;  // [I][J] = <S^J | s_I>
};

PeriodMatrix period_matrix(const PolyBasisPair& bases, const PairingEngine& engine);
PeriodMatrix period_matrix_from(const Mat& v, int n);

// Inverse by the dagger rule: <S^i | s_j^dagger>, s_j^dagger = sgn(j) s_{-j},
// S^i = sgn(i) S_{-i}; no matrix inversion involved. Throws when the
// relations are not certified to `tol`.
PeriodMatrix invert_period(const PolyBasisPair& bases, const PairingEngine& engine,
                           double tol = 1e-6);
Mat dagger_matrix(const Mat& v, int n);  // the dagger-rule image of V

}  // namespace qkzb
