#pragma once

#include <map>
#include <tuple>
#include <string>
#include <vector>

#include "qkzb/poly.hpp"
#include "qkzb/qkz.hpp"
#include "qkzb/report.hpp"

namespace qkzb {

// Entry key: m, the index tuple k_1..k_2m (1-based, distinct), and the spin
// components eps_1..eps_2n (0 = up, 1 = down; site 1 is the slowest index).
struct ChiKey {
    int m = 0;
    std::vector<int> ks;
    std::vector<int> eps;
    std::string str() const;
    friend bool operator<(const ChiKey& a, const ChiKey& b) {
        return std::tie(a.m, a.ks, a.eps) < std::tie(b.m, b.ks, b.eps);
    }
};

// Q as num/den in lambda_1..lambda_n (variables "l1".."ln").
struct QCoefficient {
    LaurentPoly num, den;
    cplx evaluate(const std::vector<double>& lambdas) const;  // PoleError when den vanishes
};

struct ChiExpansion {
    int n = 1;
    // sparse: absent entries are zero. Otherwise every canonical (m, ks) with
    // every eps must be present.
    bool sparse = false;
    std::map<ChiKey, QCoefficient> entries;

    void add(const ChiKey& key, const QCoefficient& q);  // checks the key's shape
    void add(const ChiKey& key, const GaussQ& constant);
    // Throws DomainError naming the first missing key.
    void require_complete() const;

    static ChiExpansion from_json(const json& j);
    static ChiExpansion load(const std::string& path);
    json to_json() const;
};

// Index tuples the double sum runs over: pairs (k_{2p-1} < k_{2p}) of a
// 2m-subset, pairs ordered by first element. chi is even, so other orderings
// of the same pairs add nothing new.
std::vector<std::vector<int>> canonical_tuples(int n, int m);

// sum over entries of Q(lambda) prod_p chi(lambda_{k_{2p-1}} - lambda_{k_{2p}}),
// placed at component eps. The prod zeta^{-1} prefactor is left out.
Vec eval_expansion(const ChiExpansion& exp, const std::vector<double>& lambdas, double nu);

// Which slot gets lambda_k - pi i/2. AsDisplayed: beta_k = lambda_k - pi i/2,
// beta_{2n-k+1} = lambda_k + pi i/2. Reduction (default): the opposite signs,
// which puts slots n, n+1 at beta_{n+1} = beta_n - pi i, the normalization point.
enum class Specialization { Reduction, AsDisplayed };
std::string to_string(Specialization s);

// The 2n betas for the given lambdas and regulators (delta_k moves each pair
// of slots toward each other; delta = 0 is the specialized point).
std::vector<cplx> specialized_betas(const std::vector<double>& lambdas, const std::vector<double>& deltas,
                                    Specialization s = Specialization::Reduction);

struct N1Result {
    Vec hatted;        // g-hat at the specialized point
    Vec plain;         // its gauge preimage, the correlator convention
    cplx scale;        // hatted = scale * s-hat
    double singlet_complement = 0;  // |hatted - <s-hat, hatted> s-hat / |s-hat|^2|
    double lambda_spread = 0;       // max difference over lambda in {0, 0.7}
    std::vector<CheckReport> residuals;  // exchange, shift, specialization
    Specialization specialization = Specialization::Reduction;
};

// The n = 1 system solved in closed form (qkz two-site solution), checked
// against its three residuals, then specialized at lambda = 0. Throws
// ConvergenceError when a residual exceeds tol. Needs 0 < nu < 1/2.
N1Result derive_n1(const Anisotropy& an, Specialization s = Specialization::Reduction, double tol = 1e-8);

struct LimitOptions {
    std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};  // strictly decreasing, > 0
    Specialization specialization = Specialization::Reduction;
    double tol = 1e-4;  // on the error estimate, relative to max(1, |limit|)
};

struct LimitResult {
    Vec value;
    double error = 0;
    std::vector<Vec> ladder;
};

// Richardson extrapolation of g(betas(delta)) to delta = 0 (same delta in
// every slot pair): the polynomial through all ladder points, so three points
// remove the delta and delta^2 terms. Error = change against the fit without
// the largest delta. Throws ConvergenceError when successive ladder values do
// not contract or the error estimate exceeds tol.
LimitResult limit_specialize(const CandidateSolution& g, const std::vector<double>& lambdas,
                             const LimitOptions& opt = {});

}  // namespace qkzb
