#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qkzb/errors.hpp"
#include "qkzb/report.hpp"

namespace qkzb {

// Exact element of Q(i).
class GaussQ {
public:
    GaussQ() = default;
    GaussQ(long re) : re_(re) {}  // NOLINT(implicit)
    GaussQ(mpq_class re, mpq_class im = 0);
    static GaussQ i() { return GaussQ(0, 1); }
    static GaussQ parse(const std::string& re, const std::string& im = "0");

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }
    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    GaussQ conj() const { return GaussQ(re_, -im_); }
    mpq_class norm2() const { return re_ * re_ + im_ * im_; }
    cplx to_cplx() const { return {re_.get_d(), im_.get_d()}; }
    std::string str() const;

    GaussQ operator-() const { return GaussQ(-re_, -im_); }
    GaussQ& operator+=(const GaussQ& o);
    GaussQ& operator-=(const GaussQ& o);
    GaussQ& operator*=(const GaussQ& o);
    GaussQ& operator/=(const GaussQ& o);  // DomainError on division by zero
    friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
    friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
    friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
    friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
    friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }
    // arbitrary but fixed order, for use as a map key
    friend bool operator<(const GaussQ& a, const GaussQ& b) {
        return a.re_ < b.re_ || (a.re_ == b.re_ && a.im_ < b.im_);
    }

private:
    mpq_class re_{0}, im_{0};
};

GaussQ pow(const GaussQ& x, int e);

// ---- Laurent polynomials ----------------------------------------------------

using Exponents = std::vector<int>;

// Graded lexicographic: total degree first, then lexicographic.
struct GradedLex {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

class LaurentPoly {
public:
    using Terms = std::map<Exponents, GaussQ, GradedLex>;

    LaurentPoly() = default;
    explicit LaurentPoly(std::vector<std::string> variables);
    static LaurentPoly constant(std::vector<std::string> variables, const GaussQ& c);
    static LaurentPoly variable(std::vector<std::string> variables, const std::string& name, int power = 1);
    static LaurentPoly monomial(std::vector<std::string> variables, Exponents e, const GaussQ& c);

    const std::vector<std::string>& variables() const { return vars_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    int index_of(const std::string& name) const;  // DomainError when absent

    void add_term(const Exponents& e, const GaussQ& c);

    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    LaurentPoly& operator*=(const GaussQ& c);
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    friend LaurentPoly operator*(LaurentPoly a, const GaussQ& c) { return a *= c; }
    friend LaurentPoly operator*(const GaussQ& c, LaurentPoly a) { return a *= c; }
    LaurentPoly operator-() const;
    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b);

    LaurentPoly pow(int e) const;  // e >= 0, or e < 0 for a monomial
    // Replaces `name` by `value` (same variable list). Negative powers of
    // `name` need a monomial value; anything else throws DomainError.
    LaurentPoly substitute(const std::string& name, const LaurentPoly& value) const;
    GaussQ evaluate(const std::vector<GaussQ>& point) const;
    cplx evaluate(const std::vector<cplx>& point) const;
    LaurentPoly swap_variables(const std::string& a, const std::string& b) const;

    int degree(const std::string& name) const;      // max exponent; INT_MIN for zero
    int min_degree(const std::string& name) const;  // min exponent; INT_MAX for zero
    int total_degree() const;
    std::string str() const;

private:
    void require_same(const LaurentPoly& o) const;
    std::vector<std::string> vars_;
    Terms terms_;
};

// ---- the polynomial M -------------------------------------------------------

// Subset pair: tset subset of {1..2n} of size n-1, tpset subset of {1..2m} of
// size m-1 (1-based labels, sorted).
struct SubsetPair {
    int n, m;
    std::vector<int> tset, tpset;
    SubsetPair(int n, int m, std::vector<int> tset, std::vector<int> tpset);
    std::vector<int> free_set() const;   // {1..2n} minus tset
    std::vector<int> free_pset() const;  // {1..2m} minus tpset
};

enum class PairReading { Ordered, Distinct };
// which complement indexes the (B_ip - B_j) denominators of X
enum class XDenominator { ComplementS, ComplementSPrime };

struct XReading {
    PairReading pairs = PairReading::Ordered;
    XDenominator denominator = XDenominator::ComplementS;
};
std::string to_string(PairReading r);
std::string to_string(XDenominator r);

// X as a double sum over (i1, i2) in `free`, with explicit index sets so the
// degenerate single-element case can be exercised. B and T are 0-indexed by
// label - 1. Throws PoleError at a denominator zero.
GaussQ x_kernel_sets(const std::vector<int>& tset, const std::vector<int>& free, const std::vector<int>& tpset,
                     const std::vector<int>& free_p, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                     const XReading& reading = {});
GaussQ x_kernel(const SubsetPair& pair, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                const XReading& reading = {});

// Variables in the order A_1..A_{n-1}, S_1..S_{m-1}, B_1..B_{2n}, T_1..T_{2m}.
struct MVariables {
    int n, m;
    int count() const { return (n - 1) + (m - 1) + 2 * n + 2 * m; }
    int a(int i) const { return i - 1; }
    int s(int i) const { return (n - 1) + i - 1; }
    int b(int j) const { return (n - 1) + (m - 1) + j - 1; }
    int t(int j) const { return (n - 1) + (m - 1) + 2 * n + j - 1; }
    std::string name(int idx) const;
};

// c + sum coeff_k x_k
struct LinearForm {
    GaussQ c;
    std::vector<std::pair<int, GaussQ>> coeffs;
    bool must_cancel = false;  // a (B_i - B_j) or (T_i - T_j) denominator
    GaussQ evaluate(const std::vector<GaussQ>& point) const;
};

struct MTerm {
    GaussQ coeff{1};
    std::vector<LinearForm> num, den;
};

// The subset sum as a list of products of linear forms, before any expansion.
struct AssembledM {
    MVariables vars;
    XReading reading;
    std::vector<MTerm> terms;
    GaussQ evaluate(const std::vector<GaussQ>& point) const;
};

struct MOptions {
    XReading reading{};
    int cap = 7;  // n + m
    // keep only this subset pair (negative control: cancellation broken)
    std::optional<std::pair<std::vector<int>, std::vector<int>>> only;
};

AssembledM assemble_m(int n, int m, const MOptions& opt = {});
// M at fixed B and T, expanded in A_1..A_{n-1}, S_1..S_{m-1}.
LaurentPoly m_polynomial(int n, int m, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                         const MOptions& opt = {});

enum class PolyStrategy { SymbolicCancellation, Interpolation };

struct PolynomialityOptions {
    PolyStrategy strategy = PolyStrategy::Interpolation;
    std::uint64_t seed = 1;
    int fresh_points = 3;
};

// Along every B_j and T_j direction, at a random Gaussian-rational base point:
// symbolic = exact univariate numerator over the LCM of the denominators,
// divisible by every must-cancel factor; interpolation = M times the allowed
// (B - iT) denominators is a polynomial of at most the factor-count degree
// (fit, then exact agreement at fresh points).
CheckReport check_polynomiality(const AssembledM& m, const PolynomialityOptions& opt = {});

// Ordered-pair reading first; if it fails, the distinct-pair reading, with the
// switch recorded. Details carry both X-denominator readings' outcomes and the
// degrees in A_1 and S_1.
CheckReport certify_m(int n, int m, const PolynomialityOptions& opt = {});

struct DimensionLedger {
    int n;
    std::int64_t singlet_dim, irr_dim, hh_exponent;
};
std::int64_t binomial(int n, int k);  // 0 when k < 0, n < 0 or k > n
DimensionLedger dims(int n);

}  // namespace qkzb
