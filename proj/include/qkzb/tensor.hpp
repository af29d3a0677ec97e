#pragma once

#include <Eigen/Dense>

#include "qkzb/errors.hpp"

namespace qkzb {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr int kMaxSites = 12;

// Basis convention: index bit (N - site) holds the spin at `site`, so site 1 is
// the slowest-varying factor. Bit value 0 is spin up (sigma3 = +1).
namespace pauli {
Mat2 identity();
Mat2 sigma1();
Mat2 sigma2();
Mat2 sigma3();
Mat2 plus();   // [[0,1],[0,0]]
Mat2 minus();  // [[0,0],[1,0]]
}  // namespace pauli

Mat4 permutation4();
Mat4 kron(const Mat2& a, const Mat2& b);

class SpinState {
public:
    SpinState(int sites, Vec amplitudes);
    static SpinState basis(int sites, std::size_t index);

    int sites() const { return sites_; }
    const Vec& amplitudes() const { return amp_; }

private:
    int sites_;
    Vec amp_;
};

class ChainOperator {
public:
    ChainOperator(int sites, Mat entries);
    static ChainOperator identity(int sites);
    static ChainOperator zero(int sites);

    int sites() const { return sites_; }
    Eigen::Index dim() const { return m_.rows(); }
    const Mat& matrix() const { return m_; }

    ChainOperator operator+(const ChainOperator& o) const;
    ChainOperator operator-(const ChainOperator& o) const;
    ChainOperator operator*(const ChainOperator& o) const;
    ChainOperator operator*(cplx s) const;
    SpinState operator*(const SpinState& v) const;

private:
    int sites_;
    Mat m_;
};

inline ChainOperator operator*(cplx s, const ChainOperator& a) { return a * s; }

std::size_t chain_dim(int sites);  // 2^sites, checks the cap

ChainOperator embed(const Mat2& op, int site, int sites);

// 4x4 operator acting on the ordered pair (first, second); first may exceed
// second, which realizes R_21-type placements.
ChainOperator embed_pair(const Mat4& op, int first, int second, int sites);

SpinState apply_two_site(const Mat& r, int j, const SpinState& state);

ChainOperator commutator(const ChainOperator& a, const ChainOperator& b);

double frobenius_norm(const Mat& m);
double spectral_norm(const Mat& m);
double max_abs(const Mat& m);

}  // namespace qkzb
