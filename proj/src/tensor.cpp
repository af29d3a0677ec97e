#include "qkzb/tensor.hpp"

#include <string>

namespace qkzb {

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 sigma1() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}
Mat2 sigma2() {
    Mat2 m;
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
Mat2 sigma3() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}
Mat2 plus() {
    Mat2 m;
    m << 0, 1, 0, 0;
    return m;
}
Mat2 minus() {
    Mat2 m;
    m << 0, 0, 1, 0;
    return m;
}
}  // namespace pauli

Mat4 permutation4() {
    Mat4 p = Mat4::Zero();
    p(0, 0) = p(3, 3) = 1;
    p(1, 2) = p(2, 1) = 1;
    return p;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

std::size_t chain_dim(int sites) {
    if (sites < 1 || sites > kMaxSites)
        throw DomainError("site count " + std::to_string(sites) + " outside [1, " +
                          std::to_string(kMaxSites) + "]");
    return std::size_t{1} << sites;
}

SpinState::SpinState(int sites, Vec amplitudes) : sites_(sites), amp_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amp_.size()) != chain_dim(sites))
        throw DomainError("state length does not match 2^N");
}

SpinState SpinState::basis(int sites, std::size_t index) {
    Vec v = Vec::Zero(static_cast<Eigen::Index>(chain_dim(sites)));
    if (index >= static_cast<std::size_t>(v.size())) throw DomainError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1;
    return SpinState(sites, std::move(v));
}

ChainOperator::ChainOperator(int sites, Mat entries) : sites_(sites), m_(std::move(entries)) {
    auto d = static_cast<Eigen::Index>(chain_dim(sites));
    if (m_.rows() != d || m_.cols() != d) throw DomainError("operator is not 2^N x 2^N");
}

ChainOperator ChainOperator::identity(int sites) {
    auto d = static_cast<Eigen::Index>(chain_dim(sites));
    return ChainOperator(sites, Mat::Identity(d, d));
}

ChainOperator ChainOperator::zero(int sites) {
    auto d = static_cast<Eigen::Index>(chain_dim(sites));
    return ChainOperator(sites, Mat::Zero(d, d));
}

static void same_shape(const ChainOperator& a, const ChainOperator& b) {
    if (a.sites() != b.sites()) throw DomainError("operator dimension mismatch");
}

ChainOperator ChainOperator::operator+(const ChainOperator& o) const {
    same_shape(*this, o);
    return ChainOperator(sites_, m_ + o.m_);
}
ChainOperator ChainOperator::operator-(const ChainOperator& o) const {
    same_shape(*this, o);
    return ChainOperator(sites_, m_ - o.m_);
}
ChainOperator ChainOperator::operator*(const ChainOperator& o) const {
    same_shape(*this, o);
    return ChainOperator(sites_, m_ * o.m_);
}
ChainOperator ChainOperator::operator*(cplx s) const { return ChainOperator(sites_, m_ * s); }
SpinState ChainOperator::operator*(const SpinState& v) const {
    if (v.sites() != sites_) throw DomainError("state/operator dimension mismatch");
    return SpinState(sites_, m_ * v.amplitudes());
}

ChainOperator embed(const Mat2& op, int site, int sites) {
    chain_dim(sites);
    if (site < 1 || site > sites) throw DomainError("site index out of range");
    const auto left = Eigen::Index{1} << (site - 1);
    const auto right = Eigen::Index{1} << (sites - site);
    Mat out = Mat::Zero(left * 2 * right, left * 2 * right);
    for (Eigen::Index l = 0; l < left; ++l)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (op(a, b) == cplx(0)) continue;
                for (Eigen::Index r = 0; r < right; ++r)
                    out((l * 2 + a) * right + r, (l * 2 + b) * right + r) = op(a, b);
            }
    return ChainOperator(sites, std::move(out));
}

ChainOperator embed_pair(const Mat4& op, int first, int second, int sites) {
    const auto dim = static_cast<Eigen::Index>(chain_dim(sites));
    if (first < 1 || first > sites || second < 1 || second > sites || first == second)
        throw DomainError("pair sites out of range or equal");
    const int s1 = sites - first, s2 = sites - second;
    const Eigen::Index mask = (Eigen::Index{1} << s1) | (Eigen::Index{1} << s2);
    Mat out = Mat::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        const int cin = static_cast<int>(2 * ((col >> s1) & 1) + ((col >> s2) & 1));
        const Eigen::Index rest = col & ~mask;
        for (int rin = 0; rin < 4; ++rin) {
            const cplx v = op(rin, cin);
            if (v == cplx(0)) continue;
            const Eigen::Index row =
                rest | (Eigen::Index(rin >> 1) << s1) | (Eigen::Index(rin & 1) << s2);
            out(row, col) = v;
        }
    }
    return ChainOperator(sites, std::move(out));
}

SpinState apply_two_site(const Mat& r, int j, const SpinState& state) {
    if (r.rows() != 4 || r.cols() != 4) throw DomainError("two-site operator must be 4x4");
    const int n = state.sites();
    if (j < 1 || j > n - 1) throw DomainError("two-site index out of range");
    const auto left = Eigen::Index{1} << (j - 1);
    const auto right = Eigen::Index{1} << (n - j - 1);
    const Vec& in = state.amplitudes();
    Vec out = Vec::Zero(in.size());
    for (Eigen::Index l = 0; l < left; ++l)
        for (Eigen::Index rr = 0; rr < right; ++rr)
            for (int a = 0; a < 4; ++a) {
                cplx acc = 0;
                for (int b = 0; b < 4; ++b) acc += r(a, b) * in((l * 4 + b) * right + rr);
                out((l * 4 + a) * right + rr) = acc;
            }
    return SpinState(n, std::move(out));
}

ChainOperator commutator(const ChainOperator& a, const ChainOperator& b) {
    same_shape(a, b);
    return ChainOperator(a.sites(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

double frobenius_norm(const Mat& m) { return m.norm(); }

double spectral_norm(const Mat& m) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace qkzb
