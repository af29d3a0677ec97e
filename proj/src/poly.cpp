#include "qkzb/poly.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace qkzb {

// ---- GaussQ -----------------------------------------------------------------

GaussQ::GaussQ(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
}

GaussQ GaussQ::parse(const std::string& re, const std::string& im) {
    try {
        return GaussQ(mpq_class(re), mpq_class(im));
    } catch (const std::invalid_argument&) {
        throw DomainError("not a rational: " + re + " / " + im);
    }
}

std::string GaussQ::str() const {
    if (sgn(im_) == 0) return re_.get_str();
    if (sgn(re_) == 0) return im_.get_str() + "i";
    std::string s = re_.get_str();
    if (sgn(im_) > 0) s += "+";
    return s + im_.get_str() + "i";
}

GaussQ& GaussQ::operator+=(const GaussQ& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

GaussQ& GaussQ::operator-=(const GaussQ& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

GaussQ& GaussQ::operator*=(const GaussQ& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussQ& GaussQ::operator/=(const GaussQ& o) {
    if (o.is_zero()) throw DomainError("GaussQ division by zero");
    mpq_class d = o.norm2();
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / d;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / d;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
}

GaussQ pow(const GaussQ& x, int e) {
    if (e < 0) return GaussQ(1) / pow(x, -e);
    GaussQ r(1), b = x;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// ---- LaurentPoly ------------------------------------------------------------

bool GradedLex::operator()(const Exponents& a, const Exponents& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0), db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a < b;
}

LaurentPoly::LaurentPoly(std::vector<std::string> variables) : vars_(std::move(variables)) {
    std::set<std::string> seen(vars_.begin(), vars_.end());
    if (seen.size() != vars_.size()) throw DomainError("LaurentPoly: repeated variable name");
}

LaurentPoly LaurentPoly::constant(std::vector<std::string> variables, const GaussQ& c) {
    LaurentPoly p(std::move(variables));
    p.add_term(Exponents(p.vars_.size(), 0), c);
    return p;
}

LaurentPoly LaurentPoly::variable(std::vector<std::string> variables, const std::string& name, int power) {
    LaurentPoly p(std::move(variables));
    Exponents e(p.vars_.size(), 0);
    e[p.index_of(name)] = power;
    p.add_term(e, GaussQ(1));
    return p;
}

LaurentPoly LaurentPoly::monomial(std::vector<std::string> variables, Exponents e, const GaussQ& c) {
    LaurentPoly p(std::move(variables));
    if (e.size() != p.vars_.size()) throw DomainError("LaurentPoly: exponent vector has the wrong length");
    p.add_term(e, c);
    return p;
}

int LaurentPoly::index_of(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw DomainError("LaurentPoly: unknown variable " + name);
    return static_cast<int>(it - vars_.begin());
}

void LaurentPoly::add_term(const Exponents& e, const GaussQ& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void LaurentPoly::require_same(const LaurentPoly& o) const {
    if (vars_ != o.vars_) throw DomainError("LaurentPoly: incompatible variable sets");
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    require_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
    require_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

LaurentPoly& LaurentPoly::operator*=(const GaussQ& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    a.require_same(b);
    LaurentPoly r(a.vars_);
    Exponents e(a.vars_.size());
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
            r.add_term(e, ca * cb);
        }
    return r;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
}

LaurentPoly LaurentPoly::pow(int e) const {
    if (e < 0) {
        if (terms_.size() != 1) throw DomainError("LaurentPoly: negative power of a non-monomial");
        const auto& [ex, c] = *terms_.begin();
        Exponents inv(ex.size());
        for (std::size_t k = 0; k < ex.size(); ++k) inv[k] = -ex[k];
        return monomial(vars_, inv, GaussQ(1) / c).pow(-e);
    }
    LaurentPoly r = constant(vars_, GaussQ(1)), b = *this;
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

LaurentPoly LaurentPoly::substitute(const std::string& name, const LaurentPoly& value) const {
    require_same(value);
    int k = index_of(name);
    LaurentPoly r(vars_);
    std::map<int, LaurentPoly> powers;
    for (const auto& [e, c] : terms_) {
        int p = e[k];
        auto it = powers.find(p);
        if (it == powers.end()) it = powers.emplace(p, value.pow(p)).first;
        Exponents rest = e;
        rest[k] = 0;
        r += monomial(vars_, rest, c) * it->second;
    }
    return r;
}

GaussQ LaurentPoly::evaluate(const std::vector<GaussQ>& point) const {
    if (point.size() != vars_.size()) throw DomainError("LaurentPoly: point has the wrong length");
    GaussQ s(0);
    for (const auto& [e, c] : terms_) {
        GaussQ t = c;
        for (std::size_t k = 0; k < e.size(); ++k)
            if (e[k] != 0) {
                if (e[k] < 0 && point[k].is_zero())
                    throw PoleError("LaurentPoly: negative power at zero", 0.0);
                t *= qkzb::pow(point[k], e[k]);
            }
        s += t;
    }
    return s;
}

cplx LaurentPoly::evaluate(const std::vector<cplx>& point) const {
    if (point.size() != vars_.size()) throw DomainError("LaurentPoly: point has the wrong length");
    cplx s = 0;
    for (const auto& [e, c] : terms_) {
        cplx t = c.to_cplx();
        for (std::size_t k = 0; k < e.size(); ++k)
            if (e[k] != 0) t *= std::pow(point[k], e[k]);
        s += t;
    }
    return s;
}

LaurentPoly LaurentPoly::swap_variables(const std::string& a, const std::string& b) const {
    int ia = index_of(a), ib = index_of(b);
    LaurentPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        Exponents f = e;
        std::swap(f[ia], f[ib]);
        r.add_term(f, c);
    }
    return r;
}

int LaurentPoly::degree(const std::string& name) const {
    int k = index_of(name), d = INT_MIN;
    for (const auto& [e, c] : terms_) d = std::max(d, e[k]);
    return d;
}

int LaurentPoly::min_degree(const std::string& name) const {
    int k = index_of(name), d = INT_MAX;
    for (const auto& [e, c] : terms_) d = std::min(d, e[k]);
    return d;
}

int LaurentPoly::total_degree() const {
    int d = INT_MIN;
    for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
}

std::string LaurentPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << "(" << it->second.str() << ")";
        for (std::size_t k = 0; k < vars_.size(); ++k) {
            int p = it->first[k];
            if (p == 0) continue;
            os << "*" << vars_[k];
            if (p != 1) os << "^" << p;
        }
    }
    return os.str();
}

// ---- subsets and X ----------------------------------------------------------

namespace {

std::vector<int> complement(int size, const std::vector<int>& sub) {
    std::vector<int> r;
    for (int j = 1; j <= size; ++j)
        if (std::find(sub.begin(), sub.end(), j) == sub.end()) r.push_back(j);
    return r;
}

void for_each_subset(int size, int k, const std::function<void(const std::vector<int>&)>& f) {
    if (k < 0 || k > size) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 1);
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == size - k + i + 1) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::vector<std::pair<int, int>> x_pairs(const std::vector<int>& free, PairReading r) {
    std::vector<std::pair<int, int>> out;
    for (int a : free)
        for (int b : free)
            if (r == PairReading::Ordered || a != b) out.emplace_back(a, b);
    return out;
}

const GaussQ& at(const std::vector<GaussQ>& v, int label, const char* what) {
    if (label < 1 || label > static_cast<int>(v.size()))
        throw DomainError(std::string("index ") + std::to_string(label) + " outside the " + what + " values");
    return v[label - 1];
}

GaussQ checked_div(const GaussQ& num, const GaussQ& den, const std::string& what) {
    if (den.is_zero()) throw PoleError("denominator " + what + " vanishes", 0.0);
    return num / den;
}

}  // namespace

SubsetPair::SubsetPair(int n_, int m_, std::vector<int> t, std::vector<int> tp)
    : n(n_), m(m_), tset(std::move(t)), tpset(std::move(tp)) {
    if (n < 1 || m < 1) throw DomainError("SubsetPair: n, m >= 1");
    std::sort(tset.begin(), tset.end());
    std::sort(tpset.begin(), tpset.end());
    auto ok = [](const std::vector<int>& s, int size, int card) {
        if (static_cast<int>(s.size()) != card) return false;
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
        return s.empty() || (s.front() >= 1 && s.back() <= size);
    };
    if (!ok(tset, 2 * n, n - 1)) throw DomainError("SubsetPair: T must have n-1 distinct labels in 1..2n");
    if (!ok(tpset, 2 * m, m - 1)) throw DomainError("SubsetPair: T' must have m-1 distinct labels in 1..2m");
}

std::vector<int> SubsetPair::free_set() const { return complement(2 * n, tset); }
std::vector<int> SubsetPair::free_pset() const { return complement(2 * m, tpset); }

std::string to_string(PairReading r) { return r == PairReading::Ordered ? "ordered" : "distinct"; }
std::string to_string(XDenominator r) {
    return r == XDenominator::ComplementS ? "S\\T" : "S'\\T'";
}

GaussQ x_kernel_sets(const std::vector<int>& tset, const std::vector<int>& free, const std::vector<int>& tpset,
                     const std::vector<int>& free_p, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                     const XReading& reading) {
    const GaussQ I = GaussQ::i();
    const std::vector<int>& dset = reading.denominator == XDenominator::ComplementS ? free : free_p;
    GaussQ sum(0);
    for (auto [i1, i2] : x_pairs(free, reading.pairs)) {
        GaussQ prod(1);
        for (int ip : {i1, i2}) {
            const GaussQ& b = at(B, ip, "B");
            GaussQ num(1), den(1);
            for (int j : tset) num *= b + at(B, j, "B");
            for (int j : tpset) num *= b + I * at(T, j, "T");
            for (int j : dset) {
                if (j == i1 || j == i2) continue;
                den *= b - at(B, j, "B");
            }
            for (int j : free_p) den *= b - I * at(T, j, "T");
            prod *= checked_div(num, den, "of X at B_" + std::to_string(ip));
        }
        sum += prod;
    }
    return sum;
}

GaussQ x_kernel(const SubsetPair& pair, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                const XReading& reading) {
    if (static_cast<int>(B.size()) != 2 * pair.n || static_cast<int>(T.size()) != 2 * pair.m)
        throw DomainError("x_kernel: need 2n B values and 2m T values");
    return x_kernel_sets(pair.tset, pair.free_set(), pair.tpset, pair.free_pset(), B, T, reading);
}

// ---- assembled M ------------------------------------------------------------

std::string MVariables::name(int idx) const {
    int na = n - 1, ns = m - 1;
    if (idx < 0 || idx >= count()) throw DomainError("MVariables: index out of range");
    if (idx < na) return "A" + std::to_string(idx + 1);
    idx -= na;
    if (idx < ns) return "S" + std::to_string(idx + 1);
    idx -= ns;
    if (idx < 2 * n) return "B" + std::to_string(idx + 1);
    return "T" + std::to_string(idx - 2 * n + 1);
}

GaussQ LinearForm::evaluate(const std::vector<GaussQ>& point) const {
    GaussQ s = c;
    for (const auto& [k, a] : coeffs) s += a * point.at(k);
    return s;
}

namespace {

LinearForm lf(std::vector<std::pair<int, GaussQ>> coeffs, bool cancel = false) {
    LinearForm f;
    f.coeffs = std::move(coeffs);
    f.must_cancel = cancel;
    return f;
}

std::string form_str(const LinearForm& f, const MVariables& v) {
    std::ostringstream os;
    bool first = true;
    if (!f.c.is_zero()) {
        os << f.c.str();
        first = false;
    }
    for (const auto& [k, a] : f.coeffs) {
        if (!first) os << " + ";
        first = false;
        if (a != GaussQ(1)) os << "(" << a.str() << ")";
        os << v.name(k);
    }
    return os.str();
}

}  // namespace

GaussQ AssembledM::evaluate(const std::vector<GaussQ>& point) const {
    if (static_cast<int>(point.size()) != vars.count()) throw DomainError("AssembledM: point has the wrong length");
    GaussQ sum(0);
    for (const auto& t : terms) {
        GaussQ num = t.coeff, den(1);
        for (const auto& f : t.num) num *= f.evaluate(point);
        for (const auto& f : t.den) {
            GaussQ d = f.evaluate(point);
            if (d.is_zero()) throw PoleError("denominator " + form_str(f, vars) + " vanishes", 0.0);
            den *= d;
        }
        sum += num / den;
    }
    return sum;
}

AssembledM assemble_m(int n, int m, const MOptions& opt) {
    if (n < 1 || m < 1) throw DomainError("assemble_m: n, m >= 1");
    if (n + m > opt.cap)
        throw DomainError("assemble_m: n + m = " + std::to_string(n + m) + " exceeds the cap " +
                          std::to_string(opt.cap));
    AssembledM out{MVariables{n, m}, opt.reading, {}};
    const MVariables& V = out.vars;
    const GaussQ I = GaussQ::i(), one(1), mone(-1);
    if (opt.reading.denominator == XDenominator::ComplementSPrime && m > n)
        throw DomainError("assemble_m: the S'\\T' reading of X needs B_j for j up to 2m > 2n");

    std::vector<LinearForm> prefactor;
    for (int i = 1; i <= n - 1; ++i)
        for (int j = i + 1; j <= n - 1; ++j) prefactor.push_back(lf({{V.a(i), one}, {V.a(j), mone}}));
    for (int i = 1; i <= m - 1; ++i)
        for (int j = i + 1; j <= m - 1; ++j) prefactor.push_back(lf({{V.s(i), one}, {V.s(j), mone}}));
    for (int j = 1; j <= 2 * n; ++j) prefactor.push_back(lf({{V.b(j), one}}));
    for (int j = 1; j <= n - 1; ++j) prefactor.push_back(lf({{V.a(j), one}}));

    auto body = [&](const std::vector<int>& tset, const std::vector<int>& tpset) {
        if (opt.only && (opt.only->first != tset || opt.only->second != tpset)) return;
        std::vector<int> fr = complement(2 * n, tset), frp = complement(2 * m, tpset);
        MTerm base;
        base.num = prefactor;
        for (int j : tset) base.num.push_back(lf({{V.b(j), one}}));
        for (int i = 1; i <= n - 1; ++i)
            for (int j : tset) base.num.push_back(lf({{V.a(i), one}, {V.b(j), I}}));
        for (int i = 1; i <= m - 1; ++i)
            for (int j : tpset) base.num.push_back(lf({{V.s(i), one}, {V.t(j), I}}));
        for (std::size_t a = 0; a < fr.size(); ++a)
            for (std::size_t b = a + 1; b < fr.size(); ++b)
                base.num.push_back(lf({{V.b(fr[a]), one}, {V.b(fr[b]), one}}));
        for (std::size_t a = 0; a < frp.size(); ++a)
            for (std::size_t b = a + 1; b < frp.size(); ++b)
                base.num.push_back(lf({{V.t(frp[a]), one}, {V.t(frp[b]), one}}));
        for (int i : tset)
            for (int j : fr) base.den.push_back(lf({{V.b(i), one}, {V.b(j), mone}}, true));
        for (int i : tpset)
            for (int j : frp) base.den.push_back(lf({{V.t(i), one}, {V.t(j), mone}}, true));
        for (int i : tset)
            for (int j : frp) base.num.push_back(lf({{V.b(i), one}, {V.t(j), I}}));
        for (int i : tpset)
            for (int j : fr) base.num.push_back(lf({{V.t(i), one}, {V.b(j), I}}));

        const std::vector<int>& dset = opt.reading.denominator == XDenominator::ComplementS ? fr : frp;
        for (auto [i1, i2] : x_pairs(fr, opt.reading.pairs)) {
            MTerm t = base;
            for (int ip : {i1, i2}) {
                for (int j : tset) t.num.push_back(lf({{V.b(ip), one}, {V.b(j), one}}));
                for (int j : tpset) t.num.push_back(lf({{V.b(ip), one}, {V.t(j), I}}));
                for (int j : dset) {
                    if (j == i1 || j == i2) continue;
                    t.den.push_back(lf({{V.b(ip), one}, {V.b(j), mone}}, true));
                }
                for (int j : frp) t.den.push_back(lf({{V.b(ip), one}, {V.t(j), -I}}));
            }
            out.terms.push_back(std::move(t));
        }
    };
    for_each_subset(2 * n, n - 1, [&](const std::vector<int>& ts) {
        for_each_subset(2 * m, m - 1, [&](const std::vector<int>& tps) { body(ts, tps); });
    });
    return out;
}

LaurentPoly m_polynomial(int n, int m, const std::vector<GaussQ>& B, const std::vector<GaussQ>& T,
                         const MOptions& opt) {
    if (static_cast<int>(B.size()) != 2 * n || static_cast<int>(T.size()) != 2 * m)
        throw DomainError("m_polynomial: need 2n B values and 2m T values");
    AssembledM a = assemble_m(n, m, opt);
    const MVariables& V = a.vars;
    int nfree = (n - 1) + (m - 1);
    std::vector<std::string> names;
    for (int k = 0; k < nfree; ++k) names.push_back(V.name(k));
    std::vector<GaussQ> params(V.count());
    for (int j = 1; j <= 2 * n; ++j) params[V.b(j)] = B[j - 1];
    for (int j = 1; j <= 2 * m; ++j) params[V.t(j)] = T[j - 1];

    auto to_poly = [&](const LinearForm& f) {
        LaurentPoly p(names);
        GaussQ c = f.c;
        Exponents e(nfree, 0);
        for (const auto& [k, v] : f.coeffs) {
            if (k < nfree) {
                Exponents ek = e;
                ek[k] = 1;
                p.add_term(ek, v);
            } else {
                c += v * params[k];
            }
        }
        p.add_term(e, c);
        return p;
    };

    LaurentPoly sum(names);
    for (const auto& t : a.terms) {
        GaussQ c = t.coeff, den(1);
        LaurentPoly p = LaurentPoly::constant(names, GaussQ(1));
        for (const auto& f : t.num) {
            bool constant = std::all_of(f.coeffs.begin(), f.coeffs.end(), [&](auto& kv) { return kv.first >= nfree; });
            if (constant)
                c *= f.evaluate(params);
            else
                p = p * to_poly(f);
        }
        for (const auto& f : t.den) {
            GaussQ d = f.evaluate(params);
            if (d.is_zero()) throw PoleError("denominator " + form_str(f, V) + " vanishes", 0.0);
            den *= d;
        }
        sum += p * (c / den);
    }
    return sum;
}

// ---- polynomiality ----------------------------------------------------------

namespace {

using UPoly = std::vector<GaussQ>;  // low to high

// (a v + b)
struct Lin {
    GaussQ a, b;
};

UPoly mul_lin(const UPoly& p, const GaussQ& a, const GaussQ& b, std::size_t trunc) {
    UPoly r(std::min(p.size() + 1, trunc), GaussQ(0));
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        if (k < r.size()) r[k] += p[k] * b;
        if (k + 1 < r.size() && !a.is_zero()) r[k + 1] += p[k] * a;
    }
    return r;
}

struct RootInfo {
    int mult = 0;
    bool must_cancel = false;
    std::string label;
};

// One term restricted to a line through the base point along variable k.
struct Restricted {
    GaussQ coeff;                       // includes constants and leading coefficients of denominators
    std::vector<Lin> num;               // non-constant numerator factors
    std::map<GaussQ, int> roots;        // denominator roots with multiplicity
    int num_degree = 0, den_degree = 0;
};

struct Line {
    std::vector<Restricted> terms;
    std::map<GaussQ, RootInfo> lcm;
};

Line restrict_line(const AssembledM& M, int k, const std::vector<GaussQ>& base) {
    Line line;
    auto split = [&](const LinearForm& f) {
        GaussQ a(0), b = f.c;
        for (const auto& [j, c] : f.coeffs) {
            if (j == k)
                a += c;
            else
                b += c * base[j];
        }
        return Lin{a, b};
    };
    for (const auto& t : M.terms) {
        Restricted r{t.coeff, {}, {}, 0, 0};
        for (const auto& f : t.num) {
            Lin l = split(f);
            if (l.a.is_zero()) {
                r.coeff *= l.b;
            } else {
                r.num.push_back(l);
                ++r.num_degree;
            }
        }
        for (const auto& f : t.den) {
            Lin l = split(f);
            if (l.a.is_zero()) {
                if (l.b.is_zero()) throw PoleError("base point lies on a denominator " + form_str(f, M.vars), 0.0);
                r.coeff /= l.b;
                continue;
            }
            r.coeff /= l.a;
            GaussQ root = -l.b / l.a;
            ++r.roots[root];
            ++r.den_degree;
            RootInfo& info = line.lcm[root];
            if (f.must_cancel && !info.must_cancel) {
                info.must_cancel = true;
                for (const auto& [j, c] : f.coeffs)
                    if (j != k) info.label = M.vars.name(j);
            }
        }
        for (const auto& [root, mult] : r.roots) line.lcm[root].mult = std::max(line.lcm[root].mult, mult);
        line.terms.push_back(std::move(r));
    }
    return line;
}

// Gaussian integers keep the exact sums small; genericity only needs a wide range.
GaussQ random_gauss(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-60, 60);
    return GaussQ(num(rng), num(rng));
}

struct LineVerdict {
    bool ok = true;
    std::string detail;
    int degree = 0;  // degree of M times the allowed denominators along the line
};

// N mod (v - r)^L over the common denominator, for every must-cancel root r.
LineVerdict symbolic_line(const Line& line, const std::string& var) {
    LineVerdict v;
    for (const auto& [r, info] : line.lcm) {
        if (!info.must_cancel) continue;
        const std::size_t L = info.mult;
        UPoly total(L, GaussQ(0));  // in w = v - r
        for (const auto& t : line.terms) {
            auto own = t.roots.find(r);
            int have = own == t.roots.end() ? 0 : own->second;
            std::size_t shift = L - have;
            if (shift >= L) continue;
            UPoly p{t.coeff};
            for (const auto& l : t.num) p = mul_lin(p, l.a, l.a * r + l.b, L - shift);
            for (const auto& [r2, info2] : line.lcm) {
                if (r2 == r) continue;
                auto o = t.roots.find(r2);
                int extra = info2.mult - (o == t.roots.end() ? 0 : o->second);
                for (int e = 0; e < extra; ++e) p = mul_lin(p, GaussQ(1), r - r2, L - shift);
            }
            for (std::size_t k = 0; k < p.size() && k + shift < L; ++k) total[k + shift] += p[k];
        }
        for (std::size_t k = 0; k < L; ++k)
            if (!total[k].is_zero()) {
                v.ok = false;
                v.detail = "along " + var + ": numerator not divisible by (" + var + " - " + info.label + ")^" +
                           std::to_string(L) + "; coefficient of (" + var + " - " + info.label + ")^" +
                           std::to_string(k) + " is " + total[k].str();
                return v;
            }
    }
    return v;
}

// Gaussian integer, for the products along a line: no gcd per multiply.
struct GaussZ {
    mpz_class re{0}, im{0};
    GaussZ& operator*=(const GaussZ& o) {
        mpz_class r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    GaussQ q() const { return GaussQ(mpq_class(re), mpq_class(im)); }
};

bool integral(const GaussQ& x) { return x.re().get_den() == 1 && x.im().get_den() == 1; }
GaussZ to_z(const GaussQ& x) { return {x.re().get_num(), x.im().get_num()}; }
GaussZ affine(const GaussZ& a, const GaussZ& x, const GaussZ& b) {
    GaussZ r = a;
    r *= x;
    r.re += b.re;
    r.im += b.im;
    return r;
}

GaussQ eval_line(const Line& line, const GaussQ& x, bool times_allowed) {
    GaussQ sum(0);
    bool fast = integral(x);
    GaussZ xz = to_z(x);
    for (const auto& t : line.terms) {
        bool tfast = fast;
        for (const auto& l : t.num) tfast = tfast && integral(l.a) && integral(l.b);
        for (const auto& [r, mult] : t.roots) tfast = tfast && integral(r);
        if (tfast) {
            GaussZ num{1, 0}, den{1, 0};
            for (const auto& l : t.num) num *= affine(to_z(l.a), xz, to_z(l.b));
            for (const auto& [r, mult] : t.roots) {
                GaussZ d = affine({1, 0}, xz, to_z(-r));
                for (int e = 0; e < mult; ++e) den *= d;
            }
            sum += t.coeff * (num.q() / den.q());
            continue;
        }
        GaussQ num = t.coeff, den(1);
        for (const auto& l : t.num) num *= l.a * x + l.b;
        for (const auto& [r, mult] : t.roots)
            for (int e = 0; e < mult; ++e) den *= x - r;
        sum += num / den;
    }
    if (times_allowed)
        for (const auto& [r, info] : line.lcm)
            if (!info.must_cancel)
                for (int e = 0; e < info.mult; ++e) sum *= x - r;
    return sum;
}

LineVerdict interpolation_line(const Line& line, const std::string& var, std::mt19937_64& rng, int fresh) {
    LineVerdict v;
    int bound = INT_MIN, allowed = 0;
    for (const auto& t : line.terms) bound = std::max(bound, t.num_degree - t.den_degree);
    for (const auto& [r, info] : line.lcm)
        if (!info.must_cancel) allowed += info.mult;
    if (line.terms.empty()) bound = -1;
    else bound += allowed;
    int npts = std::max(bound, -1) + 1;

    std::vector<GaussQ> xs, ys;
    auto fresh_x = [&]() {
        while (true) {
            GaussQ x = random_gauss(rng);
            if (line.lcm.count(x)) continue;
            if (std::find(xs.begin(), xs.end(), x) != xs.end()) continue;
            return x;
        }
    };
    for (int s = 0; s < npts; ++s) {
        xs.push_back(fresh_x());
        ys.push_back(eval_line(line, xs.back(), true));
    }
    // Newton divided differences
    std::vector<GaussQ> dd = ys;
    for (int lvl = 1; lvl < npts; ++lvl)
        for (int s = npts - 1; s >= lvl; --s) dd[s] = (dd[s] - dd[s - 1]) / (xs[s] - xs[s - lvl]);
    auto newton = [&](const GaussQ& x) {
        GaussQ r(0);
        for (int s = npts - 1; s >= 0; --s) r = r * (x - xs[s]) + dd[s];
        return r;
    };
    v.degree = -1;
    for (int s = npts - 1; s >= 0; --s)
        if (!dd[s].is_zero()) {
            v.degree = s;
            break;
        }
    for (int f = 0; f < fresh; ++f) {
        GaussQ x = fresh_x();
        GaussQ got = eval_line(line, x, true), fit = newton(x);
        if (got != fit) {
            v.ok = false;
            std::string poles;
            for (const auto& [r, info] : line.lcm)
                if (info.must_cancel) poles += (poles.empty() ? "" : ", ") + info.label;
            v.detail = "along " + var + ": degree-" + std::to_string(bound) + " fit misses a fresh sample at " +
                       var + " = " + x.str() + " (|difference| = " + std::to_string(std::abs((got - fit).to_cplx())) +
                       "); uncancelled candidates at " + poles;
            return v;
        }
    }
    return v;
}

}  // namespace

CheckReport check_polynomiality(const AssembledM& m, const PolynomialityOptions& opt) {
    const MVariables& V = m.vars;
    std::mt19937_64 rng(opt.seed);
    std::vector<GaussQ> base(V.count());
    for (auto& x : base) x = random_gauss(rng);

    bool symbolic = opt.strategy == PolyStrategy::SymbolicCancellation;
    CheckReport rep = make_report(symbolic ? "poly.symbolic" : "poly.interpolation", 0, 0, 0);
    json lines = json::object();
    bool ok = true;
    std::string failure;
    for (int k = (V.n - 1) + (V.m - 1); k < V.count(); ++k) {
        std::string var = V.name(k);
        Line line;
        try {
            line = restrict_line(m, k, base);
        } catch (const PoleError& e) {
            // unlucky base point; the caller may reseed
            ok = false;
            failure = e.what();
            break;
        }
        LineVerdict lv = symbolic ? symbolic_line(line, var) : interpolation_line(line, var, rng, opt.fresh_points);
        json entry{{"certified", lv.ok}};
        if (!symbolic) entry["degree"] = lv.degree;
        lines[var] = entry;
        ++rep.samples;
        if (!lv.ok) {
            ok = false;
            failure = lv.detail;
            break;
        }
    }
    rep.passed = ok;
    rep.residual = ok ? 0 : 1;
    rep.details["strategy"] = symbolic ? "symbolic-cancellation" : "interpolation";
    rep.details["pairs"] = to_string(m.reading.pairs);
    rep.details["x_denominator"] = to_string(m.reading.denominator);
    rep.details["terms"] = m.terms.size();
    rep.details["lines"] = lines;
    rep.details["seed"] = opt.seed;
    if (!ok) rep.details["residual_term"] = failure;
    return rep;
}

CheckReport certify_m(int n, int m, const PolynomialityOptions& opt) {
    MOptions mo;
    mo.reading = {PairReading::Ordered, XDenominator::ComplementS};
    CheckReport ordered = check_polynomiality(assemble_m(n, m, mo), opt);
    CheckReport chosen = ordered;
    bool switched = false;
    if (!ordered.passed) {
        mo.reading.pairs = PairReading::Distinct;
        chosen = check_polynomiality(assemble_m(n, m, mo), opt);
        switched = true;
    }
    CheckReport rep = chosen;
    rep.name = "poly.certify";
    rep.details["n"] = n;
    rep.details["m"] = m;
    rep.details["switched_to_distinct"] = switched;
    rep.details["ordered_outcome"] = ordered.passed ? "certified" : "failed";
    if (!ordered.passed) rep.details["ordered_residual_term"] = ordered.details["residual_term"];

    MOptions alt = mo;
    alt.reading.denominator = XDenominator::ComplementSPrime;
    try {
        CheckReport r = check_polynomiality(assemble_m(n, m, alt), opt);
        rep.details["x_denominator_readings"] = {{"S\\T", chosen.passed ? "certified" : "failed"},
                                                 {"S'\\T'", r.passed ? "certified" : "failed"}};
    } catch (const DomainError& e) {
        rep.details["x_denominator_readings"] = {{"S\\T", chosen.passed ? "certified" : "failed"},
                                                 {"S'\\T'", std::string("not applicable: ") + e.what()}};
    }

    // degrees in the free variables at a random parameter point
    std::mt19937_64 rng(opt.seed + 7);
    std::vector<GaussQ> B(2 * n), T(2 * m);
    for (auto& x : B) x = random_gauss(rng);
    for (auto& x : T) x = random_gauss(rng);
    LaurentPoly p = m_polynomial(n, m, B, T, mo);
    json deg = json::object();
    if (n >= 2) deg["A1"] = {{"degree", p.is_zero() ? -1 : p.degree("A1")}, {"factor_bound", 2 * n - 2}};
    if (m >= 2) deg["S1"] = {{"degree", p.is_zero() ? -1 : p.degree("S1")}, {"factor_bound", 2 * m - 3}};
    deg["total"] = p.is_zero() ? -1 : p.total_degree();
    rep.details["degrees"] = deg;
    rep.details["expanded_terms"] = p.size();
    return rep;
}

// ---- dimensions -------------------------------------------------------------

std::int64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

DimensionLedger dims(int n) {
    if (n < 1) throw DomainError("dims: n >= 1");
    return {n, binomial(2 * n, n) - binomial(2 * n, n - 1), binomial(2 * n - 2, n - 1) - binomial(2 * n - 2, n - 3),
            binomial(2 * n - 4, n - 2) - binomial(2 * n - 4, n - 4)};
}

}  // namespace qkzb
