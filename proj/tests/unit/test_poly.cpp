#include <doctest.h>

#include <random>

#include "qkzb/poly.hpp"
#include "poly_oracle.hpp"

using namespace qkzb;
using oracle::brute_x;
using oracle::in;
using oracle::subsets;

namespace {

GaussQ rnd(std::mt19937_64& rng, int span = 9) {
    std::uniform_int_distribution<int> num(-span, span), den(1, 5);
    return GaussQ(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

std::vector<GaussQ> rnd_vec(std::mt19937_64& rng, int k) {
    std::vector<GaussQ> v;
    while (static_cast<int>(v.size()) < k) {
        GaussQ x = rnd(rng);
        // distinct values, and no accidental B = iT type coincidences
        bool clash = false;
        for (const auto& y : v) clash = clash || x == y || x == -y || x == GaussQ::i() * y || y == GaussQ::i() * x;
        if (!clash) v.push_back(x);
    }
    return v;
}

GaussQ brute_m(int n, int m, const std::vector<GaussQ>& A, const std::vector<GaussQ>& S, const std::vector<GaussQ>& b,
               const std::vector<GaussQ>& t, bool distinct) {
    const GaussQ I = GaussQ::i();
    GaussQ pre(1);
    for (int i = 0; i < n - 1; ++i)
        for (int j = i + 1; j < n - 1; ++j) pre *= A[i] - A[j];
    for (int i = 0; i < m - 1; ++i)
        for (int j = i + 1; j < m - 1; ++j) pre *= S[i] - S[j];
    for (const auto& x : b) pre *= x;
    for (const auto& x : A) pre *= x;
    GaussQ sum(0);
    for (const auto& T : subsets(2 * n, n - 1))
        for (const auto& Tp : subsets(2 * m, m - 1)) {
            GaussQ term(1);
            for (int j : T) term *= b[j - 1];
            for (int i = 0; i < n - 1; ++i)
                for (int j : T) term *= A[i] + I * b[j - 1];
            for (int i = 0; i < m - 1; ++i)
                for (int j : Tp) term *= S[i] + I * t[j - 1];
            for (int i = 1; i <= 2 * n; ++i)
                for (int j = i + 1; j <= 2 * n; ++j)
                    if (!in(T, i) && !in(T, j)) term *= b[i - 1] + b[j - 1];
            for (int i = 1; i <= 2 * m; ++i)
                for (int j = i + 1; j <= 2 * m; ++j)
                    if (!in(Tp, i) && !in(Tp, j)) term *= t[i - 1] + t[j - 1];
            for (int i : T)
                for (int j = 1; j <= 2 * n; ++j)
                    if (!in(T, j)) term /= b[i - 1] - b[j - 1];
            for (int i : Tp)
                for (int j = 1; j <= 2 * m; ++j)
                    if (!in(Tp, j)) term /= t[i - 1] - t[j - 1];
            for (int i : T)
                for (int j = 1; j <= 2 * m; ++j)
                    if (!in(Tp, j)) term *= b[i - 1] + I * t[j - 1];
            for (int i : Tp)
                for (int j = 1; j <= 2 * n; ++j)
                    if (!in(T, j)) term *= t[i - 1] + I * b[j - 1];
            sum += term * brute_x(n, m, T, Tp, b, t, distinct);
        }
    return pre * sum;
}

// slow multiplier: all pairwise products into a flat list, then merged by linear search
LaurentPoly slow_mul(const LaurentPoly& a, const LaurentPoly& b) {
    std::vector<std::pair<Exponents, GaussQ>> flat;
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            Exponents e(ea.size());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
            GaussQ c = ca * cb;
            bool merged = false;
            for (auto& [ef, cf] : flat)
                if (ef == e) {
                    cf += c;
                    merged = true;
                }
            if (!merged) flat.emplace_back(e, c);
        }
    LaurentPoly r(a.variables());
    for (const auto& [e, c] : flat)
        if (!c.is_zero()) r = r + LaurentPoly::monomial(a.variables(), e, c);
    return r;
}

LaurentPoly random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars) {
    std::uniform_int_distribution<int> nterms(0, 5), ex(-2, 2);
    LaurentPoly p(vars);
    int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
        Exponents e(vars.size());
        for (auto& x : e) x = ex(rng);
        p = p + LaurentPoly::monomial(vars, e, rnd(rng));
    }
    return p;
}

std::vector<GaussQ> nonzero_point(std::mt19937_64& rng, std::size_t k) {
    std::vector<GaussQ> v;
    while (v.size() < k) {
        GaussQ x = rnd(rng);
        if (!x.is_zero()) v.push_back(x);
    }
    return v;
}

}  // namespace

TEST_CASE("laurent basics") {
    std::vector<std::string> xs{"x"};
    auto x = LaurentPoly::variable(xs, "x");
    auto xinv = LaurentPoly::variable(xs, "x", -1);
    auto one = LaurentPoly::constant(xs, GaussQ(1));
    CHECK((x + xinv) * x == x * x + one);
    CHECK((x * x + one).evaluate(std::vector<GaussQ>{GaussQ::i()}).is_zero());
    CHECK((x - x).is_zero());
    CHECK((x * x + one).str() == "(1)*x^2 + (1)");

    std::vector<std::string> xy{"x", "y"};
    auto X = LaurentPoly::variable(xy, "x"), Y = LaurentPoly::variable(xy, "y");
    auto c1 = LaurentPoly::constant(xy, GaussQ(1));
    CHECK((X * X).substitute("x", Y + c1) == Y * Y + GaussQ(2) * Y + c1);
    // negative powers need a monomial value
    CHECK(LaurentPoly::variable(xy, "x", -2).substitute("x", GaussQ(3) * Y) ==
          LaurentPoly::monomial(xy, {0, -2}, GaussQ(mpq_class(1, 9))));
    CHECK_THROWS_AS(LaurentPoly::variable(xy, "x", -1).substitute("x", Y + c1), DomainError);
    CHECK_THROWS_AS(X + x, DomainError);
    CHECK_THROWS_AS(X.degree("z"), DomainError);
    CHECK_THROWS_AS(LaurentPoly(std::vector<std::string>{"x", "x"}), DomainError);
    CHECK_THROWS_AS(LaurentPoly::variable(xy, "x", -1).evaluate(std::vector<GaussQ>{0, 1}), PoleError);

    // graded lexicographic: degree first
    GradedLex lt;
    CHECK(lt({2, 0}, {0, 3}));
    CHECK(lt({0, 1}, {1, 0}));
    CHECK(!lt({1, 0}, {1, 0}));
}

TEST_CASE("gaussian rationals") {
    GaussQ a(mpq_class(1, 2), mpq_class(-3, 4)), b(mpq_class(2, 3), 5);
    CHECK((a / b) * b == a);
    CHECK(a * a.conj() == GaussQ(a.norm2()));
    CHECK(GaussQ::i() * GaussQ::i() == GaussQ(-1));
    CHECK(pow(b, -2) * pow(b, 2) == GaussQ(1));
    CHECK(GaussQ::parse("6/4", "-2") == GaussQ(mpq_class(3, 2), -2));
    CHECK(GaussQ(mpq_class(1, 2), -1).str() == "1/2-1i");
    CHECK_THROWS_AS(a / GaussQ(0), DomainError);
    CHECK_THROWS_AS(GaussQ::parse("x"), DomainError);
}

TEST_CASE("laurent ring identities against the slow multiplier") {
    std::mt19937_64 rng(11);
    std::vector<std::string> vars{"u", "v", "w"};
    for (int fuzz = 0; fuzz < 100; ++fuzz) {
        auto a = random_poly(rng, vars), b = random_poly(rng, vars), c = random_poly(rng, vars);
        CHECK(a * b == slow_mul(a, b));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a * b == b * a);
        auto pt = nonzero_point(rng, 3);
        CHECK((a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt));
        CHECK((a - b).evaluate(pt) == a.evaluate(pt) - b.evaluate(pt));
    }
}

TEST_CASE("dimension ledger") {
    auto d1 = dims(1), d2 = dims(2), d3 = dims(3);
    CHECK(d1.singlet_dim == 1);
    CHECK(d1.irr_dim == 1);
    CHECK(d2.singlet_dim == 6 - 4);
    CHECK(d2.irr_dim == 2 - 0);
    CHECK(d3.singlet_dim == 20 - 15);
    CHECK(d3.irr_dim == 6 - 1);
    CHECK(d2.hh_exponent == 1);
    CHECK(d3.hh_exponent == 2 - 0);
    CHECK(dims(4).hh_exponent == 6 - 1);
    for (int n = 1; n <= 12; ++n) CHECK(dims(n).singlet_dim == dims(n).irr_dim);
    CHECK(dims(12).singlet_dim == 208012);  // Catalan number C_12
    CHECK(binomial(0, -2) == 0);
    CHECK(binomial(-2, -1) == 0);
    CHECK(binomial(24, 12) == 2704156);
    CHECK_THROWS_AS(dims(0), DomainError);
}

TEST_CASE("subset pairs") {
    SubsetPair p(3, 2, {4, 1}, {3});
    CHECK(p.tset == std::vector<int>{1, 4});
    CHECK(p.free_set() == std::vector<int>{2, 3, 5, 6});
    CHECK(p.free_pset() == std::vector<int>{1, 2, 4});
    CHECK_THROWS_AS(SubsetPair(2, 1, {1, 2}, {}), DomainError);
    CHECK_THROWS_AS(SubsetPair(2, 1, {5}, {}), DomainError);
    CHECK_THROWS_AS(SubsetPair(3, 1, {2, 2}, {}), DomainError);
    CHECK_THROWS_AS(SubsetPair(2, 2, {1}, {}), DomainError);
}

TEST_CASE("x kernel against the brute-force double sum") {
    std::vector<GaussQ> B{1, 2, 3, 4}, T{5, 6};
    SubsetPair p(2, 1, {1}, {});
    GaussQ ordered = x_kernel(p, B, T);
    CHECK(ordered == brute_x(2, 1, {1}, {}, B, T, false));
    CHECK(x_kernel(p, B, T, {PairReading::Distinct, XDenominator::ComplementS}) ==
          brute_x(2, 1, {1}, {}, B, T, true));

    std::mt19937_64 rng(5);
    for (auto [n, m] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 2}}) {
        auto Ts = subsets(2 * n, n - 1), Tps = subsets(2 * m, m - 1);
        for (int s = 0; s < 50; ++s) {
            auto b = rnd_vec(rng, 2 * n + 2 * m);
            std::vector<GaussQ> t(b.begin() + 2 * n, b.end());
            b.resize(2 * n);
            const auto& T1 = Ts[s % Ts.size()];
            const auto& T2 = Tps[(s / Ts.size()) % Tps.size()];
            SubsetPair sp(n, m, T1, T2);
            CHECK(x_kernel(sp, b, t) == brute_x(n, m, T1, T2, b, t, false));
            CHECK(x_kernel(sp, b, t, {PairReading::Distinct, XDenominator::ComplementS}) ==
                  brute_x(n, m, T1, T2, b, t, true));
            if (m <= n)
                CHECK(x_kernel(sp, b, t, {PairReading::Distinct, XDenominator::ComplementSPrime}) ==
                      brute_x(n, m, T1, T2, b, t, true, true));
        }
    }
}

TEST_CASE("x kernel summand symmetry and the single-element edge") {
    std::mt19937_64 rng(8);
    auto b = rnd_vec(rng, 10);
    std::vector<GaussQ> t(b.begin() + 6, b.end());
    b.resize(6);
    SubsetPair p(3, 2, {2, 5}, {1});
    // ordered sum = 2 * (sum over i1 < i2) + diagonal
    GaussQ distinct = x_kernel(p, b, t, {PairReading::Distinct, XDenominator::ComplementS});
    GaussQ ordered = x_kernel(p, b, t);
    GaussQ diag(0), upper(0);
    auto fr = p.free_set(), frp = p.free_pset();
    for (int i1 : fr)
        for (int i2 : fr) {
            GaussQ prod(1);
            for (int ip : {i1, i2}) {
                GaussQ num(1), den(1);
                for (int j : p.tset) num *= b[ip - 1] + b[j - 1];
                for (int j : p.tpset) num *= b[ip - 1] + GaussQ::i() * t[j - 1];
                for (int j : fr)
                    if (j != i1 && j != i2) den *= b[ip - 1] - b[j - 1];
                for (int j : frp) den *= b[ip - 1] - GaussQ::i() * t[j - 1];
                prod *= num / den;
            }
            if (i1 == i2) diag += prod;
            if (i1 < i2) upper += prod;
        }
    CHECK(distinct == GaussQ(2) * upper);
    CHECK(ordered == GaussQ(2) * upper + diag);

    // one free element: only the diagonal term survives
    std::vector<GaussQ> B{3, 7}, T{2, 5};
    GaussQ single = x_kernel_sets({1}, {2}, {}, {1, 2}, B, T);
    GaussQ f = (B[1] + B[0]) / ((B[1] - GaussQ::i() * T[0]) * (B[1] - GaussQ::i() * T[1]));
    CHECK(single == f * f);
    CHECK(x_kernel_sets({1}, {2}, {}, {1, 2}, B, T, {PairReading::Distinct, XDenominator::ComplementS}).is_zero());
}

TEST_CASE("x kernel poles and shape errors") {
    SubsetPair p(2, 1, {1}, {});
    CHECK_THROWS_AS(x_kernel(p, {1, 2, 2, 4}, {5, 6}), PoleError);
    CHECK_THROWS_AS(x_kernel(p, {1, 2, 3, GaussQ(0, 5)}, {5, 6}), PoleError);
    CHECK_THROWS_AS(x_kernel(p, {1, 2, 3}, {5, 6}), DomainError);
}

TEST_CASE("m polynomial against the brute-force subset sum") {
    std::mt19937_64 rng(21);
    std::vector<GaussQ> b{GaussQ(1, 1), 2, GaussQ(mpq_class(1, 3), -1), 5};
    std::vector<GaussQ> t{GaussQ(mpq_class(3, 2), 0), GaussQ(2, 1), -3, GaussQ(mpq_class(-1, 2), 2)};
    MOptions distinct;
    distinct.reading.pairs = PairReading::Distinct;
    for (const auto& opt : {MOptions{}, distinct}) {
        bool dist = opt.reading.pairs == PairReading::Distinct;
        LaurentPoly M = m_polynomial(2, 2, b, t, opt);
        REQUIRE(M.variables() == std::vector<std::string>{"A1", "S1"});
        std::vector<GaussQ> A{GaussQ(mpq_class(2, 7), 1)}, S{GaussQ(-1, mpq_class(1, 3))};
        CHECK(M.evaluate(std::vector<GaussQ>{A[0], S[0]}) == brute_m(2, 2, A, S, b, t, dist));
        // the unexpanded assembly agrees with the expansion
        AssembledM am = assemble_m(2, 2, opt);
        std::vector<GaussQ> full{A[0], S[0]};
        full.insert(full.end(), b.begin(), b.end());
        full.insert(full.end(), t.begin(), t.end());
        CHECK(am.evaluate(full) == brute_m(2, 2, A, S, b, t, dist));
    }
    // (3,2) at a random point, assembled route only
    auto b3 = rnd_vec(rng, 10);
    std::vector<GaussQ> t3(b3.begin() + 6, b3.end());
    b3.resize(6);
    std::vector<GaussQ> A3{rnd(rng), rnd(rng)}, S3{rnd(rng)};
    std::vector<GaussQ> full = A3;
    full.insert(full.end(), S3.begin(), S3.end());
    full.insert(full.end(), b3.begin(), b3.end());
    full.insert(full.end(), t3.begin(), t3.end());
    MOptions o3;
    o3.reading.pairs = PairReading::Distinct;
    CHECK(assemble_m(3, 2, o3).evaluate(full) == brute_m(3, 2, A3, S3, b3, t3, true));
}

TEST_CASE("m polynomial skew symmetry") {
    std::mt19937_64 rng(33);
    MOptions opt;
    opt.reading.pairs = PairReading::Distinct;
    AssembledM m3 = assemble_m(3, 1, opt);
    AssembledM s3 = assemble_m(2, 3, opt);
    for (int s = 0; s < 20; ++s) {
        auto p = rnd_vec(rng, m3.vars.count());
        auto q = p;
        std::swap(q[m3.vars.a(1)], q[m3.vars.a(2)]);
        CHECK(m3.evaluate(q) == -m3.evaluate(p));

        auto u = rnd_vec(rng, s3.vars.count());
        auto w = u;
        std::swap(w[s3.vars.s(1)], w[s3.vars.s(2)]);
        CHECK(s3.evaluate(w) == -s3.evaluate(u));
    }
    auto b = rnd_vec(rng, 8);
    std::vector<GaussQ> t(b.begin() + 6, b.end());
    b.resize(6);
    LaurentPoly M = m_polynomial(3, 1, b, t, opt);
    CHECK(!M.is_zero());
    CHECK(M.swap_variables("A1", "A2") == -M);
}

TEST_CASE("polynomiality certification") {
    MOptions ordered, distinct;
    distinct.reading.pairs = PairReading::Distinct;
    for (auto strat : {PolyStrategy::SymbolicCancellation, PolyStrategy::Interpolation}) {
        PolynomialityOptions po{strat, 3, 3};
        CHECK(check_polynomiality(assemble_m(2, 2, distinct), po).passed);
        CHECK(check_polynomiality(assemble_m(2, 1, distinct), po).passed);
        // pairs with i1 = i2 leave double poles at B_i = B_j
        CheckReport o = check_polynomiality(assemble_m(2, 2, ordered), po);
        CHECK(!o.passed);
        CHECK(o.details["residual_term"].get<std::string>().find("along B1") != std::string::npos);
        // the S'\T' reading of X's denominators does not cancel
        MOptions sp = distinct;
        sp.reading.denominator = XDenominator::ComplementSPrime;
        CHECK(!check_polynomiality(assemble_m(2, 2, sp), po).passed);
    }
    CHECK(check_polynomiality(assemble_m(3, 2, distinct)).passed);
    CHECK(check_polynomiality(assemble_m(3, 1, distinct), {PolyStrategy::SymbolicCancellation, 5, 3}).passed);
}

TEST_CASE("polynomiality negative control: a single subset pair") {
    MOptions one;
    one.reading.pairs = PairReading::Distinct;
    one.only = std::pair{std::vector<int>{1}, std::vector<int>{1}};
    AssembledM am = assemble_m(2, 2, one);
    CHECK(am.terms.size() == 6);
    CheckReport sym = check_polynomiality(am, {PolyStrategy::SymbolicCancellation, 1, 3});
    CHECK(!sym.passed);
    std::string why = sym.details["residual_term"];
    CHECK(why.find("along B1") != std::string::npos);
    CHECK(why.find("(B1 - B") != std::string::npos);
    CHECK(!check_polynomiality(am).passed);

    // the term itself really has the pole at B1 = B2
    std::mt19937_64 rng(2);
    auto v = rnd_vec(rng, am.vars.count());
    v[am.vars.b(1)] = v[am.vars.b(2)];
    CHECK_THROWS_AS(am.evaluate(v), PoleError);
}

TEST_CASE("certify m records the reading switch and the degrees") {
    CheckReport r = certify_m(2, 2);
    CHECK(r.passed);
    CHECK(r.details["switched_to_distinct"] == true);
    CHECK(r.details["ordered_outcome"] == "failed");
    CHECK(r.details["x_denominator_readings"]["S\\T"] == "certified");
    CHECK(r.details["x_denominator_readings"]["S'\\T'"] == "failed");
    int da = r.details["degrees"]["A1"]["degree"], ds = r.details["degrees"]["S1"]["degree"];
    CHECK(da >= 1);
    CHECK(da <= r.details["degrees"]["A1"]["factor_bound"].get<int>());
    CHECK(ds >= 0);
    CHECK(ds <= r.details["degrees"]["S1"]["factor_bound"].get<int>());

    CheckReport r13 = certify_m(1, 3);
    CHECK(r13.details["x_denominator_readings"]["S'\\T'"].get<std::string>().find("not applicable") == 0);
    CHECK_THROWS_AS(assemble_m(4, 4), DomainError);
    CHECK_THROWS_AS(assemble_m(0, 1), DomainError);
}
