#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "qkzb/qkz.hpp"

using namespace qkzb;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0, 1};

QkzPoint betas(std::vector<cplx> b) { return {std::move(b), {}}; }

const std::vector<QkzPoint>& two_site_points() {
    static const std::vector<QkzPoint> pts{betas({0.4, -0.3}), betas({-0.9, 0.2}), betas({cplx(0.1, 0.2), -0.5}),
                                           betas({1.3, 1.1})};
    return pts;
}

int mat_rank(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++r;
    return r;
}

}  // namespace

TEST_CASE("singlet vectors") {
    const Anisotropy an(0.3);
    CHECK(singlet_residual(SingletVector::hatted(an), an) <= 1e-12);
    // the plain vector is the gauge preimage of -i s-hat at beta2 = beta1 - pi i
    const Vec s = SingletVector::plain().components;
    for (cplx b : {cplx(0.4), cplx(-1.0, 0.2)}) {
        const Vec img = gauge_factor(b, b - pi * I, 0.3) * s;
        CHECK((img + I * SingletVector::hatted(an).components).norm() <= 1e-12);
    }
}

TEST_CASE("singlet projector") {
    const Anisotropy an(0.3);
    const int expected[] = {1, 2, 5};
    for (int n : {1, 2, 3}) {
        CHECK(singlet_count(n) == expected[n - 1]);
        const Mat p = singlet_projector(n, an).matrix();
        const QGGenerators g = build_generators(2 * n, an, QConvention::ExpForm);
        CHECK(mat_rank(p) == expected[n - 1]);
        CHECK(std::abs(p.trace() - cplx(expected[n - 1])) <= 1e-10);
        CHECK(max_abs(p * p - p) <= 1e-12);
        for (const Mat* x : {&g.s3.matrix(), &g.splus.matrix(), &g.sminus.matrix()})
            CHECK(max_abs(p * *x - *x * p) <= 1e-10);
    }
    const Mat p1 = singlet_projector(1, an).matrix();
    const Vec s = SingletVector::hatted(an).components;
    CHECK((p1 * s - s).norm() <= 1e-12);
}

TEST_CASE("two-site scalar against the plain integral") {
    for (double nu : {0.2, 0.3, 0.4})
        for (double b : {-1.2, 0.0, 0.7}) {
            const cplx ref = oracle::two_site_scalar(b, nu);
            CHECK(std::abs(two_site_scalar(b, nu) - ref) <= 1e-10 * std::abs(ref));
        }
    // frozen from a 20-digit evaluation
    CHECK(std::abs(two_site_scalar(pi * I, 0.3) - 4.2745604682993531) <= 1e-11);
    CHECK_THROWS_AS(two_site_scalar(0.1, 0.5), DomainError);
    CHECK_THROWS_AS(two_site_scalar(cplx(0, 3 * pi), 0.3), DomainError);
}

TEST_CASE("two-site scalar functional relations") {
    const double nu = 0.3;
    const Anisotropy an(nu);
    for (cplx b : {cplx(0.7), cplx(0.3, 0.2), cplx(-1.1, -0.1)}) {
        const RMatrixValue r = r_matrix(b, an);
        const cplx rho = r.a * std::sinh(nu * (pi * I + b)) / std::sinh(nu * (pi * I - b));
        const cplx u = two_site_scalar(b, nu);
        CHECK(std::abs(u - rho * two_site_scalar(-b, nu)) <= 1e-10 * std::abs(u));
        CHECK(std::abs(two_site_scalar(b - 2 * pi * I, nu) - two_site_scalar(-b, nu)) <= 1e-10 * std::abs(u));
    }
}

TEST_CASE("level -4 two-site solution") {
    for (double nu : {0.2, 0.3, 0.45})
        for (QkzGauge gauge : {QkzGauge::Hatted, QkzGauge::Plain}) {
            const CandidateSolution c = two_site_solution(nu, gauge);
            for (const QkzPoint& p : two_site_points()) {
                INFO("nu=" << nu << " gauge=" << to_string(gauge));
                CHECK(residual_exchange(c, 1, p) <= 1e-8);
                CHECK(residual_shift(c, p) <= 1e-8);
                CHECK(residual_specialization(c, 1, p) <= 1e-8);
            }
        }
}

TEST_CASE("printed readings fail on the two-site solution") {
    QkzOptions printed;
    printed.reading = Reading::Printed;
    const QkzPoint p = betas({0.4, -0.3});
    // norm prefactor +i instead of -i: defect 2 |s-hat| = 2 sqrt 2
    CHECK(std::abs(residual_specialization(two_site_solution(0.3), 1, p, printed) - 2 * std::sqrt(2.0)) <= 1e-8);
    // plain shift without the q^{-sigma3} twist
    CHECK(residual_shift(two_site_solution(0.3, QkzGauge::Plain), p, printed) > 0.1);
}

TEST_CASE("negative controls") {
    const double nu = 0.3;
    const CandidateSolution bad = random_candidate(QkzLevel::Minus4, QkzGauge::Hatted, 1, nu, 11);
    // the solution's scalar times a vector orthogonal to the singlet
    const Vec s = SingletVector::hatted(Anisotropy(nu)).components;
    Vec perp = Vec::Zero(4);
    perp(1) = std::conj(s(2));
    perp(2) = -std::conj(s(1));
    CHECK(std::abs(s.dot(perp)) <= 1e-15);
    CandidateSolution orth = two_site_solution(nu);
    orth.evaluator = [perp, nu](const QkzPoint& p) { return Vec(two_site_scalar(p.betas[0] - p.betas[1], nu) * perp); };
    for (const QkzPoint& p : two_site_points()) {
        CHECK(residual_exchange(bad, 1, p) > 0.1);
        CHECK(residual_shift(bad, p) > 0.1);
        CHECK(residual_specialization(bad, 1, p) > 0.1);
        CHECK(residual_exchange(orth, 1, p) > 0.1);
        CHECK(residual_specialization(orth, 1, p) > 0.1);
    }
}

TEST_CASE("gauge transform") {
    const double nu = 0.3;
    const CandidateSolution c = random_candidate(QkzLevel::Minus4, QkzGauge::Plain, 2, nu, 5);
    const CandidateSolution h = gauge_transform_solution(c, GaugeDirection::Hat);
    const CandidateSolution back = gauge_transform_solution(h, GaugeDirection::Unhat);
    const QkzPoint p = betas({0.3, -0.8, 1.1, cplx(0.2, 0.1)});
    CHECK((back(p) - c(p)).norm() <= 1e-13);
    CHECK((h(betas({0, 0, 0, 0})) - c(betas({0, 0, 0, 0}))).norm() == 0);
    CHECK(h.gauge == QkzGauge::Hatted);

    // At imaginary rapidities the gauge factor is unitary, so the defects of the
    // two systems have equal norms for any candidate.
    const QkzPoint q = betas({cplx(0, 0.3), cplx(0, -0.2), cplx(0, 0.5), cplx(0, -0.6)});
    for (int j = 1; j <= 3; ++j) {
        CHECK(std::abs(residual_exchange(c, j, q) - residual_exchange(h, j, q)) <= 1e-10);
        CHECK(std::abs(residual_specialization(c, j, q) - residual_specialization(h, j, q)) <= 1e-10);
    }
    CHECK(std::abs(residual_shift(c, q) - residual_shift(h, q)) <= 1e-10);
    CHECK(residual_exchange(c, 1, q) > 0.1);

    // the two-site pair: both sets of residuals vanish together
    const CandidateSolution g = two_site_solution(nu, QkzGauge::Plain);
    const CandidateSolution gh = gauge_transform_solution(g, GaugeDirection::Hat);
    for (const QkzPoint& x : two_site_points()) {
        CHECK(std::abs(residual_exchange(g, 1, x) - residual_exchange(gh, 1, x)) <= 1e-10);
        CHECK(std::abs(residual_shift(g, x) - residual_shift(gh, x)) <= 1e-10);
        CHECK(std::abs(residual_specialization(g, 1, x) - residual_specialization(gh, 1, x)) <= 1e-10);
    }
    CHECK_THROWS_AS(gauge_transform_solution(two_site_level0(nu), GaugeDirection::Hat), DomainError);
}

TEST_CASE("double exchange is the identity") {
    const double nu = 0.3;
    const QkzPoint p{{0.4, cplx(-0.3, 0.1), 0.9}, {0.2, -0.7}};
    QkzPoint sw = p;
    std::swap(sw.betas[0], sw.betas[1]);
    for (QkzGauge g : {QkzGauge::Plain, QkzGauge::Hatted}) {
        const Mat4 x = exchange_matrix(QkzLevel::Minus4, g, p, 1, false, nu);
        const Mat4 y = exchange_matrix(QkzLevel::Minus4, g, sw, 1, false, nu);
        CHECK(max_abs(x * y - Mat4::Identity()) <= 1e-9);
    }
    QkzPoint tw = p;
    std::swap(tw.thetas[0], tw.thetas[1]);
    const Mat4 x = exchange_matrix(QkzLevel::Mixed, QkzGauge::Hatted, p, 1, true, nu);
    const Mat4 y = exchange_matrix(QkzLevel::Mixed, QkzGauge::Hatted, tw, 1, true, nu);
    CHECK(max_abs(x * y - Mat4::Identity()) <= 1e-9);
    // at coinciding rapidities R(0) = P, so the exchange operator is 1
    const Mat4 z = exchange_matrix(QkzLevel::Minus4, QkzGauge::Hatted, betas({0.5, 0.5}), 1, false, nu);
    CHECK(max_abs(z - Mat4::Identity()) <= 1e-12);
}

TEST_CASE("apply_pair against Kronecker embeddings") {
    std::mt19937_64 rng(2);
    const Mat op = oracle::random_matrix(rng, 4);
    const Mat4 m = op;
    Vec v(16);
    for (auto& c : v) c = cplx(std::normal_distribution<double>()(rng), 0.5);
    const Mat id2 = Mat::Identity(2, 2);
    CHECK((apply_pair(m, 2, 3, 4, v) - oracle::kron_chain({id2, op, id2}) * v).norm() <= 1e-12);
    CHECK((apply_pair(m, 3, 4, 4, v) - embed_pair(m, 3, 4, 4).matrix() * v).norm() <= 1e-12);
    CHECK((apply_pair(m, 4, 1, 4, v) - embed_pair(m, 4, 1, 4).matrix() * v).norm() <= 1e-12);
}

TEST_CASE("contour residues") {
    const double nu = 0.3;
    const Vec w = Vec::LinSpaced(4, 1, 4).cast<cplx>();
    CandidateSolution simple = constant_candidate(QkzLevel::Zero, QkzGauge::Hatted, 1, nu, w);
    simple.evaluator = [w](const QkzPoint& p) { return Vec(w / (p.betas[1] - p.betas[0] - 0.3)); };
    const QkzPoint p = betas({0.2, 0.0});
    CHECK((contour_residue(simple, p, 1, false, 0.5) - 2 * pi * I * w).norm() <= 1e-12);
    // no pole inside: zero
    CHECK(contour_residue(two_site_level0(nu), p, 1, false, 0.7).norm() <= 1e-8);
}

TEST_CASE("level 0 two-site solution") {
    for (double nu : {0.2, 0.3}) {
        const CandidateSolution f = two_site_level0(nu);
        for (const QkzPoint& p : two_site_points()) {
            CHECK(residual_exchange(f, 1, p) <= 1e-8);
            CHECK(residual_shift(f, p) <= 1e-8);
            // the right side is 1 - (empty product) = 0
            CHECK(residual_specialization(f, 1, p) <= 1e-8);
        }
        // finite at the would-be pole
        const Vec at = f(betas({0.1, 0.1 + pi * I}));
        CHECK(std::abs(at(1) - SingletVector::hatted(Anisotropy(nu)).components(1)) <= 1e-12);
    }
    const CandidateSolution bad = random_candidate(QkzLevel::Zero, QkzGauge::Hatted, 1, 0.3, 4);
    CHECK(residual_exchange(bad, 1, betas({0.4, -0.3})) > 0.1);
    CandidateSolution plain = bad;
    plain.gauge = QkzGauge::Plain;
    CHECK_THROWS_AS(residual_exchange(plain, 1, betas({0.4, -0.3})), DomainError);
}

TEST_CASE("level 0 residue with a pole") {
    // constant covector over a simple pole: only the residue condition can fail
    const double nu = 0.3;
    const Vec s = SingletVector::hatted(Anisotropy(nu)).components;
    CandidateSolution c = constant_candidate(QkzLevel::Zero, QkzGauge::Hatted, 1, nu, s);
    c.evaluator = [s](const QkzPoint& p) { return Vec(s / (p.betas[1] - p.betas[0] - pi * I)); };
    const double r = residual_specialization(c, 1, betas({0.3, -0.2}));
    CHECK(std::abs(r - 2 * pi * s.norm()) <= 1e-10);
}

TEST_CASE("mixed system with the psi-dressed product") {
    const double nu = 0.25;
    const CandidateSolution c = mixed_product_candidate(nu);
    const CandidateSolution bare = psi_dress(c, false);
    // betas + 2 pi i needs Im(beta - theta) near -2 pi for the psi integral
    const QkzPoint up{{0.3, -0.4}, {cplx(0.1, 1.9 * pi), cplx(-0.6, 1.9 * pi)}};
    const QkzPoint flat{{0.3, -0.4}, {0.1, -0.6}};
    QkzOptions printed;
    printed.reading = Reading::Printed;

    CHECK(residual_exchange(c, 1, up) <= 1e-8);
    CHECK(residual_exchange_theta(c, 1, flat) <= 1e-8);
    CHECK(residual_shift(c, up) <= 1e-8);
    CHECK(residual_shift_theta(c, flat) <= 1e-8);
    // exponent sign of r1 and q of r2 as displayed
    CHECK(residual_shift(c, up, printed) > 0.1);
    CHECK(residual_shift_theta(c, flat, printed) > 1e-3);
    // the undressed product lacks the tanh multipliers
    CHECK(residual_shift_theta(bare, flat) > 0.1);
    CHECK(residual_exchange_theta(bare, 1, flat) <= 1e-8);
    // a product is not a mixed solution: both normalization conditions fail
    CHECK(residual_specialization(c, 1, up) > 0.1);
    CHECK(residual_specialization_theta(c, flat) > 0.1);
    CHECK_THROWS_AS(residual_shift(c, flat), DomainError);  // outside the psi strip
    CHECK_THROWS_AS(mixed_product_candidate(0.4), DomainError);
}

TEST_CASE("tanh multiplier zero") {
    const double nu = 0.3;
    CandidateSolution c;
    c.name = "mixed-constant";
    c.level = QkzLevel::Mixed;
    c.n = c.m = 1;
    c.nu = nu;
    c.continuation = Continuation::Analytic;
    c.evaluator = [](const QkzPoint& p) { return Vec(Vec::LinSpaced(16, 1, 16).cast<cplx>() * std::exp(p.betas[1])); };
    const cplx b2 = 0.4;
    const QkzPoint p{{-0.2, b2}, {b2 + pi * I / 2.0, 0.9}};
    const Vec shifted = c(QkzPoint{{-0.2, b2 + 2 * pi * I}, p.thetas});
    for (Reading r : {Reading::Consistent, Reading::Printed}) {
        QkzOptions o;
        o.reading = r;
        CHECK(std::abs(residual_shift(c, p, o) - shifted.norm()) <= 1e-12 * shifted.norm());
    }
}

TEST_CASE("continuation policy and missing lower candidates") {
    CandidateSolution c = random_candidate(QkzLevel::Minus4, QkzGauge::Hatted, 1, 0.3, 2);
    c.continuation = Continuation::Refuse;
    CHECK_THROWS_AS(residual_shift(c, betas({0.1, 0.2})), DomainError);
    CHECK_NOTHROW(residual_exchange(c, 1, betas({0.1, 0.2})));
    c.lower.reset();
    CHECK_THROWS_AS(residual_specialization(c, 1, betas({0.1, 0.2})), DomainError);
    CHECK_THROWS_AS(c(betas({0.1, 0.2, 0.3, 0.4})), DomainError);
}

TEST_CASE("candidate reports") {
    for (const std::string& name : {std::string("two-site"), std::string("two-site-plain"), std::string("two-site-level0")}) {
        for (const CheckReport& r : check_candidate(builtin_candidate(name, 0.3))) {
            INFO(name << " " << r.name);
            CHECK(r.passed);
        }
    }
    bool any_fail = false;
    for (const CheckReport& r : check_candidate(builtin_candidate("random", 0.3))) any_fail = any_fail || !r.passed;
    CHECK(any_fail);
    const auto mixed = check_candidate(builtin_candidate("mixed-product", 0.25));
    CHECK(mixed.size() == 6);
    CHECK_THROWS_AS(builtin_candidate("nope", 0.3), DomainError);
}
