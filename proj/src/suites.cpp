#include "qkzb/suites.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "qkzb/correlator.hpp"
#include "qkzb/hyperelliptic.hpp"
#include "qkzb/pairing.hpp"
#include "qkzb/poly.hpp"
#include "qkzb/qkz.hpp"
#include "qkzb/quantum_group.hpp"
#include "qkzb/rmatrix.hpp"
#include "qkzb/special.hpp"

#ifndef QKZB_DATA_DIR
#define QKZB_DATA_DIR "data"
#endif

namespace qkzb {

namespace {

const double pi = 3.14159265358979323846;
const cplx I(0, 1);

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

std::string tag(std::initializer_list<std::pair<const char*, std::string>> kv) {
    std::string s = "[";
    bool first = true;
    for (const auto& [k, v] : kv) {
        s += (first ? "" : ",") + std::string(k) + "=" + v;
        first = false;
    }
    return s + "]";
}

std::vector<double> nus_or(const RunConfig& c, std::vector<double> d) { return c.nu.empty() ? d : c.nu; }
std::vector<int> ns_or(const RunConfig& c, std::vector<int> d) { return c.n.empty() ? d : c.n; }
int samples_or(const RunConfig& c, int d) { return c.samples > 0 ? c.samples : d; }

QuadratureSpec quad_of(const RunConfig& c) {
    QuadratureSpec q;
    if (c.quad_tol > 0) q.tol = c.quad_tol;
    return q;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json mat_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(cplx_json(m(i, j)));
        rows.push_back(r);
    }
    return rows;
}

// A check that threw: failed, with the message.
CheckReport errored(const std::string& name, const std::exception& e, double tol) {
    CheckReport r = make_report(name, std::numeric_limits<double>::infinity(), tol, 0);
    r.passed = false;
    r.details["error"] = e.what();
    return r;
}

template <class F>
void guarded(std::vector<CheckReport>& out, const std::string& name, double tol, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        out.push_back(errored(name, e, tol));
    }
}

// ---- ybe --------------------------------------------------------------------

std::vector<CheckReport> suite_ybe(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const int ns = samples_or(cfg, 100);
    for (double nu : nus_or(cfg, {0.1, 0.3, 0.5, 0.7})) {
        const Anisotropy an(nu);
        const std::string t = tag({{"nu", fmt(nu)}});
        const YbeOptions o{ns, cfg.seed, cfg.tol("ybe", 1e-10), 1.0};
        auto add = [&](const std::string& name, auto&& evaluator) {
            guarded(out, name + t, o.tol, [&] {
                CheckReport r = check_ybe(evaluator, o);
                r.name = name + t;
                out.push_back(r);
            });
        };
        add("ybe.r_matrix", DifferenceEvaluator([&](cplx b) { return r_matrix(b, an).entries; }));
        add("ybe.gauge_r", PairEvaluator([&](cplx a, cplx b) { return gauge_r(a, b, an); }));
        const Mat4 rq = constant_rq(an);
        add("ybe.constant_rq", DifferenceEvaluator([&](cplx) { return rq; }));
        add("ybe.s_matrix", DifferenceEvaluator([&](cplx b) { return s_matrix(b, an).entries; }));
        add("ybe.gauge_s", PairEvaluator([&](cplx a, cplx b) { return gauge_s(a, b, an); }));

        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> re(-2, 2), im(-0.5, 0.5);
        double refl = 0, unit = 0;
        const int nr = samples_or(cfg, 50);
        const Mat4 P = permutation4();
        for (int s = 0; s < nr; ++s) {
            const cplx b(re(rng), im(rng));
            refl = std::max(refl, std::abs(r0(b, nu) * r0(-b, nu) - 1.0));
            const Mat4 r21 = P * r_matrix(-b, an).entries * P;
            unit = std::max(unit, max_abs(r_matrix(b, an).entries * r21 - Mat4::Identity()));
        }
        out.push_back(make_report("r0.reflection" + t, refl, cfg.tol("r0.reflection", 1e-10), nr));
        out.push_back(make_report("r.unitarity" + t, unit, cfg.tol("r.unitarity", 1e-9), nr));
    }
    return out;
}

// ---- quantum group ----------------------------------------------------------

std::vector<CheckReport> suite_qg(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (double nu : nus_or(cfg, {0.1, 0.3, 0.7}))
        for (int sites : ns_or(cfg, {2, 3, 4, 5, 6})) {
            const Anisotropy an(nu);
            const std::string t = tag({{"N", std::to_string(sites)}, {"nu", fmt(nu)}});
            const double tol = cfg.tol("qg.calibration", 1e-10);
            guarded(out, "qg.calibration" + t, tol, [&] {
                CalibrationReport cal = calibrate_invariance(sites, an, tol);
                double best = std::numeric_limits<double>::infinity(), s3 = 0;
                json working = json::array();
                for (const auto& e : cal.entries) {
                    best = std::min(best, std::max(e.splus_residual, e.sminus_residual));
                    s3 = std::max(s3, e.s3_residual);
                    if (e.commutes) working.push_back({{"coefficient", e.coeff_label}, {"convention", to_string(e.convention)}});
                }
                CheckReport r = make_report("qg.calibration" + t, best, tol, static_cast<int>(cal.entries.size()));
                r.details["working"] = working;
                out.push_back(r);
                out.push_back(make_report("qg.s3" + t, s3, cfg.tol("qg.s3", 1e-12), static_cast<int>(cal.entries.size())));
            });
            const QGGenerators g = build_generators(sites, an);
            const ChainOperator periodic = build_hxxz({sites, an.delta(), Boundary::Periodic, 0});
            const double c = std::max(max_abs(commutator(periodic, g.splus).matrix()),
                                      max_abs(commutator(periodic, g.sminus).matrix()));
            out.push_back(make_negative_control("qg.periodic_control" + t, c, 0.1, 1));
        }
    return out;
}

std::vector<CheckReport> suite_spectrum(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (double nu : nus_or(cfg, {0.1, 0.3, 0.7}))
        for (int sites : ns_or(cfg, {2, 3, 4, 5, 6})) {
            const Anisotropy an(nu);
            const std::string name = "spectrum.multiplets" + tag({{"N", std::to_string(sites)}, {"nu", fmt(nu)}});
            const double tol = cfg.tol("spectrum", 1e-9);
            guarded(out, name, tol, [&] {
                auto ev = spectrum(build_hrxxz({sites, an.delta(), Boundary::OpenWithBoundaryTerm,
                                                default_boundary_coeff(an.delta())}));
                double im = 0;
                for (auto e : ev) im = std::max(im, std::abs(e.imag()));
                const auto got = degeneracies(ev, 1e-7), want = expected_multiplets(sites);
                CheckReport r = make_report(name, im, tol, static_cast<int>(ev.size()));
                r.details["max_imag"] = im;
                r.details["multiplets"] = got;
                r.details["expected"] = want;
                if (got != want) r.passed = false;
                out.push_back(r);
            });
        }
    return out;
}

// ---- special functions ------------------------------------------------------

std::vector<CheckReport> suite_special(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const QuadratureSpec q = quad_of(cfg);
    const int ns = samples_or(cfg, 20);
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(-1, 1);
        double shift_printed = 0, prod_printed = 0, shift_obs = 0, prod_spread = 0;
        cplx first = 0;
        for (int s = 0; s < ns; ++s) {
            const double b = u(rng), th = u(rng);
            const cplx p0 = psi(b, th, q), p1 = psi(b, th + pi * I, q), p2 = psi(b, th + 2 * pi * I, q);
            const cplx ratio = p2 / p0;
            shift_printed = std::max(shift_printed, std::abs(ratio - std::tanh((th - b + pi * I / 2.0) / 2.0)));
            shift_obs = std::max(shift_obs, std::abs(ratio - std::tanh((b - th - pi * I / 2.0) / 2.0)));
            const cplx prod = p0 * p1 * (std::exp(b) - I * std::exp(th));
            prod_printed = std::max(prod_printed, std::abs(prod - 1.0));
            if (s == 0) first = prod;
            prod_spread = std::max(prod_spread, std::abs(prod - first));
        }
        const double tol = cfg.tol("psi", 1e-8);
        CheckReport a = make_report("psi.shift_printed", shift_printed, tol, ns);
        mark_deviation(a, "the integral gives psi(b, t + 2 pi i)/psi(b, t) = tanh((b - t - pi i/2)/2); see psi.shift_observed");
        CheckReport b = make_report("psi.product_printed", prod_printed, tol, ns);
        mark_deviation(b, "psi(b,t) psi(b,t+pi i)(e^b - i e^t) is a constant other than 1; see psi.product_constant");
        CheckReport c = make_report("psi.shift_observed", shift_obs, tol, ns);
        CheckReport d = make_report("psi.product_constant", prod_spread, tol, ns);
        d.details["constant"] = cplx_json(first);
        for (auto* r : {&a, &b, &c, &d}) out.push_back(*r);
    }
    for (double nu : nus_or(cfg, {0.2, 0.3, 0.5})) {
        const std::string t = tag({{"nu", fmt(nu)}});
        guarded(out, "chi.series" + t, 1e-8, [&] {
            ChiSeries s = chi_series(nu, 20, q);
            double w = 0;
            int cnt = 0;
            for (int i = -5; i <= 5; ++i, ++cnt) w = std::max(w, std::abs(s(0.1 * i) - chi(0.1 * i, nu, q)));
            CheckReport r = make_report("chi.series" + t, w, cfg.tol("chi.series", 1e-8), cnt);
            r.details["radius"] = s.radius;
            out.push_back(r);
        });
        guarded(out, "chi.log_derivative" + t, 1e-7, [&] {
            PhiKernel k(nu);
            const double h = 1e-4;
            auto lr = [&](double a) { return k.reduced_residue(a - I * pi / 2.0) - k.reduced_residue(a + I * pi / 2.0); };
            double w = 0;
            const std::vector<double> alphas{0.4, 0.6, 0.8, 1.0, 1.3, 1.6, 2.0, 2.5, 3.0, 4.0};
            for (double a : alphas) w = std::max(w, std::abs((lr(a + h) - lr(a - h)) / (2 * h) - chi(a, nu, q)));
            out.push_back(make_report("chi.log_derivative" + t, w, cfg.tol("chi.log_derivative", 1e-7),
                                      static_cast<int>(alphas.size())));
        });
        double sym = 0;
        for (double a : {0.2, 0.9, 2.5}) sym = std::max(sym, std::abs(chi(a, nu, q) - chi(-a, nu, q)));
        out.push_back(make_report("chi.even" + t, sym, cfg.tol("chi.even", 1e-10), 3));

        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(-1, 1);
        double ps = 0;
        for (int s = 0; s < ns; ++s) {
            const double a = u(rng), b = u(rng);
            const cplx x = phi(a, b, nu, q), y = phi(b, a, nu, q);
            ps = std::max(ps, std::abs(x - y) / std::abs(x));
        }
        ps = std::max(ps, std::abs(phi(0, 0, nu, q) - 1.0));
        out.push_back(make_report("phi.symmetry" + t, ps, cfg.tol("phi.symmetry", 1e-12), ns + 1));
    }
    double fd = 0;
    const std::vector<cplx> thetas{1.2, 0.3, 2.0, cplx(-0.9, 0.2), cplx(0.5, -0.4)};
    for (cplx th : thetas) {
        const double h = 1e-5;
        const cplx d = (dispersion(th + h).momentum - dispersion(th - h).momentum) / (2 * h);
        fd = std::max(fd, std::abs(d - dispersion(th).energy));
    }
    out.push_back(make_report("dispersion.derivative", fd, cfg.tol("dispersion", 1e-8), static_cast<int>(thetas.size())));
    return out;
}

// ---- deformed Riemann relations ---------------------------------------------

std::vector<cplx> random_betas(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(-0.3, 0.3);
    std::vector<cplx> b;
    while (static_cast<int>(b.size()) < 2 * n) {
        const cplx x{re(rng), im(rng)};
        bool far = true;
        for (const cplx& y : b) far = far && std::abs(x - y) > 0.2;
        if (far) b.push_back(x);
    }
    return b;
}

std::vector<CheckReport> suite_riemann(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const int sets = samples_or(cfg, 5);
    for (int n : ns_or(cfg, {2, 3}))
        for (double nu : nus_or(cfg, {0.2, 0.3})) {
            const std::string t = tag({{"n", std::to_string(n)}, {"nu", fmt(nu)}});
            const double tol = cfg.tol("riemann", 1e-6);
            guarded(out, "riemann.deformed" + t, tol, [&] {
                std::mt19937_64 rng(cfg.seed * 1000 + static_cast<std::uint64_t>(n));
                double rel = 0, inv = 0;
                json per_set = json::array();
                for (int s = 0; s < sets; ++s) {
                    const PairingSpec sp{RapiditySet(random_betas(rng, n)), nu};
                    const PairingEngine eng(sp, 2 * n - 3, 2 * n - 2);
                    const PolyBasisPair bp = build_bases(eng);
                    const CheckReport r = check_deformed_riemann(bp, eng, tol);
                    rel = std::max(rel, r.residual);
                    per_set.push_back(r.residual);
                    const PeriodMatrix p = period_matrix(bp, eng);
                    if (p.entries.size() == 0) continue;
                    const PeriodMatrix pi_ = invert_period(bp, eng, tol);
                    inv = std::max(inv, max_abs(p.entries * pi_.entries -
                                                Mat::Identity(p.entries.rows(), p.entries.cols())));
                }
                CheckReport a = make_report("riemann.deformed" + t, rel, tol, sets);
                a.details["per_set"] = per_set;
                out.push_back(a);
                out.push_back(make_report("riemann.inverse" + t, inv, cfg.tol("riemann.inverse", 1e-6), sets));
            });
        }
    return out;
}

// ---- qKZ --------------------------------------------------------------------

std::vector<CheckReport> suite_qkz(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (double nu : nus_or(cfg, {0.3})) {
        const std::string t = tag({{"nu", fmt(nu)}});
        QkzCheckOptions o;
        o.samples = samples_or(cfg, 4);
        o.seed = cfg.seed;
        o.tol = cfg.tol("qkz", 1e-8);
        for (const std::string name : {"two-site", "two-site-plain", "two-site-level0"}) {
            guarded(out, "qkz[" + name + "]" + t, o.tol, [&] {
                for (CheckReport r : check_candidate(builtin_candidate(name, nu), o)) {
                    r.name = r.name + tag({{"candidate", name}, {"nu", fmt(nu)}});
                    out.push_back(r);
                }
            });
        }
        guarded(out, "qkz.random_control" + t, 0.1, [&] {
            double worst = 0;
            for (const CheckReport& r : check_candidate(builtin_candidate("random", nu), o))
                worst = std::max(worst, r.residual);
            out.push_back(make_negative_control("qkz.random_control" + t, worst, 0.1, o.samples));
        });
        // plain vs hatted: the constructed solution everywhere, and a random
        // constant at imaginary rapidities where the gauge factor is unitary
        guarded(out, "qkz.gauge_equivalence" + t, 1e-10, [&] {
            const CandidateSolution hat = two_site_solution(nu, QkzGauge::Hatted);
            const CandidateSolution rnd = random_candidate(QkzLevel::Minus4, QkzGauge::Hatted, 1, nu, cfg.seed);
            std::mt19937_64 rng(cfg.seed);
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            double w = 0;
            for (const CandidateSolution* c : {&hat, &rnd}) {
                const CandidateSolution plain = gauge_transform_solution(*c, GaugeDirection::Unhat);
                for (int s = 0; s < o.samples; ++s) {
                    QkzPoint p;
                    if (c == &hat) p.betas = {cplx(u(rng), u(rng)), cplx(u(rng), u(rng))};
                    else p.betas = {cplx(0, u(rng)), cplx(0, u(rng))};
                    w = std::max(w, std::abs(residual_exchange(*c, 1, p) - residual_exchange(plain, 1, p)));
                    w = std::max(w, std::abs(residual_shift(*c, p) - residual_shift(plain, p)));
                    w = std::max(w, std::abs(residual_specialization(*c, 1, p) - residual_specialization(plain, 1, p)));
                }
            }
            out.push_back(make_report("qkz.gauge_equivalence" + t, w, cfg.tol("qkz.gauge_equivalence", 1e-10),
                                      2 * o.samples));
        });
    }
    return out;
}

// ---- M polynomial -----------------------------------------------------------

std::vector<GaussQ> random_gauss_point(std::mt19937_64& rng, int k) {
    std::uniform_int_distribution<int> num(-20, 20), den(1, 7);
    std::vector<GaussQ> v;
    while (static_cast<int>(v.size()) < k) {
        GaussQ x(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
        bool clash = false;
        for (const auto& y : v) clash = clash || x == y || x == -y || x == GaussQ::i() * y || y == GaussQ::i() * x;
        if (!clash) v.push_back(x);
    }
    return v;
}

std::vector<CheckReport> suite_mpoly(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    auto sizes = cfg.nm.empty() ? std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}} : cfg.nm;
    const int ns = samples_or(cfg, 20);
    for (auto [n, m] : sizes) {
        const std::string t = tag({{"n", std::to_string(n)}, {"m", std::to_string(m)}});
        guarded(out, "mpoly.certify" + t, 0, [&] {
            CheckReport r = certify_m(n, m, {PolyStrategy::Interpolation, cfg.seed, 3});
            r.name = "mpoly.certify" + t;
            out.push_back(r);
        });
        MOptions distinct;
        distinct.reading.pairs = PairReading::Distinct;
        guarded(out, "mpoly.symbolic" + t, 0, [&] {
            CheckReport r = check_polynomiality(assemble_m(n, m, distinct), {PolyStrategy::SymbolicCancellation, cfg.seed, 3});
            r.name = "mpoly.symbolic" + t;
            out.push_back(r);
        });
        guarded(out, "mpoly.skew" + t, 0, [&] {
            AssembledM am = assemble_m(n, m, distinct);
            std::mt19937_64 rng(cfg.seed);
            int bad = 0, checked = 0;
            for (int s = 0; s < ns; ++s) {
                auto p = random_gauss_point(rng, am.vars.count());
                const GaussQ base = am.evaluate(p);
                if (n >= 3) {
                    auto q = p;
                    std::swap(q[am.vars.a(1)], q[am.vars.a(2)]);
                    bad += am.evaluate(q) != -base;
                    ++checked;
                }
                if (m >= 3) {
                    auto q = p;
                    std::swap(q[am.vars.s(1)], q[am.vars.s(2)]);
                    bad += am.evaluate(q) != -base;
                    ++checked;
                }
            }
            CheckReport r = make_report("mpoly.skew" + t, bad, 0, checked);
            if (checked == 0) r.details["note"] = "a single A and a single S: nothing to swap";
            out.push_back(r);
        });
    }
    return out;
}

// ---- dimensions -------------------------------------------------------------

std::vector<CheckReport> suite_dims(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const auto ns = ns_or(cfg, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    int bad = 0;
    json table = json::array();
    for (int n : ns) {
        const DimensionLedger d = dims(n);
        bad += d.singlet_dim != d.irr_dim;
        table.push_back({{"n", n}, {"singlet", d.singlet_dim}, {"irreducible", d.irr_dim}, {"hh_exponent", d.hh_exponent}});
    }
    CheckReport r = make_report("dims.identity", bad, 0, static_cast<int>(ns.size()));
    r.details["table"] = table;
    out.push_back(r);
    const Anisotropy an(0.3);
    for (int n : ns) {
        if (n > 3) continue;
        const std::string name = "dims.singlet_rank" + tag({{"n", std::to_string(n)}});
        guarded(out, name, 0, [&] {
            Eigen::JacobiSVD<Mat> svd(singlet_projector(n, an).matrix());
            int rank = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()(i) > 1e-8;
            CheckReport c = make_report(name, std::abs(rank - static_cast<int>(dims(n).singlet_dim)), 0, 1);
            c.details["rank"] = rank;
            out.push_back(c);
        });
    }
    return out;
}

// ---- hyperelliptic ----------------------------------------------------------

std::vector<CheckReport> suite_periods(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    PeriodOptions merom;
    merom.allow_meromorphic = true;
    guarded(out, "periods.genus1", 1e-8, [&] {
        struct Cfg {
            double k, s, t;
        };
        double w = 0, leg = 0;
        json mats = json::array();
        for (auto [k, s, t] : {Cfg{0.37, 1, 0}, Cfg{0.2, 1, 0}, Cfg{0.85, 1, 0}, Cfg{0.6, 2.5, -0.7}, Cfg{0.45, 0.4, 3.0}}) {
            std::vector<cplx> e;
            for (double x : {-1 / k, -1.0, 1.0, 1 / k}) e.push_back(s * x + t);
            HyperellipticCurve curve(e);
            const double kp = std::sqrt(1 - k * k);
            const double K = std::comp_ellint_1(k), Kp = std::comp_ellint_1(kp);
            const double E = std::comp_ellint_2(k), Ep = std::comp_ellint_2(kp);
            auto r = periods(curve, {{1.0}}, CycleBasis::standard(curve));
            w = std::max(w, std::abs(r.values(0, 0) - cplx(0, -2 * k * Kp / s)));
            w = std::max(w, std::abs(r.values(0, 1) - cplx(4 * k * K / s, 0)));
            mats.push_back({{"k", k}, {"scale", s}, {"shift", t}, {"periods", mat_json(r.values)}});
            if (s == 1 && t == 0) {
                auto r2 = periods(curve, {{1.0}, {0, 0, 1.0}}, CycleBasis::standard(curve), merom);
                const double K_ = r2.values(0, 1).real() / (4 * k);
                const double Kp_ = (I * r2.values(0, 0) / (2 * k)).real();
                const double Ep_ = (I * r2.values(1, 0) * k / 2.0).real();
                const double E_ = K_ - k * r2.values(1, 1).real() / 4;
                w = std::max({w, std::abs(E_ - E), std::abs(Ep_ - Ep)});
                leg = std::max(leg, std::abs(E_ * Kp_ + Ep_ * K_ - K_ * Kp_ - pi / 2));
            }
        }
        CheckReport r = make_report("periods.genus1", w, cfg.tol("periods.genus1", 1e-8), 5);
        r.details["period_matrices"] = mats;
        out.push_back(r);
        out.push_back(make_report("periods.legendre", leg, cfg.tol("periods.legendre", 1e-10), 3));
    });
    guarded(out, "periods.genus2_bilinear", 1e-8, [&] {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> u(-3, 3);
        double w = 0;
        json mats = json::array();
        const int sets = samples_or(cfg, 3);
        for (int s = 0; s < sets; ++s) {
            std::vector<cplx> e;
            while (e.size() < 6) {
                const double x = u(rng);
                bool far = true;
                for (cplx y : e) far = far && std::abs(x - y.real()) > 0.05;
                if (far) e.push_back(x);
            }
            HyperellipticCurve curve(e);
            auto bd = bilinear_data(curve);
            auto p = periods(curve, bd.differentials, CycleBasis::standard(curve), merom);
            CheckReport r = check_classical_riemann(p.values, bd.residue_pairing, 2);
            w = std::max(w, r.residual);
            json bp = json::array();
            for (cplx z : curve.branch_points()) bp.push_back(z.real());
            mats.push_back({{"branch_points", bp}, {"periods", mat_json(p.values)}, {"residual", r.residual}});
        }
        CheckReport r = make_report("periods.genus2_bilinear", w, cfg.tol("periods.genus2_bilinear", 1e-8), sets);
        r.details["curves"] = mats;
        out.push_back(r);
    });
    guarded(out, "periods.genus1_bilinear", 1e-8, [&] {
        HyperellipticCurve curve({-1 / 0.37, -1.0, 1.0, 1 / 0.37});
        auto bd = bilinear_data(curve);
        auto p = periods(curve, bd.differentials, CycleBasis::standard(curve), merom);
        CheckReport r = check_classical_riemann(p.values, bd.residue_pairing, 1, cfg.tol("periods.genus1_bilinear", 1e-8));
        r.name = "periods.genus1_bilinear";
        out.push_back(r);
    });
    return out;
}

std::vector<CheckReport> suite_classical(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    auto nus = nus_or(cfg, {0.05, 0.02, 0.01});
    std::sort(nus.begin(), nus.end(), std::greater<>());
    const std::vector<double> b{0.6, 1.0, 1.7, 2.9};
    auto spec_at = [&](double nu) {
        std::vector<cplx> betas;
        for (double x : b) betas.push_back(std::log(x) / (2 * nu));
        return PairingSpec{RapiditySet(betas), nu};
    };
    std::vector<double> gaps;
    for (double nu : nus) {
        const std::string name = "classical.gap" + tag({{"nu", fmt(nu)}});
        guarded(out, name, 0.05, [&] {
            ClassicalLimit cl = classical_limit_pairing({1.0}, spec_at(nu), 1);
            CheckReport r = make_report(name, cl.gap, cfg.tol("classical.gap", 0.05), 1);
            r.details["deformed"] = cplx_json(cl.deformed);
            r.details["classical"] = cplx_json(cl.classical);
            r.details["log_scale"] = cl.log_scale;
            r.details["phi_constant"] = cl.phi_constant;
            r.details["ratio"] = cplx_json(cl.deformed / (cl.normalization * cl.classical));
            out.push_back(r);
            gaps.push_back(cl.gap);
        });
    }
    if (gaps.size() == nus.size() && gaps.size() >= 2) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < gaps.size(); ++i) worst = std::max(worst, gaps[i] - gaps[i - 1]);
        CheckReport r = make_report("classical.monotone", worst, 0, static_cast<int>(gaps.size()));
        r.passed = worst < 0;
        r.details["gaps"] = gaps;
        out.push_back(r);
    }
    guarded(out, "classical.zero", 0, [&] {
        ClassicalLimit z = classical_limit_pairing({0.0}, spec_at(nus.back()), 1);
        out.push_back(make_report("classical.zero", std::abs(z.deformed) + std::abs(z.classical), 0, 1));
    });
    return out;
}

// ---- correlator -------------------------------------------------------------

std::vector<CheckReport> suite_correlator(const RunConfig& cfg) {
    std::vector<CheckReport> out;
    const std::string dir = cfg.data_dir.empty() ? std::string(QKZB_DATA_DIR) : cfg.data_dir;
    for (double nu : nus_or(cfg, {0.3})) {
        const std::string t = tag({{"nu", fmt(nu)}});
        guarded(out, "correlator.n1" + t, 1e-8, [&] {
            N1Result r = derive_n1(Anisotropy(nu), Specialization::Reduction, cfg.tol("correlator.n1.residuals", 1e-8));
            double res = 0;
            for (const auto& rep : r.residuals) res = std::max(res, rep.residual);
            CheckReport a = make_report("correlator.n1.residuals" + t, res, cfg.tol("correlator.n1.residuals", 1e-8),
                                        static_cast<int>(r.residuals.size()));
            a.details["scale"] = cplx_json(r.scale);
            a.details["hatted"] = mat_json(r.hatted.transpose());
            a.details["plain"] = mat_json(r.plain.transpose());
            a.details["specialization"] = to_string(r.specialization);
            a.details["note"] = "defined up to the omitted prod zeta^{-1} prefactor";
            out.push_back(a);
            out.push_back(make_report("correlator.n1.singlet_complement" + t, r.singlet_complement,
                                      cfg.tol("correlator.n1.singlet_complement", 1e-10), 1));
            out.push_back(make_report("correlator.n1.lambda_independence" + t, r.lambda_spread,
                                      cfg.tol("correlator.n1.lambda_independence", 1e-12), 2));
            ChiExpansion table = ChiExpansion::load(dir + "/q_table_n1.json");
            double tw = 0;
            for (double lam : {0.0, 0.7, -1.3}) tw = std::max(tw, (eval_expansion(table, {lam}, nu) - r.plain).norm());
            out.push_back(make_report("correlator.n1.table" + t, tw, cfg.tol("correlator.n1.table", 1e-12), 3));
            LimitOptions lo;
            lo.deltas = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
            LimitResult lim = limit_specialize(two_site_solution(nu), {0.3}, lo);
            CheckReport l = make_report("correlator.n1.limit" + t, (lim.value - r.hatted).norm(),
                                        cfg.tol("correlator.n1.limit", 1e-8), static_cast<int>(lo.deltas.size()));
            l.details["extrapolation_error"] = lim.error;
            out.push_back(l);
        });
    }
    return out;
}

using SuiteFn = std::vector<CheckReport> (*)(const RunConfig&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r{
        {"ybe", suite_ybe},           {"qg-invariance", suite_qg},    {"spectrum", suite_spectrum},
        {"special-fns", suite_special}, {"riemann", suite_riemann},    {"qkz-check", suite_qkz},
        {"mpoly", suite_mpoly},       {"dims", suite_dims},           {"periods", suite_periods},
        {"classical-limit", suite_classical}, {"correlator-n1", suite_correlator}};
    return r;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
    auto to_int = [&](const std::string& s) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(s, &pos);
        } catch (const std::exception&) {
            throw DomainError("not an integer list: '" + text + "'");
        }
        if (pos != s.size()) throw DomainError("not an integer list: '" + text + "'");
        return v;
    };
    std::vector<int> out;
    auto dots = text.find("..");
    if (dots != std::string::npos) {
        int a = to_int(text.substr(0, dots)), b = to_int(text.substr(dots + 2));
        if (b < a) throw DomainError("empty range '" + text + "'");
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item));
    if (out.empty()) throw DomainError("empty integer list");
    return out;
}

double RunConfig::tol(const std::string& check, double fallback) const {
    std::size_t best = 0;
    double v = fallback;
    for (const auto& [prefix, t] : tolerances)
        if (check.rfind(prefix, 0) == 0 && prefix.size() >= best) {
            best = prefix.size();
            v = t;
        }
    return v;
}

json RunConfig::to_json() const {
    json nmj = json::array();
    for (auto [a, b] : nm) nmj.push_back({a, b});
    json seed_j = seed;
    return json{{"nu", nu},         {"n", n},               {"nm", nmj},           {"samples", samples},
                {"seed", seed_j},   {"tolerances", tolerances}, {"quad_tol", quad_tol}, {"data_dir", data_dir},
                {"output", output}};
}

void RunConfig::merge_json(const json& j) {
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    RunConfig next = *this;
    next.merge_into(j);
    *this = std::move(next);
}

void RunConfig::merge_into(const json& j) {
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "nu") {
                nu = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            } else if (key == "n") {
                if (v.is_string()) n = parse_int_list(v.get<std::string>());
                else n = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
            } else if (key == "nm") {
                nm.clear();
                for (const auto& p : v) {
                    if (!p.is_array() || p.size() != 2) throw DomainError("nm entries are [n, m] pairs");
                    nm.emplace_back(p[0].get<int>(), p[1].get<int>());
                }
            } else if (key == "samples") {
                samples = v.get<int>();
            } else if (key == "seed") {
                seed = v.get<std::uint64_t>();
            } else if (key == "tolerances") {
                for (const auto& [k, t] : v.items()) tolerances[k] = t.get<double>();
            } else if (key == "quad_tol") {
                quad_tol = v.get<double>();
            } else if (key == "data_dir") {
                data_dir = v.get<std::string>();
            } else if (key == "output") {
                output = v.get<std::string>();
            } else {
                throw DomainError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed config: ") + e.what());
    }
    if (samples < 0) throw DomainError("samples must be >= 0");
    for (double x : nu)
        if (!(x > 0 && x < 1)) throw DomainError("nu values must be in (0,1)");
}

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
}

std::vector<CheckReport> run_suite(const std::string& name, const RunConfig& cfg) {
    std::vector<CheckReport> out;
    for (const auto& [n, fn] : registry())
        if (name == "all" || name == n) {
            auto r = fn(cfg);
            out.insert(out.end(), r.begin(), r.end());
            if (name != "all") break;
        }
    if (out.empty() && name != "all") {
        bool known = false;
        for (const auto& [n, fn] : registry()) known = known || n == name;
        if (!known) throw DomainError("unknown suite '" + name + "'");
    }
    std::stable_sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
    return out;
}

CheckReport make_negative_control(std::string name, double residual, double threshold, int samples) {
    CheckReport r = make_report(std::move(name), residual, threshold, samples);
    r.passed = std::isfinite(residual) && residual > threshold;
    r.details["negative_control"] = true;
    return r;
}

void mark_deviation(CheckReport& r, const std::string& reason) { r.details["documented_deviation"] = reason; }

bool counts_as_failure(const CheckReport& r) { return !r.passed && !r.details.contains("documented_deviation"); }

json suite_report(const std::string& suite, const RunConfig& cfg, const std::vector<CheckReport>& reports,
                  double runtime_s) {
    json checks = json::array();
    int passed = 0, failed = 0, deviations = 0;
    for (const auto& r : reports) {
        json c = r.to_json();
        // JSON has no infinity; a check that threw reports residual null
        if (!std::isfinite(r.residual)) c["residual"] = nullptr;
        checks.push_back(c);
        if (r.passed) ++passed;
        else if (counts_as_failure(r)) ++failed;
        else ++deviations;
    }
    return json{{"schema_version", kReportSchemaVersion},
                {"tool", kToolName},
                {"suite", suite},
                {"config", cfg.to_json()},
                {"checks", checks},
                {"summary", {{"total", reports.size()}, {"passed", passed}, {"failed", failed}, {"documented_deviations", deviations}}},
                {"passed", failed == 0},
                {"timing", {{"runtime_s", runtime_s}}}};
}

json report_schema() {
    const json number_or_null = {{"type", json::array({"number", "null"})}};
    const json check = {
        {"type", "object"},
        {"required", json::array({"name", "passed", "residual", "tolerance", "samples", "details"})},
        {"properties",
         {{"name", {{"type", "string"}}},
          {"passed", {{"type", "boolean"}}},
          {"residual", number_or_null},
          {"tolerance", {{"type", "number"}}},
          {"samples", {{"type", "integer"}}},
          {"details", {{"type", "object"}}}}}};
    return json{
        {"$schema", "http://json-schema.org/draft-07/schema#"},
        {"title", "qkzb check report"},
        {"type", "object"},
        {"required", json::array({"schema_version", "tool", "suite", "config", "checks", "summary", "passed", "timing"})},
        {"properties",
         {{"schema_version", {{"type", "integer"}, {"enum", json::array({kReportSchemaVersion})}}},
          {"tool", {{"type", "string"}}},
          {"suite", {{"type", "string"}}},
          {"config", {{"type", "object"}}},
          {"checks", {{"type", "array"}, {"items", check}}},
          {"summary",
           {{"type", "object"},
            {"required", json::array({"total", "passed", "failed", "documented_deviations"})},
            {"properties",
             {{"total", {{"type", "integer"}}},
              {"passed", {{"type", "integer"}}},
              {"failed", {{"type", "integer"}}},
              {"documented_deviations", {{"type", "integer"}}}}}}},
          {"passed", {{"type", "boolean"}}},
          {"timing", {{"type", "object"}, {"required", json::array({"runtime_s"})},
                      {"properties", {{"runtime_s", {{"type", "number"}}}}}}}}}};
}

}  // namespace qkzb
