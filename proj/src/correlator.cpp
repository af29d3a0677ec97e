#include "qkzb/correlator.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "qkzb/special.hpp"

namespace qkzb {

namespace {

const double pi = 3.14159265358979323846;
const cplx I(0, 1);

std::vector<std::string> lambda_vars(int n) {
    std::vector<std::string> v;
    for (int k = 1; k <= n; ++k) v.push_back("l" + std::to_string(k));
    return v;
}

std::string join(const std::vector<int>& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

void check_key(const ChiKey& k, int n) {
    if (k.m < 0 || 2 * k.m > n) throw DomainError("entry " + k.str() + ": m must be in 0..n/2");
    if (static_cast<int>(k.ks.size()) != 2 * k.m) throw DomainError("entry " + k.str() + ": needs 2m indices");
    std::set<int> seen;
    for (int x : k.ks) {
        if (x < 1 || x > n) throw DomainError("entry " + k.str() + ": index out of 1..n");
        if (!seen.insert(x).second) throw DomainError("entry " + k.str() + ": repeated index");
    }
    if (static_cast<int>(k.eps.size()) != 2 * n) throw DomainError("entry " + k.str() + ": needs 2n spin components");
    for (int e : k.eps)
        if (e != 0 && e != 1) throw DomainError("entry " + k.str() + ": spin components are 0 (up) or 1 (down)");
}

std::size_t component(const std::vector<int>& eps) {
    std::size_t idx = 0;
    for (int e : eps) idx = 2 * idx + static_cast<std::size_t>(e);
    return idx;
}

GaussQ scalar_from_json(const json& j) {
    if (j.is_number_integer()) return GaussQ(mpq_class(j.get<long>()));
    if (j.is_number()) return GaussQ(mpq_class(j.get<double>()));
    if (j.is_string()) return GaussQ::parse(j.get<std::string>());
    if (j.is_object() && j.contains("re")) {
        auto part = [](const json& x) {
            if (x.is_string()) return mpq_class(x.get<std::string>());
            if (x.is_number_integer()) return mpq_class(x.get<long>());
            return mpq_class(x.get<double>());
        };
        try {
            return GaussQ(part(j.at("re")), j.contains("im") ? part(j.at("im")) : mpq_class(0));
        } catch (const std::invalid_argument&) {
            throw DomainError("malformed rational in " + j.dump());
        }
    }
    throw DomainError("malformed coefficient " + j.dump());
}

json scalar_to_json(const GaussQ& c) {
    if (sgn(c.im()) == 0) return c.re().get_str();
    return json{{"re", c.re().get_str()}, {"im", c.im().get_str()}};
}

LaurentPoly poly_from_json(const json& terms, const std::vector<std::string>& vars) {
    if (!terms.is_array()) throw DomainError("polynomial must be a list of terms");
    LaurentPoly p(vars);
    for (const auto& t : terms) {
        Exponents e = t.value("e", Exponents(vars.size(), 0));
        if (e.size() != vars.size()) throw DomainError("term exponent needs one entry per lambda");
        p.add_term(e, scalar_from_json(t.at("c")));
    }
    return p;
}

json poly_to_json(const LaurentPoly& p) {
    json out = json::array();
    for (const auto& [e, c] : p.terms()) out.push_back({{"c", scalar_to_json(c)}, {"e", e}});
    return out;
}

}  // namespace

std::string ChiKey::str() const {
    return "m=" + std::to_string(m) + " ks=" + join(ks) + " eps=" + join(eps);
}

cplx QCoefficient::evaluate(const std::vector<double>& lambdas) const {
    std::vector<cplx> pt(lambdas.begin(), lambdas.end());
    cplx d = den.evaluate(pt);
    if (d == cplx(0)) throw PoleError("Q denominator vanishes", d);
    return num.evaluate(pt) / d;
}

void ChiExpansion::add(const ChiKey& key, const QCoefficient& q) {
    check_key(key, n);
    if (q.num.variables() != lambda_vars(n) || q.den.variables() != lambda_vars(n))
        throw DomainError("entry " + key.str() + ": coefficient must be in l1..l" + std::to_string(n));
    if (q.den.is_zero()) throw DomainError("entry " + key.str() + ": zero denominator");
    entries[key] = q;
}

void ChiExpansion::add(const ChiKey& key, const GaussQ& constant) {
    auto vars = lambda_vars(n);
    add(key, QCoefficient{LaurentPoly::constant(vars, constant), LaurentPoly::constant(vars, GaussQ(1))});
}

std::vector<std::vector<int>> canonical_tuples(int n, int m) {
    if (m < 0 || 2 * m > n) throw DomainError("canonical_tuples: m must be in 0..n/2");
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<bool> used(n + 1, false);
    // pairs in increasing order of their first element, each pair increasing
    auto rec = [&](auto&& self, int min_first) -> void {
        if (static_cast<int>(cur.size()) == 2 * m) {
            out.push_back(cur);
            return;
        }
        for (int a = min_first; a <= n; ++a) {
            if (used[a]) continue;
            used[a] = true;
            for (int b = a + 1; b <= n; ++b) {
                if (used[b]) continue;
                used[b] = true;
                cur.push_back(a);
                cur.push_back(b);
                self(self, a + 1);
                cur.resize(cur.size() - 2);
                used[b] = false;
            }
            used[a] = false;
        }
    };
    rec(rec, 1);
    return out;
}

void ChiExpansion::require_complete() const {
    const std::size_t dim = std::size_t(1) << (2 * n);
    for (int m = 0; 2 * m <= n; ++m)
        for (const auto& ks : canonical_tuples(n, m))
            for (std::size_t idx = 0; idx < dim; ++idx) {
                ChiKey k{m, ks, std::vector<int>(2 * n)};
                for (int s = 0; s < 2 * n; ++s) k.eps[s] = static_cast<int>((idx >> (2 * n - 1 - s)) & 1);
                if (!entries.count(k)) throw DomainError("Q table: missing entry " + k.str());
            }
}

ChiExpansion ChiExpansion::from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
        throw DomainError("Q table needs \"n\" and \"entries\"");
    ChiExpansion e;
    e.n = j.at("n").get<int>();
    if (e.n < 1 || e.n > 6) throw DomainError("Q table: n must be in 1..6");
    e.sparse = j.value("sparse", false);
    auto vars = lambda_vars(e.n);
    try {
        for (const auto& en : j.at("entries")) {
            ChiKey k{en.at("m").get<int>(), en.value("ks", std::vector<int>{}), en.at("eps").get<std::vector<int>>()};
            const json& c = en.at("coeff");
            if (c.is_object() && c.contains("num")) {
                QCoefficient q{poly_from_json(c.at("num"), vars),
                               c.contains("den") ? poly_from_json(c.at("den"), vars)
                                                 : LaurentPoly::constant(vars, GaussQ(1))};
                e.add(k, q);
            } else {
                e.add(k, scalar_from_json(c));
            }
        }
    } catch (const json::exception& ex) {
        throw DomainError(std::string("Q table: ") + ex.what());
    }
    return e;
}

ChiExpansion ChiExpansion::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open Q table " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw DomainError("Q table " + path + ": " + ex.what());
    }
    return from_json(j);
}

json ChiExpansion::to_json() const {
    json out{{"n", n}, {"sparse", sparse}, {"entries", json::array()}};
    for (const auto& [k, q] : entries)
        out["entries"].push_back(
            {{"m", k.m}, {"ks", k.ks}, {"eps", k.eps}, {"coeff", {{"num", poly_to_json(q.num)}, {"den", poly_to_json(q.den)}}}});
    return out;
}

Vec eval_expansion(const ChiExpansion& exp, const std::vector<double>& lambdas, double nu) {
    if (static_cast<int>(lambdas.size()) != exp.n) throw DomainError("eval_expansion: need n lambdas");
    if (!exp.sparse) exp.require_complete();
    Vec out = Vec::Zero(std::size_t(1) << (2 * exp.n));
    std::map<std::pair<int, int>, cplx> chis;
    for (const auto& [k, q] : exp.entries) {
        cplx term = q.evaluate(lambdas);
        if (term == cplx(0)) continue;
        for (int p = 0; p < k.m; ++p) {
            auto key = std::pair{k.ks[2 * p], k.ks[2 * p + 1]};
            auto it = chis.find(key);
            if (it == chis.end())
                it = chis.emplace(key, chi(lambdas[key.first - 1] - lambdas[key.second - 1], nu)).first;
            term *= it->second;
        }
        out(static_cast<Eigen::Index>(component(k.eps))) += term;
    }
    return out;
}

std::string to_string(Specialization s) { return s == Specialization::Reduction ? "reduction" : "as-displayed"; }

std::vector<cplx> specialized_betas(const std::vector<double>& lambdas, const std::vector<double>& deltas,
                                    Specialization s) {
    const int n = static_cast<int>(lambdas.size());
    if (n < 1) throw DomainError("specialized_betas: need at least one lambda");
    if (!deltas.empty() && static_cast<int>(deltas.size()) != n)
        throw DomainError("specialized_betas: one delta per lambda");
    const double sign = s == Specialization::AsDisplayed ? 1 : -1;
    std::vector<cplx> b(2 * n);
    for (int k = 1; k <= n; ++k) {
        double d = deltas.empty() ? 0 : deltas[k - 1];
        b[k - 1] = lambdas[k - 1] - sign * (pi / 2 - d) * I;
        b[2 * n - k] = lambdas[k - 1] + sign * (pi / 2 - d) * I;
    }
    return b;
}

N1Result derive_n1(const Anisotropy& an, Specialization s, double tol) {
    const double nu = an.nu();
    CandidateSolution g = two_site_solution(nu, QkzGauge::Hatted);
    N1Result r;
    r.specialization = s;
    QkzCheckOptions co;
    co.tol = tol;
    r.residuals = check_candidate(g, co);
    for (const auto& rep : r.residuals)
        if (!rep.passed) throw ConvergenceError("derive_n1: " + rep.name + " residual above tolerance", rep.residual);

    auto at = [&](double lambda) { return QkzPoint{specialized_betas({lambda}, {}, s), {}}; };
    r.hatted = g(at(0));
    r.plain = gauge_transform_solution(g, GaugeDirection::Unhat)(at(0));
    r.lambda_spread = (g(at(0.7)) - r.hatted).norm();

    const Vec sh = SingletVector::hatted(an).components;
    r.scale = sh.dot(r.hatted) / sh.squaredNorm();
    r.singlet_complement = (r.hatted - r.scale * sh).norm();
    return r;
}

LimitResult limit_specialize(const CandidateSolution& g, const std::vector<double>& lambdas, const LimitOptions& opt) {
    const auto& d = opt.deltas;
    if (d.size() < 2) throw DomainError("limit_specialize: need at least two deltas");
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!(d[i] > 0) || (i && !(d[i] < d[i - 1])))
            throw DomainError("limit_specialize: deltas must be positive and strictly decreasing");
    if (static_cast<int>(lambdas.size()) != g.n) throw DomainError("limit_specialize: need n lambdas");

    LimitResult r;
    for (double x : d) {
        std::vector<double> ds(lambdas.size(), x);
        r.ladder.push_back(g(QkzPoint{specialized_betas(lambdas, ds, opt.specialization), {}}));
    }
    for (std::size_t i = 2; i < r.ladder.size(); ++i) {
        double prev = (r.ladder[i - 1] - r.ladder[i - 2]).norm(), cur = (r.ladder[i] - r.ladder[i - 1]).norm();
        if (cur > 0.75 * prev + 1e-14) throw ConvergenceError("limit_specialize: ladder values do not contract", cur);
    }
    // Neville's table at delta = 0
    auto extrapolate = [&](std::size_t first) {
        std::vector<Vec> t(r.ladder.begin() + static_cast<long>(first), r.ladder.end());
        std::vector<double> x(d.begin() + static_cast<long>(first), d.end());
        for (std::size_t lev = 1; lev < t.size(); ++lev)
            for (std::size_t i = t.size() - 1; i >= lev; --i)
                t[i] = (x[i] * t[i - 1] - x[i - lev] * t[i]) / (x[i] - x[i - lev]);
        return t.back();
    };
    r.value = extrapolate(0);
    r.error = (r.value - extrapolate(1)).norm();
    if (r.error > opt.tol * std::max(1.0, r.value.norm()))
        throw ConvergenceError("limit_specialize: extrapolation error above tolerance", r.error);
    return r;
}

}  // namespace qkzb
