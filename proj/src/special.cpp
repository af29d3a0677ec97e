#include "qkzb/special.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkzb/errors.hpp"

namespace qkzb {

using std::numbers::pi;
namespace {
const cplx I{0, 1};

void check_nu(double nu) {
    if (!(nu > 0 && nu < 1)) throw DomainError("coupling nu outside (0,1)");
}

// 2 sin^2(z/2), i.e. 1 - cos z, without cancellation for small z.
cplx one_minus_cos(cplx z) {
    if (std::abs(z) < 1e-3) {
        const cplx z2 = z * z;
        return z2 / 2.0 * (1.0 - z2 / 12.0 + z2 * z2 / 360.0);
    }
    const cplx s = std::sin(z / 2.0);
    return 2.0 * s * s;
}

// 1 - e^{-z}
cplx one_minus_exp(cplx z) {
    if (std::abs(z) < 1e-3) return z * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
    return 1.0 - std::exp(-z);
}

// k * phi_kernel(k) for complex k near the imaginary axis (pole expansion).
cplx phi_g(cplx k, double a, double b) {
    return std::sinh(a * k) / (k * std::sinh(b * k) * std::sinh(pi * k));
}

}  // namespace

double xxz_kernel(double k, double nu) {
    const double c = pi * (1 - nu) / (2 * nu), d = pi / (2 * nu);
    if (k < 1e-12) return nu - 1;
    const double ratio = std::expm1(-2 * c * k) / std::expm1(-2 * d * k);
    return -ratio * 2 * std::exp((c - d - pi / 2) * k) / (1 + std::exp(-pi * k));
}

double phi_kernel(double k, double nu) {
    const double a = pi * (nu + 1) / (2 * nu), b = pi / (2 * nu);
    // 2 e^{-pi k/2} (1-e^{-2ak}) / ((1-e^{-2bk})(1-e^{-2 pi k}))
    return -2 * std::exp(-pi * k / 2) * std::expm1(-2 * a * k) /
           (std::expm1(-2 * b * k) * std::expm1(-2 * pi * k));
}

QuadResult phi_reduced(cplx x, double nu, const QuadratureSpec& spec) {
    check_nu(nu);
    const double margin = pi / 2 - std::abs(x.imag());
    if (margin <= 0) {
        std::ostringstream os;
        os << "phi integral diverges: |Im(alpha-beta)|=" << std::abs(x.imag()) << " >= pi/2";
        throw DomainError(os.str());
    }
    const double cutoff = spec.cutoff > 0 ? spec.cutoff : 40.0 / margin;
    auto f = [=](double k) -> cplx {
        if (k <= 0) return 0;
        return -one_minus_cos(x * k) * phi_kernel(k, nu) / k;
    };
    return integrate(f, 0, cutoff, spec);
}

cplx phi(cplx alpha, cplx beta, double nu, const QuadratureSpec& spec) {
    return std::exp(-(1 + nu) * (alpha + beta) / 2.0 + phi_reduced(alpha - beta, nu, spec).value);
}

// ---- PhiKernel ------------------------------------------------------------

PhiKernel::PhiKernel(double nu, PhiOptions opt) : nu_(nu), opt_(opt) {
    check_nu(nu);
    if (opt.residue_min_re <= 0 || opt.switch_point < opt.residue_min_re)
        throw DomainError("PhiKernel: need 0 < residue_min_re <= switch_point");
    const double a = pi * (nu + 1) / (2 * nu), b = pi / (2 * nu);

    // integral nodes, graded towards k = 0 where the kernel varies on the scale 1/b
    const double cutoff = 40.0 / (pi / 2 - opt.imag_bound);
    nodes_ = panel_nodes(graded_edges(0, cutoff, std::min(1.0, 1.0 / b) / 16, 0.5), opt.order);
    weights_.resize(nodes_.x.size());
    for (std::size_t i = 0; i < nodes_.x.size(); ++i)
        weights_[i] = nodes_.w[i] * phi_kernel(nodes_.x[i], nu) / nodes_.x[i];

    // poles of g on the positive imaginary axis: k = i m and k = 2 i nu m
    const double ymax = 38.0 / opt.residue_min_re;
    std::vector<double> ys;
    for (int m = 1; m <= ymax + 1; ++m) ys.push_back(m);
    for (int m = 1; 2 * nu * m <= ymax + 1; ++m) ys.push_back(2 * nu * m);
    std::sort(ys.begin(), ys.end());
    const double merge = 0.1 * std::min(2 * nu, 1.0);
    std::vector<std::vector<double>> groups;
    for (double y : ys) {
        if (!groups.empty() && y - groups.back().back() < merge) groups.back().push_back(y);
        else groups.push_back({y});
    }
    constexpr int kContour = 64;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const double lo = g.front(), hi = g.back();
        const double centre = 0.5 * (lo + hi), span = 0.5 * (hi - lo);
        double gap = lo;  // distance to the double pole at k = 0
        if (gi > 0) gap = std::min(gap, lo - groups[gi - 1].back());
        if (gi + 1 < groups.size()) gap = std::min(gap, groups[gi + 1].front() - hi);
        const double r = span + 0.5 * gap;
        const int terms = span < 1e-10 ? 2 : 30;
        std::vector<cplx> moments(terms, 0.0);
        for (int j = 0; j < kContour; ++j) {
            const cplx z = r * std::exp(I * (2 * pi * j / kContour));
            const cplx gv = phi_g(I * centre + z, a, b);
            cplx zp = z;  // (k - k_c)^{n+1}
            for (int n = 0; n < terms; ++n) {
                moments[n] += gv * zp;
                zp *= z;
            }
        }
        Cluster c{centre, {}};
        cplx in = 1.0;
        double fact = 1;
        for (int n = 0; n < terms; ++n) {
            if (n > 0) fact *= n, in *= I;
            c.coeffs.push_back(in * moments[n] / double(kContour) / fact);
        }
        clusters_.push_back(std::move(c));
    }

    const double xs = opt.switch_point;
    constant_ = reduced_direct(xs) - (-(nu + 1) * xs / 2 + residue_sum(xs));
    const double xc = xs + 0.5;
    matching_error_ = std::abs(reduced_direct(xc) - reduced_residue(xc));
}

cplx PhiKernel::residue_sum(cplx x) const {
    cplx s = 0;
    for (const auto& c : clusters_) {
        const cplx e = std::exp(-x * c.height);
        if (std::abs(e) < 1e-19) break;
        cplx poly = 0, xp = 1;
        for (const cplx& co : c.coeffs) {
            poly += co * xp;
            xp *= x;
        }
        s += e * poly;
    }
    return pi * I * s;
}

cplx PhiKernel::reduced_direct(cplx x) const {
    if (std::abs(x.imag()) > opt_.imag_bound + 1e-12)
        throw DomainError("phi integral nodes used outside their strip");
    cplx s = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s -= weights_[i] * one_minus_cos(x * nodes_.x[i]);
    return s;
}

cplx PhiKernel::reduced_residue(cplx x) const {
    if (x.real() < opt_.residue_min_re) {
        std::ostringstream os;
        os << "phi pole expansion needs Re x >= " << opt_.residue_min_re << ", got " << x.real();
        throw DomainError(os.str());
    }
    return -(nu_ + 1) * x / 2.0 + constant_ + residue_sum(x);
}

cplx PhiKernel::reduced(cplx x) const {
    if (x.real() < 0) x = -x;
    if (x.real() <= opt_.switch_point && std::abs(x.imag()) <= opt_.imag_bound)
        return reduced_direct(x);
    return reduced_residue(x);
}

cplx PhiKernel::log_phi(cplx alpha, cplx beta) const {
    return -(1 + nu_) * (alpha + beta) / 2.0 + reduced(alpha - beta);
}

// ---- psi ------------------------------------------------------------------

QuadResult psi_exponent(cplx x, const QuadratureSpec& spec) {
    const double up = pi / 2 - x.imag(), both = 2.5 * pi - std::abs(x.imag());
    if (up <= 0 || both <= 0) {
        std::ostringstream os;
        os << "psi integral diverges: Im(beta-theta)=" << x.imag() << " outside (-5pi/2, pi/2)";
        throw DomainError(os.str());
    }
    const double rate = std::min({up, both, pi / 2});
    const double cutoff = spec.cutoff > 0 ? spec.cutoff : 40.0 / rate;
    // [coth(pi k)(1-cos xk) + i sin xk] / (2k cosh(pi k/2)), regrouped so that
    // the large-k growth of cos and sin cancels
    auto f = [=](double k) -> cplx {
        if (k <= 0) return 0;
        const double cothm1 = 2 / std::expm1(2 * pi * k);
        const cplx num = cothm1 * one_minus_cos(x * k) + one_minus_exp(I * x * k);
        return num / (2 * k * std::cosh(pi * k / 2));
    };
    return integrate(f, 0, cutoff, spec);
}

cplx psi(cplx beta, cplx theta, const QuadratureSpec& spec) {
    return std::pow(2.0, -0.75) *
           std::exp(-(beta + theta) / 4.0 - psi_exponent(beta - theta, spec).value);
}

// ---- chi ------------------------------------------------------------------

QuadResult chi_integral(cplx alpha, double nu, const QuadratureSpec& spec) {
    check_nu(nu);
    const double margin = pi - std::abs(alpha.imag());
    if (margin <= 0) throw DomainError("chi integral diverges: |Im alpha| >= pi");
    const double cutoff = spec.cutoff > 0 ? spec.cutoff : 40.0 / margin;
    auto f = [=](double k) -> cplx { return std::cos(alpha * k) * xxz_kernel(k, nu); };
    QuadResult r = integrate(f, 0, cutoff, spec);
    r.value *= I;
    return r;
}

cplx chi(cplx alpha, double nu, const QuadratureSpec& spec) {
    return chi_integral(alpha, nu, spec).value;
}

QuadResult chi_moment(int m, double nu, const QuadratureSpec& spec) {
    check_nu(nu);
    if (m < 0) throw DomainError("moment index must be non-negative");
    // k^{2m} e^{-pi k} peaks at 2m/pi; go far enough past it for the tail
    const double cutoff = spec.cutoff > 0 ? spec.cutoff : (2.0 * m + 40.0 + 2.0 * m * std::log1p(m)) / pi;
    auto f = [=](double k) -> cplx { return std::pow(k, 2 * m) * xxz_kernel(k, nu); };
    return integrate(f, 0, cutoff, spec);
}

ChiSeries chi_series(double nu, int terms, const QuadratureSpec& spec) {
    if (terms < 1 || terms > 21) throw DomainError("chi_series supports 1..21 terms");
    ChiSeries s{nu, {}, {}, 0};
    double fact = 1;  // (2m)!
    for (int m = 0; m < terms; ++m) {
        if (m > 0) fact *= (2.0 * m - 1) * (2.0 * m);
        const QuadResult mom = chi_moment(m, nu, spec);
        const double sign = (m % 2) ? -1 : 1;
        s.coeffs.push_back(sign * mom.value.real() / fact);
        s.errors.push_back(mom.error / fact);
    }
    if (terms >= 2) {
        const double last = std::abs(s.coeffs[terms - 1]), prev = std::abs(s.coeffs[terms - 2]);
        s.radius = last > 0 ? std::sqrt(prev / last) : INFINITY;
    } else {
        s.radius = INFINITY;
    }
    return s;
}

cplx ChiSeries::operator()(cplx alpha) const {
    cplx sum = 0, a2 = alpha * alpha, p = 1;
    for (double c : coeffs) {
        sum += c * p;
        p *= a2;
    }
    return I * sum;
}

// ---- dispersion -----------------------------------------------------------

Dispersion dispersion(cplx theta) {
    const cplx u = (theta - I * pi / 2.0) / 2.0;
    const cplx t = std::tanh(u);
    const cplx sh = std::sinh(2.0 * u);
    if (!std::isfinite(std::abs(t)) || std::abs(t) < 1e-14 || std::abs(sh) < 1e-14)
        throw PoleError("dispersion singular: tanh((theta - pi i/2)/2) is 0 or infinite", t);
    return {std::log(t), 1.0 / sh};
}

}  // namespace qkzb
