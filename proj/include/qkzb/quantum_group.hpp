#pragma once

#include <string>
#include <vector>

#include "qkzb/report.hpp"
#include "qkzb/rmatrix.hpp"
#include "qkzb/tensor.hpp"

namespace qkzb {

// Which q enters the q^{+-sigma3/4} dressing of S+-.
enum class QConvention {
    ExpForm,    // q = e^{2 pi i (nu+1)}, quarter power via the exponent
    HalfAngle,  // q = e^{i pi nu}
    Reduced,    // q = e^{2 pi i nu}
    Conjugate,  // q = e^{-2 pi i nu}
};

std::string to_string(QConvention c);
cplx q_quarter(const Anisotropy& an, QConvention c);  // the dressing factor q^{1/4}
cplx q_value(const Anisotropy& an, QConvention c);

// Pairs with the default boundary coefficient i sin(pi nu); fixed by calibration.
inline constexpr QConvention kDefaultConvention = QConvention::Conjugate;

struct QGGenerators {
    ChainOperator s3, splus, sminus;
    cplx q_quarter;
    int sites;
};

QGGenerators build_generators(int sites, cplx q_quarter);
QGGenerators build_generators(int sites, const Anisotropy& an,
                              QConvention c = kDefaultConvention);

enum class Boundary { Periodic, OpenWithBoundaryTerm };

struct HamiltonianSpec {
    int sites = 2;
    double delta = 0;
    Boundary boundary = Boundary::Periodic;
    cplx boundary_coeff = 0;
};

cplx default_boundary_coeff(double delta);  // i sqrt(1 - delta^2)

ChainOperator build_hxxz(const HamiltonianSpec& spec);
ChainOperator build_hrxxz(const HamiltonianSpec& spec);
ChainOperator build_hamiltonian(const HamiltonianSpec& spec);

struct BoundaryCandidate {
    std::string label;
    cplx coeff;
};

struct CalibrationEntry {
    std::string coeff_label;
    cplx coeff;
    QConvention convention;
    double splus_residual, sminus_residual, s3_residual;
    bool commutes;
};

struct CalibrationReport {
    int sites;
    double nu;
    double tol;
    std::vector<CalibrationEntry> entries;
    bool passed;  // at least one candidate commutes
    json to_json() const;
};

std::vector<BoundaryCandidate> default_boundary_candidates(const Anisotropy& an);
CalibrationReport calibrate_invariance(int sites, const Anisotropy& an,
                                       const std::vector<BoundaryCandidate>& candidates,
                                       const std::vector<QConvention>& conventions,
                                       double tol = 1e-10);
CalibrationReport calibrate_invariance(int sites, const Anisotropy& an, double tol = 1e-10);

std::vector<cplx> spectrum(const ChainOperator& h);

// Sizes of eigenvalue clusters (|difference| <= tol), sorted ascending.
std::vector<int> degeneracies(const std::vector<cplx>& sorted_eigs, double tol = 1e-8);
// Multiplet sizes 2j+1 of (C^2)^{(x)N} for generic q, sorted ascending.
std::vector<int> expected_multiplets(int sites);

}  // namespace qkzb
