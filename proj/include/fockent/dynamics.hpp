// Hamiltonians over the occupation basis, exact and truncated first-order
// evolution, single-particle mode rotations, and a numeric probe for the
// leading response order of a measure under a perturbation.
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "fockent/fock.hpp"

namespace fockent {

// Matrix over the occupation enumeration of a fixed mode system.
class OperatorMatrix {
  public:
    OperatorMatrix(ModeSystem sys, Eigen::MatrixXcd mat);

    const ModeSystem& system() const { return basis_.system(); }
    const BasisEnumeration& basis() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    bool is_hermitian(double tol = 1e-12) const;
    bool is_unitary(double tol = 1e-12) const;

  private:
    BasisEnumeration basis_;
    Eigen::MatrixXcd mat_;
};

// c†_to c_from over the occupation basis (fermionic signs included).
OperatorMatrix transfer_term(const ModeSystem& sys, const ModeLabel& to, const ModeLabel& from);

// n_m (occupation number of one mode).
OperatorMatrix number_operator(const ModeSystem& sys, const ModeLabel& m);

// U n_{site up} n_{site dn}; the site must carry both spin modes.
OperatorMatrix hubbard_onsite(const ModeSystem& sys, double u, const std::string& site);

// Intersite hopping with a spin flip on a fermionic two-site four-mode
// system: H = (t/2) (c†_{B dn} c_{A up} - c†_{B up} c_{A dn} + h.c.), fixed
// by its action on the bonding-orbital state,
//   H |psi_mol> = -(t/2) c†_{A up} c†_{B up} |0> + (t/2) c†_{B dn} c†_{A dn} |0>.
OperatorMatrix spinflip_hopping(const ModeSystem& sys, double t);

// Lift of a single-particle mode rotation u (size M x M over canonical modes)
// to the occupation basis: c†_i -> sum_j u_ji c†_j. Requires unitary u. On a
// fermionic space the lift is exactly unitary. On a capped bosonic space it
// is unitary on every total-number sector n <= nmax; columns whose rotation
// would exceed the per-mode cap lose the truncated weight.
OperatorMatrix mode_rotation_operator(const ModeSystem& sys, const Eigen::MatrixXcd& u);

QuantumState apply(const OperatorMatrix& op, const QuantumState& s);
Cplx expectation(const OperatorMatrix& op, const QuantumState& s);

// exp(-i eps H)|psi> via Hermitian eigendecomposition.
QuantumState evolve_exact(const QuantumState& s, const OperatorMatrix& h, double eps);

// (1 - i eps H)|psi>, renormalized: the literal truncated map. Its departure
// from unitarity is a property of the truncation, not of the generator.
QuantumState first_order_map(const QuantumState& s, const OperatorMatrix& h, double eps);

enum class EvolutionMap { Exact, FirstOrder };

using MeasureFn = std::function<double(const QuantumState&)>;

// Leading order p of |m(eps) - m(0)| ~ C eps^p, from a log-log least-squares
// fit over the grid. A response entirely below the noise floor is reported
// with no_response = true (the measure is invariant at every probed order).
struct ResponseProbe {
    bool no_response = false;
    int order = 0;               // fitted slope rounded to nearest integer
    double fitted_slope = 0.0;
    double coefficient = 0.0;    // C from the fit
    double fit_residual = 0.0;   // max |log10 deviation| from the fit line
    bool residual_diagnostic = false;  // set when fit_residual > 0.2
    std::vector<std::pair<double, double>> samples;  // (eps, m(eps))
    double baseline = 0.0;       // m(0)
};

inline const std::vector<double> kDefaultEpsGrid = {1e-2, 1e-3, 1e-4};

ResponseProbe response_order(const MeasureFn& measure, const OperatorMatrix& h,
                             const QuantumState& s,
                             const std::vector<double>& eps_grid = kDefaultEpsGrid,
                             EvolutionMap map = EvolutionMap::Exact);

}  // namespace fockent
