// Density matrices, partial traces over mode subsets, von Neumann entropy in
// bits, and decomposition of a reduction into particle-count sectors.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>

#include "fockent/fock.hpp"

namespace fockent {

// Validation tolerances for density matrices.
inline constexpr double kDensityHermTol = 1e-9;    // symmetrized beyond this -> error
inline constexpr double kDensityTraceTol = 1e-12;  // |tr - 1|
inline constexpr double kEigClampTol = 1e-10;      // eigenvalues in [-tol, 0) clamp to 0

// Hermitian, unit-trace matrix over the occupation enumeration of a mode
// system (first canonical mode varies fastest along rows/columns).
class DensityMatrix {
  public:
    DensityMatrix(ModeSystem sys, Eigen::MatrixXcd mat);

    const ModeSystem& system() const { return basis_.system(); }
    const BasisEnumeration& basis() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    std::size_t dimension() const { return basis_.dimension(); }

  private:
    BasisEnumeration basis_;
    Eigen::MatrixXcd mat_;
};

// |psi><psi| over the full enumeration. Requires a normalized state.
DensityMatrix density_from_state(const QuantumState& s);

// Traces out every mode not in `keep`. Kept modes retain their canonical
// relative order. For fermions each basis ket is first refactored with the
// traced modes moved to the front, and the resulting permutation parity is
// applied per pattern before the environment patterns are summed over.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<ModeLabel>& keep);
DensityMatrix partial_trace_site(const DensityMatrix& rho, const std::string& site);

// Entropy in bits, with 0 log 0 := 0. The matrix is symmetrized before
// diagonalization; asymmetry beyond kDensityHermTol or an eigenvalue below
// -kEigClampTol raises std::runtime_error.
double von_neumann_entropy(const DensityMatrix& rho);
double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues);

// Diagonal-block decomposition of a reduction, grouped by a per-pattern
// sector label. Each sector's eigenvalues are listed descending; the entropy
// contribution of a sector is -sum lambda log2 lambda over its block.
// total_entropy is the entropy of the full matrix, which equals the sum of
// contributions exactly when off_block_norm vanishes.
struct EntanglementReport {
    double total_entropy = 0.0;
    std::map<std::string, std::vector<double>> sector_eigenvalues;
    std::map<std::string, double> sector_contributions;
    double off_block_norm = 0.0;  // Frobenius norm of the part outside the blocks
    double contribution_sum() const;
};

using SectorLabeler = std::function<std::string(const OccupationPattern&)>;

EntanglementReport sector_decompose(const DensityMatrix& rho, const SectorLabeler& label);

// Standard decomposition: sectors are total particle counts of the kept modes.
EntanglementReport occupancy_sector_decompose(const DensityMatrix& rho);

}  // namespace fockent
