// Two-qubit teleportation through the bonding-orbital state: virtual-qubit
// CNOTs between source spin qubits and site-A occupations, measurement,
// mechanically derived corrections on site B, and a bosonic variant that
// replaces the occupation flip by number-conserving exchange with a coherent
// source/sink mode.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <vector>

#include "fockent/dynamics.hpp"
#include "fockent/fock.hpp"

namespace fockent {

// Poisson weight allowed beyond the sink-mode occupation cutoff.
inline constexpr double kCoherentTailTol = 1e-8;

// Largest admissible deviation of a scaled branch map from unitarity when the
// measurement corrections are derived from the ideal circuit.
inline constexpr double kCorrectionUnitarityTol = 1e-6;

// Largest admissible |norm - 1| of a protocol source vector.
inline constexpr double kSourceNormTol = 1e-9;

// Smallest cutoff c with sum_{n > c} Poisson(mean)_n <= tail_tol.
int minimal_coherent_cutoff(double mean_occupation, double tail_tol = kCoherentTailTol);

// Truncated, renormalized coherent state of the sink mode. The truncation is
// exactly quantified: (a - alpha)|alpha_c> has a single component on the
// cutoff level, so residual = |alpha| |a_cutoff|, and residual_bound is the
// analytic tail estimate |alpha| sqrt(tail(cutoff-1) / (1 - tail(cutoff))).
struct CoherentSource {
    Cplx alpha;
    int cutoff = 0;
    std::vector<Cplx> amplitudes;  // size cutoff + 1, unit norm
    double tail_probability = 0.0;  // Poisson mass beyond cutoff, pre-truncation
    double residual = 0.0;          // ||(a - alpha)|alpha_c>||
    double residual_bound = 0.0;
};

// Defaults the cutoff to the minimal one for kCoherentTailTol. An explicit
// cutoff whose tail exceeds the bound is rejected (std::invalid_argument).
CoherentSource make_coherent_source(Cplx alpha, std::optional<int> cutoff = std::nullopt);

// Occupation <-> virtual-qubit dictionary for a site with up/down modes.
// Both flags are pure conventions: flipping either relabels the virtual
// basis and the mechanically re-derived corrections compensate exactly, so
// every protocol fidelity is invariant.
struct IsomorphismOrientation {
    bool occupied_is_one = true;  // occupied mode reads as qubit value 1
    bool up_is_first = true;      // spin-up mode carries the first qubit
};

// Index of |q1 q2> (q2 fastest) for a site's (n_up, n_dn) occupation pair.
// Occupations above 1 are outside the dictionary; callers must gate on that.
int virtual_index(int n_up, int n_down, const IsomorphismOrientation& o = {});

// The teleportation resource: the bonding-orbital state on sites A and B,
// (c†_{A up} + c†_{B up})(c†_{A dn} + c†_{B dn})|0>/2. Both statistics share
// the same pattern support; either site's reduction carries two ebits.
QuantumState channel_state(Statistics stats);

// Ideal virtual-qubit CNOT on a control site C next to target site A: swaps
// the target mode's occupation between 0 and 1 whenever the control particle
// is spin-up. which = 1 targets A up, which = 2 targets A dn. The flip is a
// sign-free basis permutation (phase convention of this library), hence
// unitary and self-inverse on the full enumeration of the C+A system.
OperatorMatrix virtual_cnot_ideal(int which, Statistics stats = Statistics::Fermion);

// Hermitian generator of the number-conserving CNOT for bosons, over control
// site C (cap 2), target site A (cap 2) and sink mode D (cap sink_cutoff):
//   H = g P_{C up} (|1><0|_T d + |0><1|_T d†),   T = A up or A dn.
// The A-side ladder acts inside the {0,1} virtual-qubit subspace of T (the
// 0 -> 1 matrix element of c†_T), so the exchange is an exact two-level Rabi
// rotation against each sink level and reproduces the ideal flip, up to the
// recorded phase convention, when D holds a large-|alpha| coherent state.
// Fermionic statistics are rejected: no coherent source/sink mode exists.
OperatorMatrix cnot_hamiltonian_coherent(int which, double coupling, int sink_cutoff,
                                         Statistics stats = Statistics::Boson);

enum class TeleportMode { Ideal, Coherent };

struct TeleportOptions {
    Statistics statistics = Statistics::Fermion;
    TeleportMode mode = TeleportMode::Ideal;
    Cplx alpha = Cplx(2.0, 0.0);    // coherent mode only
    std::optional<int> cutoff;      // sink cap; defaults to the minimal one
    double coupling = 1.0;          // g in the coherent CNOT generator
    IsomorphismOrientation orientation{};
};

// One of the sixteen (s1, s2, a_up, a_dn) measurement outcomes.
struct BranchResult {
    std::array<bool, 4> bits{};     // source spins up?, site-A modes occupied?
    double probability = 0.0;
    Eigen::Matrix4cd bob_density;   // corrected, unit trace; |q1 q2> ordering
    double fidelity = 0.0;          // <source| bob_density |source>
};

struct ProtocolResult {
    // The reported branch: highest probability, ties broken toward the
    // smallest bit pattern. Deterministic by construction.
    std::array<bool, 4> classical_bits{};
    Eigen::Matrix4cd output;
    double fidelity = 0.0;

    std::vector<BranchResult> branches;  // all 16, bit-lexicographic order
    double average_fidelity = 0.0;       // sum of p_b F_b
    double overflow_probability = 0.0;   // weight outside the virtual-qubit sector
    double correction_unitarity_defect = 0.0;
};

// Runs the full protocol: both virtual CNOTs (ideal flips, or stepped-
// exponential evolution under the coherent generators for time
// t = pi / (2 g |alpha|) plus the phase compensation), Hadamard on each
// source qubit, projection onto every 4-bit outcome, and the branch-derived
// correction on Bob's virtual qubits. The source must be normalized; the
// coherent mode requires bosonic statistics.
ProtocolResult run_protocol(const Eigen::Vector4cd& source, const TeleportOptions& opts = {});

struct FidelitySweepPoint {
    double mean_occupation = 0.0;  // |alpha|^2
    int cutoff = 0;
    double average_fidelity = 0.0;
    double overflow_probability = 0.0;
};

// Coherent-mode average fidelity over a grid of |alpha|^2 values (real
// alpha, minimal cutoff per point).
std::vector<FidelitySweepPoint> coherent_fidelity_sweep(
    const Eigen::Vector4cd& source, std::span<const double> mean_occupation_grid,
    double coupling = 1.0, const IsomorphismOrientation& orientation = {});

}  // namespace fockent
