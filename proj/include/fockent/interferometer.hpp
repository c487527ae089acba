// Two-pair interferometer over eight fermionic modes: sides 1 and 2, arms L
// and R per side, spin up/down per arm. Spin-triplet input pairs are mixed by
// per-side 50/50 beam splitters, moving spin entanglement into arm occupancy.
#pragma once

#include <Eigen/Dense>

#include "fockent/dynamics.hpp"
#include "fockent/entropy.hpp"
#include "fockent/fock.hpp"

namespace fockent {

// The one-qubit depolarizing probability at which the channel picture
// reproduces the output arm state exactly; reports also evaluate every
// variant at this reference value.
inline constexpr double kSingleQubitMatchP = 0.375;

// Eight modes: (side, arm, spin) for side in {1,2}, arm in {L,R}.
ModeSystem interferometer_system();

// Two spin-triplet pairs: pair A between the L arms of sides 1 and 2, pair B
// between the R arms. Every pattern holds one particle per arm, so side
// reductions before the splitters carry spin entanglement only.
QuantumState interferometer_input(const ModeSystem& sys);

// 50/50 splitter mixing the L and R arms of one side, identically for both
// spins: c†_L -> (c†_L + e^{-i phase} c†_R)/sqrt(2),
//        c†_R -> (e^{i phase} c†_L - c†_R)/sqrt(2).
// Involutory at any fixed phase, so applying it twice is the identity.
OperatorMatrix beam_splitter(const ModeSystem& sys, const std::string& side,
                             double phase = 0.0);

// Relabels a one-arm (two-mode) reduction as a two-qubit matrix: occupation
// (n_up, n_dn) becomes the qubit basis state with index 2 n_up + n_dn.
Eigen::Matrix4cd virtual_qubit_map(const DensityMatrix& arm_rho);
// Inverse relabeling, back to the occupation enumeration order.
Eigen::Matrix4cd virtual_qubit_unmap(const Eigen::Matrix4cd& two_qubit);

enum class ChannelKind {
    SingleQubitFirst,   // depolarize the n_up qubit
    SingleQubitSecond,  // depolarize the n_dn qubit
    IndependentBoth,    // depolarize each qubit independently
    UniformTwoQubit,    // mix toward identity/4
};

std::string to_string(ChannelKind k);

struct ChannelVariant {
    ChannelKind kind = ChannelKind::SingleQubitFirst;
    double p = 0.0;  // in [0, 1]
};

// (1-p) rho + (p/3) sum_sigma sigma rho sigma on the designated qubit(s), or
// the uniform mixture (1-p) rho + p I/4. Trace preserving for p in [0, 1].
Eigen::Matrix4cd depolarizing_channel(const Eigen::Matrix4cd& rho, const ChannelVariant& v);

struct ChannelFit {
    ChannelVariant variant;               // kind plus fitted p
    double residual = 0.0;                // Frobenius norm at the fitted p
    double residual_at_match_p = 0.0;     // Frobenius norm at p = 3/8
};

struct ChannelEquivalenceReport {
    std::vector<ChannelFit> fits;  // one per kind, enum order
    ChannelFit best;               // smallest residual, earlier kind wins ties
};

struct ApparatusRun {
    ModeSystem system;
    QuantumState input;
    QuantumState output;
    EntanglementReport side1_in;   // side-1 reduction by arm-occupancy profile
    EntanglementReport side1_out;
    EntanglementReport arm1l_in;   // 1L reduction by occupancy sectors
    EntanglementReport arm1l_out;
    DensityMatrix rho_arm_in;      // 1L reductions, occupation order
    DensityMatrix rho_arm_out;
    ChannelEquivalenceReport channels;
};

// Builds the input, applies both side splitters with the given phase, and
// assembles every reduction, entropy report and the channel comparison.
ApparatusRun run_apparatus(double phase = 0.0);

// Labels a side-reduction pattern by its sorted arm-occupancy profile, e.g.
// "1+1" (one particle per arm) or "2+0" (both particles in one arm).
std::string arm_profile_label(const OccupationPattern& kept_side_pattern);

}  // namespace fockent
