// Bell-type states built from two nonorthogonal single-particle orbitals
// with real overlap S, expressed over the orthonormal two-site mode basis.
#pragma once

#include <optional>
#include <vector>

#include "fockent/fock.hpp"
#include "fockent/states.hpp"

namespace fockent {

// A formal Bell combination whose squared amplitude norm falls below this is
// reported as destroyed (annihilated by exchange symmetry as S -> 1).
inline constexpr double kDestroyedTol = 1e-8;

// How the two overlapping orbitals are expressed over the site basis. Both
// choices reproduce the same overlap S, hence the same prenorm and the same
// measure values; only the amplitude decomposition differs.
enum class OrthoScheme {
    Loewdin,      // symmetric: phi_{A,B} = p u+ ± q u-
    GramSchmidt,  // phi_A = e1, phi_B = S e1 + sqrt(1-S^2) e2
};

std::string to_string(OrthoScheme s);
OrthoScheme ortho_scheme_from_string(const std::string& s);

struct OverlapBellState {
    QuantumState state;     // normalized unless destroyed; raw amplitudes if destroyed
    double prenorm = 0.0;   // amplitude norm of the formal 1/sqrt(2) combination
    bool destroyed = false; // prenorm^2 < kDestroyedTol
};

// The formal combination (c†_{phiA s} c†_{phiB s'} ± ...)/sqrt(2) of the
// requested Bell kind, with orbital overlap <phi_A|phi_B> = S in [0, 1].
OverlapBellState bell_state_nonorthogonal(Statistics stats, BellKind kind, double s,
                                          OrthoScheme scheme = OrthoScheme::Loewdin);

struct OverlapCurvePoint {
    double overlap = 0.0;
    double prenorm = 0.0;
    bool destroyed = false;
    std::optional<double> eta;  // fermionic, surviving states only
};

std::vector<OverlapCurvePoint> eta_vs_overlap_curve(Statistics stats, BellKind kind,
                                                    const std::vector<double>& overlaps,
                                                    OrthoScheme scheme = OrthoScheme::Loewdin);

}  // namespace fockent
