// Competing entanglement measures for two particles on two sites: site
// entropy of the occupation-basis reduction, the spin-coefficient tangle, and
// the Pfaffian-based measure with its Slater decomposition.
#pragma once

#include <Eigen/Dense>
#include <array>

#include "fockent/entropy.hpp"
#include "fockent/fock.hpp"

namespace fockent {

inline constexpr double kWSymmetryTol = 1e-12;
// Pairing coefficients above this count toward the rank. The coefficients are
// square roots of eigenvalue averages, so an ulp of eigenvalue noise already
// shows up at the 1e-8 scale; a tighter cut would misread exact rank-1 input.
inline constexpr double kSlaterRankTol = 1e-8;

// Coefficient matrix of a two-particle state over four modes, written as
// |psi> = sum_{ab} w_ab c†_a c†_b |0> with modes in canonical order.
// Fermionic w is antisymmetric, bosonic w symmetric. The amplitude carried by
// a pattern with distinct modes a<b occupied is 2 w_ab; a bosonic doubly
// occupied mode a carries amplitude w_aa. Normalized states are exactly those
// whose induced amplitude vector has unit norm.
class WMatrix {
  public:
    WMatrix(Statistics stats, const Eigen::Matrix4cd& w);

    Statistics statistics() const { return stats_; }
    const Eigen::Matrix4cd& matrix() const { return w_; }

  private:
    Statistics stats_;
    Eigen::Matrix4cd w_;
};

// Conversions between two-particle states over a 4-mode system and w
// matrices. w_from_state requires a normalized state supported entirely on
// the two-particle sector; state_from_w inverts it up to global phase.
WMatrix w_from_state(const QuantumState& s);
QuantumState state_from_w(const ModeSystem& sys, const WMatrix& w);

// Pfaffian of a 4x4 antisymmetric matrix: w12 w34 - w13 w24 + w14 w23.
Cplx pfaffian4(const Eigen::Matrix4cd& w);

// Dual matrix wdual_ab = (1/2) eps^{abcd} conj(w)_cd.
Eigen::Matrix4cd wmatrix_dual(const Eigen::Matrix4cd& w);

// eta = 8 |Pf w|, normalized so Bell states give 1. Fermions only.
double schliemann_eta(const WMatrix& w);
double schliemann_eta(const QuantumState& s);

// Canonical pairing form of an antisymmetric w: w = U Sigma U^T with Sigma
// built from 2x2 blocks [[0, z_i], [-z_i, 0]], z_i >= 0 descending. The
// columns (2i-1, 2i) of U are the paired orthonormal single-particle modes.
// Rank counts coefficients above kSlaterRankTol; rank 1 iff eta vanishes.
struct SlaterDecomposition {
    std::array<double, 2> coefficients;  // z_1 >= z_2 >= 0
    Eigen::Matrix4cd mode_vectors;       // columns: pair-1 a, pair-1 b, pair-2 a, pair-2 b
    int rank = 0;
    double reconstruction_error = 0.0;   // Frobenius distance of U Sigma U^T from w
};
SlaterDecomposition slater_decompose(const WMatrix& w);

// Spin-coefficient measures of a|uu> + b|ud> + c|du> + d|dd> (normalized):
// tangle tau = (2|ad - bc|)^2 and its entropy E = h((1 + sqrt(1-tau))/2)
// with h the binary entropy; the reduced one-site spectrum is {x, 1-x}.
struct WoottersReport {
    double tau = 0.0;
    double entropy = 0.0;
    double x = 0.0;
};
double binary_entropy(double x);
WoottersReport wootters_report(Cplx a, Cplx b, Cplx c, Cplx d);

// Entropy of the reduction to one site's modes, with its sector breakdown.
EntanglementReport site_entropy_measure(const QuantumState& s, const std::string& site);

// Closed-form reduction to site B of a two-site w state, assembled from the
// w entries alone, over the same kept-mode enumeration partial_trace uses.
// Sectors of fixed particle count on B are the only nonzero blocks:
//   fermion: n=0 -> 4|w12|^2, n=2 -> 4|w34|^2,
//   boson:   n=0 -> |w11|^2 + |w22|^2 + 4|w12|^2,
//            n=2 over {up dn, up up, dn dn} ->
//              [[4|w34|^2, 2 w34 conj(w33), 2 w34 conj(w44)],
//               [c.c.,     |w33|^2,         w33 conj(w44)  ],
//               [c.c.,     c.c.,            |w44|^2        ]],
//   both:    n=1 -> [[4|w13|^2 + 4|w23|^2,  4 w13 conj(w14) + 4 w23 conj(w24)],
//                    [c.c.,                 4|w14|^2 + 4|w24|^2              ]].
DensityMatrix reduced_blocks_closed_form(const ModeSystem& sys, const WMatrix& w);

}  // namespace fockent
