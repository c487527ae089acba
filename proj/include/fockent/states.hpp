// Canned two-site states used throughout the library and its tests.
#pragma once

#include "fockent/fock.hpp"

namespace fockent {

enum class BellKind { PsiPlus, PsiMinus, PhiPlus, PhiMinus };

std::string to_string(BellKind k);
BellKind bell_kind_from_string(const std::string& s);

// Two sites A and B, each with spin up/down modes. Fermions by default.
// For bosons the cap defaults to 2, which holds any two-particle state
// exactly (no truncation is possible in the two-particle sector).
ModeSystem two_site_system(Statistics stats, int nmax = 2);

// The bonding-orbital state (c†_{A up} + c†_{B up})(c†_{A dn} + c†_{B dn})|0>/2.
QuantumState molecular_orbital_state(const ModeSystem& sys);

// Bell states of two particles localized on sites A and B:
//   Psi± = (|up,dn> ± |dn,up>)/sqrt(2),  Phi± = (|up,up> ± |dn,dn>)/sqrt(2),
// where |s,s'> puts spin s on A and s' on B.
QuantumState localized_bell_state(const ModeSystem& sys, BellKind kind);

// a|up,up> + b|up,dn> + c|dn,up> + d|dn,dn>, one particle per site.
// Normalizes the coefficients; throws on an all-zero input.
QuantumState spin_coefficient_state(const ModeSystem& sys, Cplx a, Cplx b, Cplx c, Cplx d);

}  // namespace fockent
