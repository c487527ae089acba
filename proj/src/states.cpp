#include "fockent/states.hpp"

#include <stdexcept>

namespace fockent {

std::string to_string(BellKind k) {
    switch (k) {
        case BellKind::PsiPlus: return "psi-plus";
        case BellKind::PsiMinus: return "psi-minus";
        case BellKind::PhiPlus: return "phi-plus";
        default: return "phi-minus";
    }
}

BellKind bell_kind_from_string(const std::string& s) {
    if (s == "psi-plus") return BellKind::PsiPlus;
    if (s == "psi-minus") return BellKind::PsiMinus;
    if (s == "phi-plus") return BellKind::PhiPlus;
    if (s == "phi-minus") return BellKind::PhiMinus;
    throw std::invalid_argument("unknown Bell state kind: " + s);
}

ModeSystem two_site_system(Statistics stats, int nmax) {
    return ModeSystem(stats,
                      {{"A", Spin::Up}, {"A", Spin::Down}, {"B", Spin::Up}, {"B", Spin::Down}},
                      nmax);
}

QuantumState molecular_orbital_state(const ModeSystem& sys) {
    const ModeLabel au{"A", Spin::Up}, ad{"A", Spin::Down};
    const ModeLabel bu{"B", Spin::Up}, bd{"B", Spin::Down};
    // Expand (c†_{A up} + c†_{B up})(c†_{A dn} + c†_{B dn}) |0> / 2.
    return build_from_ops(sys, {{0.25, {au, ad}},
                                {0.25, {au, bd}},
                                {0.25, {bu, ad}},
                                {0.25, {bu, bd}}});
}

QuantumState localized_bell_state(const ModeSystem& sys, BellKind kind) {
    switch (kind) {
        case BellKind::PsiPlus: return spin_coefficient_state(sys, 0, 1, 1, 0);
        case BellKind::PsiMinus: return spin_coefficient_state(sys, 0, 1, -1, 0);
        case BellKind::PhiPlus: return spin_coefficient_state(sys, 1, 0, 0, 1);
        default: return spin_coefficient_state(sys, 1, 0, 0, -1);
    }
}

QuantumState spin_coefficient_state(const ModeSystem& sys, Cplx a, Cplx b, Cplx c, Cplx d) {
    const ModeLabel au{"A", Spin::Up}, ad{"A", Spin::Down};
    const ModeLabel bu{"B", Spin::Up}, bd{"B", Spin::Down};
    return build_from_ops(sys, {{a, {au, bu}}, {b, {au, bd}}, {c, {ad, bu}}, {d, {ad, bd}}});
}

}  // namespace fockent
