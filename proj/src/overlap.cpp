#include "fockent/overlap.hpp"

#include <cmath>
#include <stdexcept>

#include "fockent/measures.hpp"

namespace fockent {

std::string to_string(OrthoScheme s) {
    return s == OrthoScheme::Loewdin ? "loewdin" : "gram-schmidt";
}

OrthoScheme ortho_scheme_from_string(const std::string& s) {
    if (s == "loewdin") return OrthoScheme::Loewdin;
    if (s == "gram-schmidt") return OrthoScheme::GramSchmidt;
    throw std::invalid_argument("unknown orthogonalization scheme: " + s);
}

namespace {

struct OrbitalPair {
    // Site-basis coefficients of the two overlapping orbitals.
    double alpha_a, alpha_b;  // phi_A over sites A, B
    double beta_a, beta_b;    // phi_B over sites A, B
};

OrbitalPair orbital_pair(double s, OrthoScheme scheme) {
    if (scheme == OrthoScheme::Loewdin) {
        const double p = std::sqrt((1.0 + s) / 2.0), q = std::sqrt((1.0 - s) / 2.0);
        const double r = 1.0 / std::sqrt(2.0);
        return {r * (p + q), r * (p - q), r * (p - q), r * (p + q)};
    }
    return {1.0, 0.0, s, std::sqrt(1.0 - s * s)};
}

// c†_{phi s} lifted over the site modes of a two-site system.
void orbital_creation_terms(std::vector<CreationTerm>& terms, Cplx coeff, double on_a,
                            double on_b, Spin s1, double on_a2, double on_b2, Spin s2) {
    const ModeLabel a1{"A", s1}, b1{"B", s1}, a2{"A", s2}, b2{"B", s2};
    terms.push_back({coeff * on_a * on_a2, {a1, a2}});
    terms.push_back({coeff * on_a * on_b2, {a1, b2}});
    terms.push_back({coeff * on_b * on_a2, {b1, a2}});
    terms.push_back({coeff * on_b * on_b2, {b1, b2}});
}

}  // namespace

OverlapBellState bell_state_nonorthogonal(Statistics stats, BellKind kind, double s,
                                          OrthoScheme scheme) {
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("orbital overlap must lie in [0, 1]");
    const ModeSystem sys = two_site_system(stats);
    const OrbitalPair orb = orbital_pair(s, scheme);
    const Cplx half_weight(1.0 / std::sqrt(2.0), 0.0);

    // The four kinds combine (spin of phi_A, spin of phi_B) pairs:
    //   Psi± : (up, dn) ± (dn, up);  Phi± : (up, up) ± (dn, dn).
    std::vector<CreationTerm> terms;
    const double sign = (kind == BellKind::PsiMinus || kind == BellKind::PhiMinus) ? -1.0 : 1.0;
    if (kind == BellKind::PsiPlus || kind == BellKind::PsiMinus) {
        orbital_creation_terms(terms, half_weight, orb.alpha_a, orb.alpha_b, Spin::Up,
                               orb.beta_a, orb.beta_b, Spin::Down);
        orbital_creation_terms(terms, sign * half_weight, orb.alpha_a, orb.alpha_b, Spin::Down,
                               orb.beta_a, orb.beta_b, Spin::Up);
    } else {
        orbital_creation_terms(terms, half_weight, orb.alpha_a, orb.alpha_b, Spin::Up,
                               orb.beta_a, orb.beta_b, Spin::Up);
        orbital_creation_terms(terms, sign * half_weight, orb.alpha_a, orb.alpha_b, Spin::Down,
                               orb.beta_a, orb.beta_b, Spin::Down);
    }

    // Accumulate the raw (unnormalized) combination by applying the strings.
    QuantumState raw = scaled(QuantumState::vacuum(sys), Cplx(0.0, 0.0));
    for (const CreationTerm& term : terms) {
        QuantumState piece = QuantumState::vacuum(sys);
        for (auto it = term.modes.rbegin(); it != term.modes.rend(); ++it)
            piece = apply_creation(piece, *it);
        raw = add(raw, scaled(piece, term.coeff));
    }

    OverlapBellState out{raw, raw.norm(), false};
    if (out.prenorm * out.prenorm < kDestroyedTol) {
        out.destroyed = true;
        return out;
    }
    out.state = raw.normalized().state;
    return out;
}

std::vector<OverlapCurvePoint> eta_vs_overlap_curve(Statistics stats, BellKind kind,
                                                    const std::vector<double>& overlaps,
                                                    OrthoScheme scheme) {
    std::vector<OverlapCurvePoint> curve;
    curve.reserve(overlaps.size());
    for (double s : overlaps) {
        const OverlapBellState bell = bell_state_nonorthogonal(stats, kind, s, scheme);
        OverlapCurvePoint pt;
        pt.overlap = s;
        pt.prenorm = bell.prenorm;
        pt.destroyed = bell.destroyed;
        if (!bell.destroyed && stats == Statistics::Fermion)
            pt.eta = schliemann_eta(bell.state);
        curve.push_back(pt);
    }
    return curve;
}

}  // namespace fockent
