// Occupation-number basis, mode bookkeeping and ladder operators for small
// systems of indistinguishable particles (fermions or bosons).
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace fockent {

using Cplx = std::complex<double>;

// Amplitudes with squared magnitude below this are dropped after arithmetic.
inline constexpr double kAmplitudePruneTol = 1e-14;

enum class Statistics { Fermion, Boson };
enum class Spin : std::uint8_t { Up = 0, Down = 1, None = 2 };

std::string to_string(Statistics s);
std::string to_string(Spin s);
Statistics statistics_from_string(const std::string& s);
Spin spin_from_string(const std::string& s);

// A single-particle mode labelled by site, optional arm and spin.
// Canonical order is lexicographic in (site, arm, spin) with Up before Down.
struct ModeLabel {
    std::string site;
    Spin spin = Spin::None;
    std::string arm;  // empty when the system has no arm structure

    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
    friend bool operator<(const ModeLabel& a, const ModeLabel& b) {
        if (a.site != b.site) return a.site < b.site;
        if (a.arm != b.arm) return a.arm < b.arm;
        return static_cast<int>(a.spin) < static_cast<int>(b.spin);
    }
    std::string str() const;
};

// Fixed, ordered collection of modes plus exchange statistics. The canonical
// mode order is frozen at construction; every occupation pattern and every
// operator matrix in the library indexes modes through this order. Bosonic
// occupation caps default to nmax for every mode; individual sites may carry
// a different cap (e.g. a high-capacity reservoir mode next to hard-capped
// lattice sites).
class ModeSystem {
  public:
    ModeSystem(Statistics stats, std::vector<ModeLabel> modes, int nmax = kDefaultNmax);
    ModeSystem(Statistics stats, std::vector<ModeLabel> modes, int nmax,
               const std::map<std::string, int>& site_caps);

    static constexpr int kDefaultNmax = 4;

    Statistics statistics() const { return stats_; }
    int nmax() const { return nmax_; }  // default cap; 1 for fermions
    int cap(std::size_t i) const { return caps_.at(i); }
    std::size_t size() const { return modes_.size(); }
    const ModeLabel& mode(std::size_t i) const { return modes_.at(i); }
    const std::vector<ModeLabel>& modes() const { return modes_; }
    std::size_t index_of(const ModeLabel& m) const;  // throws if unknown
    bool contains(const ModeLabel& m) const;

    // All modes belonging to `site` (every arm and spin), canonical order.
    std::vector<std::size_t> site_mode_indices(const std::string& site) const;
    std::vector<std::string> site_names() const;  // distinct sites, sorted

    // Sub-system over a subset of this system's modes, keeping statistics and
    // each retained mode's occupation cap.
    ModeSystem restricted_to(const std::vector<ModeLabel>& kept) const;

    friend bool operator==(const ModeSystem&, const ModeSystem&) = default;

  private:
    Statistics stats_;
    std::vector<ModeLabel> modes_;
    int nmax_;
    std::vector<int> caps_;
};

// Occupation counts per mode, in the canonical order of the owning system.
using OccupationPattern = std::vector<std::uint8_t>;

int total_count(const OccupationPattern& p);
std::string pattern_to_string(const OccupationPattern& p);

struct NormalizedState;

// Sparse complex amplitude map over occupation patterns. States are
// immutable; all operations return new values. Unnormalized states are legal
// intermediates and carry an explicit flag. Bosonic amplitude lost to the
// per-mode occupation cap is accumulated in truncation_loss(), never dropped
// silently.
class QuantumState {
  public:
    using AmplitudeMap = std::map<OccupationPattern, Cplx>;

    static QuantumState vacuum(const ModeSystem& sys);
    static QuantumState with_terms(const ModeSystem& sys, const AmplitudeMap& amps);

    const ModeSystem& system() const { return sys_; }
    const AmplitudeMap& amplitudes() const { return amps_; }
    Cplx amplitude(const OccupationPattern& p) const;
    std::size_t term_count() const { return amps_.size(); }
    bool is_zero() const { return amps_.empty(); }

    double norm() const;
    bool is_normalized() const { return normalized_; }
    double truncation_loss() const { return truncation_loss_; }

    // Returns the normalized state plus the norm of the input.
    // Throws std::runtime_error on (numerically) zero norm.
    NormalizedState normalized() const;

  private:
    QuantumState(const ModeSystem& sys, AmplitudeMap amps, bool normalized, double loss);
    void prune();

    ModeSystem sys_;
    AmplitudeMap amps_;
    bool normalized_ = false;
    double truncation_loss_ = 0.0;

    friend QuantumState apply_creation(const QuantumState&, const ModeLabel&);
    friend QuantumState apply_annihilation(const QuantumState&, const ModeLabel&);
    friend QuantumState add(const QuantumState&, const QuantumState&);
    friend QuantumState scaled(const QuantumState&, Cplx);
};

struct NormalizedState {
    QuantumState state;
    double original_norm;
};

// Ladder operators. Fermionic sign convention: acting on mode m picks up
// (-1)^(number of occupied modes strictly preceding m in canonical order);
// basis kets are understood as ordered products of creation operators,
// c†_{m0}^{n0} c†_{m1}^{n1} ... |0>. Bosonic operators carry the usual
// sqrt(n+1) / sqrt(n) factors; creation on a mode already at nmax maps the
// term to zero and records the lost weight as a truncation diagnostic.
QuantumState apply_creation(const QuantumState& s, const ModeLabel& m);
QuantumState apply_annihilation(const QuantumState& s, const ModeLabel& m);

QuantumState add(const QuantumState& a, const QuantumState& b);
QuantumState scaled(const QuantumState& a, Cplx c);

// <a|b> with the physics convention: conjugate-linear in the first argument.
Cplx inner_product(const QuantumState& a, const QuantumState& b);

// One term of a linear combination of creation strings applied to vacuum:
// coeff * c†_{modes[0]} c†_{modes[1]} ... |0>, factors applied right-to-left.
struct CreationTerm {
    Cplx coeff;
    std::vector<ModeLabel> modes;
};

// Builds the normalized state sum_k coeff_k c†... |0>. Fermionic reordering
// signs are resolved by the ladder-operator convention above. Throws
// std::runtime_error if the sum has zero norm (e.g. a Pauli-violating string).
QuantumState build_from_ops(const ModeSystem& sys, std::span<const CreationTerm> terms);
QuantumState build_from_ops(const ModeSystem& sys, std::initializer_list<CreationTerm> terms);

// Projection onto the subspace of total particle number n. Amplitudes are
// returned untouched (not renormalized); retained_norm reports their norm.
struct SectorProjection {
    QuantumState state;
    double retained_norm;
};
SectorProjection number_sector_project(const QuantumState& s, int n);

// Dense enumeration of every occupation pattern of a system, in mixed-radix
// order with the first canonical mode varying fastest. This fixes the row and
// column order of all operator and density matrices.
class BasisEnumeration {
  public:
    explicit BasisEnumeration(const ModeSystem& sys);

    std::size_t dimension() const { return dim_; }
    const ModeSystem& system() const { return sys_; }
    OccupationPattern pattern(std::size_t index) const;
    std::size_t index(const OccupationPattern& p) const;

    std::vector<Cplx> to_dense(const QuantumState& s) const;
    QuantumState from_dense(std::span<const Cplx> amps, bool assume_normalized) const;

  private:
    ModeSystem sys_;
    std::size_t dim_;
    std::vector<int> radices_;  // cap + 1 per mode, canonical order
};

}  // namespace fockent
