#include "fockent/teleport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "fockent/states.hpp"

namespace fockent {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kNoSink = static_cast<std::size_t>(-1);
}  // namespace

int minimal_coherent_cutoff(double mean_occupation, double tail_tol) {
    if (mean_occupation < 0.0)
        throw std::invalid_argument("mean occupation must be non-negative");
    if (tail_tol <= 0.0 || tail_tol >= 1.0)
        throw std::invalid_argument("tail tolerance must lie in (0, 1)");
    double pmf = std::exp(-mean_occupation);  // P(n = 0)
    double cumulative = pmf;
    int n = 0;
    while (1.0 - cumulative > tail_tol) {
        ++n;
        pmf *= mean_occupation / n;
        cumulative += pmf;
        if (n > 100000) throw std::runtime_error("coherent cutoff search did not converge");
    }
    return n;
}

CoherentSource make_coherent_source(Cplx alpha, std::optional<int> cutoff) {
    if (cutoff && *cutoff < 0) throw std::invalid_argument("coherent cutoff must be >= 0");
    const double mean = std::norm(alpha);
    const int c = cutoff ? *cutoff : minimal_coherent_cutoff(mean);

    // a_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), built by the stable recursion
    // a_{n+1} = a_n alpha / sqrt(n+1).
    std::vector<Cplx> amps(static_cast<std::size_t>(c) + 1);
    Cplx a = std::exp(-mean / 2.0);
    double kept = 0.0;
    for (int n = 0; n <= c; ++n) {
        if (n > 0) a *= alpha / std::sqrt(static_cast<double>(n));
        amps[static_cast<std::size_t>(n)] = a;
        kept += std::norm(a);
    }
    const double tail = std::max(0.0, 1.0 - kept);
    if (tail > kCoherentTailTol)
        throw std::invalid_argument("coherent cutoff too small: truncated tail exceeds the bound");

    CoherentSource out;
    out.alpha = alpha;
    out.cutoff = c;
    out.tail_probability = tail;
    // (a - alpha) on the truncated state leaves only the boundary component
    // -alpha a_c |c>, so the residual is exact; the bound replaces |a_c|^2 by
    // the whole tail beyond c - 1.
    out.residual = std::abs(alpha) * std::abs(amps.back()) / std::sqrt(kept);
    out.residual_bound =
        std::abs(alpha) * std::sqrt(std::min(1.0, tail + std::norm(amps.back())) / kept);
    const double scale = 1.0 / std::sqrt(kept);
    for (auto& x : amps) x *= scale;
    out.amplitudes = std::move(amps);
    return out;
}

int virtual_index(int n_up, int n_down, const IsomorphismOrientation& o) {
    if (n_up < 0 || n_up > 1 || n_down < 0 || n_down > 1)
        throw std::invalid_argument("virtual qubit occupations must be 0 or 1");
    const int first = o.up_is_first ? n_up : n_down;
    const int second = o.up_is_first ? n_down : n_up;
    const int q1 = o.occupied_is_one ? first : 1 - first;
    const int q2 = o.occupied_is_one ? second : 1 - second;
    return 2 * q1 + q2;
}

QuantumState channel_state(Statistics stats) {
    return molecular_orbital_state(two_site_system(stats));
}

namespace {

// Control site C plus target site A, the minimal stage for the CNOT gates.
ModeSystem control_target_system(Statistics stats) {
    return ModeSystem(
        stats, {{"C", Spin::Up}, {"C", Spin::Down}, {"A", Spin::Up}, {"A", Spin::Down}}, 2);
}

Spin target_spin(int which) {
    if (which != 1 && which != 2) throw std::invalid_argument("virtual CNOT index must be 1 or 2");
    return which == 1 ? Spin::Up : Spin::Down;
}

}  // namespace

OperatorMatrix virtual_cnot_ideal(int which, Statistics stats) {
    const ModeSystem sys = control_target_system(stats);
    const BasisEnumeration basis(sys);
    const std::size_t control = sys.index_of({"C", Spin::Up});
    const std::size_t target = sys.index_of({"A", target_spin(which)});
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        OccupationPattern p = basis.pattern(static_cast<std::size_t>(j));
        if (p[control] >= 1 && p[target] <= 1) p[target] ^= 1;
        m(static_cast<Eigen::Index>(basis.index(p)), j) = 1.0;
    }
    return OperatorMatrix(sys, std::move(m));
}

OperatorMatrix cnot_hamiltonian_coherent(int which, double coupling, int sink_cutoff,
                                         Statistics stats) {
    if (stats == Statistics::Fermion)
        throw std::invalid_argument(
            "coherent exchange requires bosonic statistics: fermions admit no coherent "
            "source/sink mode");
    const Spin tspin = target_spin(which);
    if (sink_cutoff < 1) throw std::invalid_argument("sink cutoff must be >= 1");
    const ModeSystem sys(Statistics::Boson,
                         {{"C", Spin::Up},
                          {"C", Spin::Down},
                          {"A", Spin::Up},
                          {"A", Spin::Down},
                          {"D", Spin::None}},
                         2, {{"D", sink_cutoff}});
    const BasisEnumeration basis(sys);
    const std::size_t control = sys.index_of({"C", Spin::Up});
    const std::size_t target = sys.index_of({"A", tspin});
    const std::size_t sink = sys.index_of({"D", Spin::None});
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const OccupationPattern p = basis.pattern(static_cast<std::size_t>(j));
        if (p[control] < 1) continue;
        const int nt = p[target];
        const int k = p[sink];
        if (nt == 0 && k >= 1) {  // |1><0|_T d
            OccupationPattern q = p;
            q[target] = 1;
            q[sink] = static_cast<std::uint8_t>(k - 1);
            m(static_cast<Eigen::Index>(basis.index(q)), j) += coupling * std::sqrt(k);
        }
        if (nt == 1 && k < sink_cutoff) {  // |0><1|_T d†
            OccupationPattern q = p;
            q[target] = 0;
            q[sink] = static_cast<std::uint8_t>(k + 1);
            m(static_cast<Eigen::Index>(basis.index(q)), j) += coupling * std::sqrt(k + 1);
        }
    }
    return OperatorMatrix(sys, std::move(m));
}

namespace {

// Mode bookkeeping for the full protocol stage: source sites C1 and C2,
// channel sites A and B, optionally the sink mode D.
struct Wiring {
    ModeSystem sys;
    std::size_t au = 0, ad = 0, bu = 0, bd = 0;
    std::size_t c1u = 0, c2u = 0;
    std::size_t sink = kNoSink;
    bool has_sink() const { return sink != kNoSink; }
};

Wiring protocol_wiring(Statistics stats, std::optional<int> sink_cap) {
    std::vector<ModeLabel> labels = {{"A", Spin::Up},  {"A", Spin::Down}, {"B", Spin::Up},
                                     {"B", Spin::Down}, {"C1", Spin::Up},  {"C1", Spin::Down},
                                     {"C2", Spin::Up},  {"C2", Spin::Down}};
    std::map<std::string, int> caps;
    if (sink_cap) {
        labels.push_back({"D", Spin::None});
        caps["D"] = *sink_cap;
    }
    Wiring w{ModeSystem(stats, std::move(labels), 2, caps)};
    w.au = w.sys.index_of({"A", Spin::Up});
    w.ad = w.sys.index_of({"A", Spin::Down});
    w.bu = w.sys.index_of({"B", Spin::Up});
    w.bd = w.sys.index_of({"B", Spin::Down});
    w.c1u = w.sys.index_of({"C1", Spin::Up});
    w.c2u = w.sys.index_of({"C2", Spin::Up});
    if (sink_cap) w.sink = w.sys.index_of({"D", Spin::None});
    return w;
}

// Source qubits encoded as one particle per C site, value 1 = spin-up;
// channel pairs expanded as in channel_state; sink levels multiplied in last.
QuantumState initial_state(const Wiring& w, const Eigen::Vector4cd& chi,
                           const CoherentSource* sink) {
    const ModeLabel au{"A", Spin::Up}, ad{"A", Spin::Down};
    const ModeLabel bu{"B", Spin::Up}, bd{"B", Spin::Down};
    const std::array<std::pair<ModeLabel, ModeLabel>, 4> channel = {
        {{au, ad}, {au, bd}, {bu, ad}, {bu, bd}}};
    std::vector<CreationTerm> terms;
    terms.reserve(16);
    for (int v = 0; v < 4; ++v) {
        const ModeLabel c1{"C1", (v & 2) ? Spin::Up : Spin::Down};
        const ModeLabel c2{"C2", (v & 1) ? Spin::Up : Spin::Down};
        for (const auto& [x, y] : channel)
            terms.push_back({0.25 * chi(v), {c1, c2, x, y}});
    }
    QuantumState state = build_from_ops(w.sys, std::span<const CreationTerm>(terms));
    if (sink == nullptr) return state;

    QuantumState::AmplitudeMap out;
    for (const auto& [pat, amp] : state.amplitudes())
        for (int k = 0; k <= sink->cutoff; ++k) {
            const Cplx prod = amp * sink->amplitudes[static_cast<std::size_t>(k)];
            if (std::norm(prod) < kAmplitudePruneTol * kAmplitudePruneTol) continue;
            OccupationPattern q = pat;
            q[w.sink] = static_cast<std::uint8_t>(k);
            out[q] = prod;
        }
    return QuantumState::with_terms(w.sys, out);
}

// Ideal virtual-qubit CNOT: swap the target occupation between 0 and 1 on
// every pattern whose control particle is spin-up. A sign-free permutation.
QuantumState apply_flip_controlled(const QuantumState& s, std::size_t control_up,
                                   std::size_t target) {
    QuantumState::AmplitudeMap out;
    for (const auto& [pat, amp] : s.amplitudes()) {
        OccupationPattern q = pat;
        if (q[control_up] >= 1 && q[target] <= 1) q[target] ^= 1;
        out[q] += amp;
    }
    return QuantumState::with_terms(s.system(), out);
}

// Hadamard on a one-particle source site, assembled from ladder operators:
// (n_up - n_dn + c†_dn c_up + c†_up c_dn) / sqrt(2). The two modes are
// adjacent in canonical order, so fermionic phases cancel pairwise and the
// lift is exactly [[1, 1], [1, -1]]/sqrt(2) on the site.
QuantumState apply_source_hadamard(const QuantumState& s, const std::string& site) {
    const ModeLabel up{site, Spin::Up}, dn{site, Spin::Down};
    const QuantumState from_up = apply_annihilation(s, up);
    const QuantumState from_dn = apply_annihilation(s, dn);
    const QuantumState keep = add(apply_creation(from_up, up),
                                  scaled(apply_creation(from_dn, dn), -1.0));
    const QuantumState swap = add(apply_creation(from_up, dn), apply_creation(from_dn, up));
    return scaled(add(keep, swap), 1.0 / std::sqrt(2.0));
}

// Sparse action of H = g P_{C up} (|1><0|_T d + |0><1|_T d†). Raising the
// sink beyond its cap drops the term together with its Hermitian partner,
// which keeps the restriction of H to the capped space self-adjoint.
QuantumState sink_exchange_action(const QuantumState& s, const Wiring& w, std::size_t control_up,
                                  std::size_t target, double g, int cutoff) {
    QuantumState::AmplitudeMap out;
    for (const auto& [pat, amp] : s.amplitudes()) {
        if (pat[control_up] < 1) continue;
        const int nt = pat[target];
        const int k = pat[w.sink];
        if (nt == 0 && k >= 1) {
            OccupationPattern q = pat;
            q[target] = 1;
            q[w.sink] = static_cast<std::uint8_t>(k - 1);
            out[q] += g * std::sqrt(k) * amp;
        }
        if (nt == 1 && k < cutoff) {
            OccupationPattern q = pat;
            q[target] = 0;
            q[w.sink] = static_cast<std::uint8_t>(k + 1);
            out[q] += g * std::sqrt(k + 1) * amp;
        }
    }
    if (out.empty()) return scaled(QuantumState::vacuum(s.system()), Cplx(0.0, 0.0));
    return QuantumState::with_terms(s.system(), out);
}

// exp(-i H t)|psi> in steps of dt ||H|| <= 1/2, each step summed as a Taylor
// series to machine precision. The step error is far below the fidelity
// budget; finite-alpha effects dominate every observable deviation.
QuantumState evolve_stepped(QuantumState state,
                            const std::function<QuantumState(const QuantumState&)>& h_action,
                            double time, double h_norm_bound) {
    const int steps = std::max(1, static_cast<int>(std::ceil(time * h_norm_bound / 0.5)));
    const double dt = time / steps;
    for (int s = 0; s < steps; ++s) {
        QuantumState acc = state;
        QuantumState term = state;
        for (int j = 1;; ++j) {
            term = scaled(h_action(term), Cplx(0.0, -dt / j));
            acc = add(acc, term);
            if (term.norm() < 1e-16) break;
            if (j >= 80) throw std::runtime_error("stepped evolution series did not converge");
        }
        state = acc.normalized().state;
    }
    return state;
}

// The finished exchange rotates |0>_T -> -i e^{i arg alpha} |1>_T and
// |1>_T -> -i e^{-i arg alpha} |0>_T on the control-up block; this phase
// fix aligns it with the ideal flip (recorded gate convention).
QuantumState apply_flip_phase_fix(const QuantumState& s, std::size_t control_up,
                                  std::size_t target, Cplx alpha) {
    const double phi = std::arg(alpha);
    const Cplx fix_empty = Cplx(0.0, 1.0) * std::exp(Cplx(0.0, phi));
    const Cplx fix_occupied = Cplx(0.0, 1.0) * std::exp(Cplx(0.0, -phi));
    QuantumState::AmplitudeMap out;
    for (auto [pat, amp] : s.amplitudes()) {
        if (pat[control_up] >= 1 && pat[target] <= 1)
            amp *= pat[target] == 1 ? fix_occupied : fix_empty;
        out[pat] = amp;
    }
    return QuantumState::with_terms(s.system(), out);
}

QuantumState run_circuit(const Wiring& w, const Eigen::Vector4cd& chi, const TeleportOptions& opts,
                         const CoherentSource* sink) {
    QuantumState state = initial_state(w, chi, sink);
    const std::size_t t1 = opts.orientation.up_is_first ? w.au : w.ad;
    const std::size_t t2 = opts.orientation.up_is_first ? w.ad : w.au;
    if (sink != nullptr) {
        const double g = opts.coupling;
        const double t = kPi / (2.0 * g * std::abs(opts.alpha));
        const double bound = 2.0 * g * std::sqrt(static_cast<double>(sink->cutoff));
        const auto cnot = [&](std::size_t control, std::size_t target) {
            auto action = [&](const QuantumState& x) {
                return sink_exchange_action(x, w, control, target, g, sink->cutoff);
            };
            state = evolve_stepped(std::move(state), action, t, bound);
            state = apply_flip_phase_fix(state, control, target, opts.alpha);
        };
        cnot(w.c1u, t1);
        cnot(w.c2u, t2);
    } else {
        state = apply_flip_controlled(state, w.c1u, t1);
        state = apply_flip_controlled(state, w.c2u, t2);
    }
    state = apply_source_hadamard(state, "C1");
    state = apply_source_hadamard(state, "C2");
    return state.normalized().state;
}

// Amplitudes of one measurement branch, keyed by (Bob virtual index, sink
// level). Branch index is the bit pattern 8 s1 + 4 s2 + 2 n_{A up} + n_{A dn}.
using BranchAmps = std::map<std::pair<int, int>, Cplx>;

std::array<BranchAmps, 16> split_branches(const Wiring& w, const QuantumState& s,
                                          const IsomorphismOrientation& o, double& overflow) {
    std::array<BranchAmps, 16> out;
    overflow = 0.0;
    for (const auto& [pat, amp] : s.amplitudes()) {
        const int nau = pat[w.au], nad = pat[w.ad];
        const int nbu = pat[w.bu], nbd = pat[w.bd];
        if (nau > 1 || nad > 1 || nbu > 1 || nbd > 1) {
            overflow += std::norm(amp);
            continue;
        }
        const int s1 = pat[w.c1u] >= 1 ? 1 : 0;
        const int s2 = pat[w.c2u] >= 1 ? 1 : 0;
        const int branch = 8 * s1 + 4 * s2 + 2 * nau + nad;
        const int q = virtual_index(nbu, nbd, o);
        const int level = w.has_sink() ? pat[w.sink] : 0;
        out[static_cast<std::size_t>(branch)][{q, level}] += amp;
    }
    return out;
}

struct CorrectionSet {
    std::array<Eigen::Matrix4cd, 16> gate;
    double unitarity_defect = 0.0;
};

// Standard teleportation algebra, executed rather than assumed: run the
// ideal circuit on the four basis sources, read off each branch's linear map
// source -> Bob, and invert it. Scaled by 4 the maps must be unitary; a
// defect above tolerance means the wiring conventions are inconsistent.
CorrectionSet derive_corrections(Statistics stats, const IsomorphismOrientation& o) {
    const Wiring w = protocol_wiring(stats, std::nullopt);
    TeleportOptions opts;
    opts.statistics = stats;
    opts.orientation = o;
    std::array<Eigen::Matrix4cd, 16> m;
    for (auto& x : m) x.setZero();
    for (int v = 0; v < 4; ++v) {
        Eigen::Vector4cd chi = Eigen::Vector4cd::Zero();
        chi(v) = 1.0;
        const QuantumState fin = run_circuit(w, chi, opts, nullptr);
        double overflow = 0.0;
        const auto branches = split_branches(w, fin, o, overflow);
        for (int b = 0; b < 16; ++b)
            for (const auto& [key, amp] : branches[static_cast<std::size_t>(b)])
                m[static_cast<std::size_t>(b)](key.first, v) += amp;
    }
    CorrectionSet out;
    for (int b = 0; b < 16; ++b) {
        const Eigen::Matrix4cd u = 4.0 * m[static_cast<std::size_t>(b)];
        const double defect =
            (u * u.adjoint() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
        out.unitarity_defect = std::max(out.unitarity_defect, defect);
        out.gate[static_cast<std::size_t>(b)] = u.adjoint();
    }
    if (out.unitarity_defect > kCorrectionUnitarityTol)
        throw std::runtime_error("branch correction maps are not unitary");
    return out;
}

}  // namespace

ProtocolResult run_protocol(const Eigen::Vector4cd& source, const TeleportOptions& opts) {
    if (std::abs(source.norm() - 1.0) > kSourceNormTol)
        throw std::invalid_argument("source state must be normalized");
    const bool coherent = opts.mode == TeleportMode::Coherent;
    if (coherent && opts.statistics == Statistics::Fermion)
        throw std::invalid_argument(
            "coherent mode requires bosonic statistics: fermions admit no coherent "
            "source/sink mode");
    std::optional<CoherentSource> sink;
    if (coherent) {
        if (std::abs(opts.alpha) == 0.0)
            throw std::invalid_argument("coherent mode requires alpha != 0");
        if (opts.coupling <= 0.0) throw std::invalid_argument("coupling must be positive");
        sink = make_coherent_source(opts.alpha, opts.cutoff);
    }

    const CorrectionSet corrections = derive_corrections(opts.statistics, opts.orientation);
    const Wiring w =
        protocol_wiring(opts.statistics, sink ? std::optional<int>(sink->cutoff) : std::nullopt);
    const QuantumState fin = run_circuit(w, source, opts, sink ? &*sink : nullptr);

    double overflow = 0.0;
    const auto raw = split_branches(w, fin, opts.orientation, overflow);

    ProtocolResult res;
    res.correction_unitarity_defect = corrections.unitarity_defect;
    res.branches.resize(16);
    double prob_sum = 0.0;
    for (int b = 0; b < 16; ++b) {
        BranchResult& br = res.branches[static_cast<std::size_t>(b)];
        br.bits = {(b & 8) != 0, (b & 4) != 0, (b & 2) != 0, (b & 1) != 0};

        std::map<int, Eigen::Vector4cd> per_level;
        for (const auto& [key, amp] : raw[static_cast<std::size_t>(b)]) {
            auto [it, inserted] = per_level.try_emplace(key.second, Eigen::Vector4cd::Zero());
            it->second(key.first) += amp;
        }
        Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
        for (const auto& [level, v] : per_level) rho += v * v.adjoint();

        br.probability = rho.trace().real();
        prob_sum += br.probability;
        if (br.probability > 1e-15) {
            const Eigen::Matrix4cd& c = corrections.gate[static_cast<std::size_t>(b)];
            br.bob_density = (c * rho * c.adjoint()) / br.probability;
            br.fidelity = std::real((source.adjoint() * br.bob_density * source).value());
        } else {
            br.bob_density = Eigen::Matrix4cd::Identity() / 4.0;
            br.fidelity = 0.0;
        }
        res.average_fidelity += br.probability * br.fidelity;
    }
    res.overflow_probability = std::max(0.0, 1.0 - prob_sum);

    int best = 0;
    for (int b = 1; b < 16; ++b)
        if (res.branches[static_cast<std::size_t>(b)].probability >
            res.branches[static_cast<std::size_t>(best)].probability)
            best = b;
    const BranchResult& rep = res.branches[static_cast<std::size_t>(best)];
    res.classical_bits = rep.bits;
    res.output = rep.bob_density;
    res.fidelity = rep.fidelity;
    return res;
}

std::vector<FidelitySweepPoint> coherent_fidelity_sweep(const Eigen::Vector4cd& source,
                                                        std::span<const double> mean_occupation_grid,
                                                        double coupling,
                                                        const IsomorphismOrientation& orientation) {
    std::vector<FidelitySweepPoint> out;
    out.reserve(mean_occupation_grid.size());
    for (double mean : mean_occupation_grid) {
        if (mean <= 0.0)
            throw std::invalid_argument("mean occupation grid entries must be positive");
        TeleportOptions opts;
        opts.statistics = Statistics::Boson;
        opts.mode = TeleportMode::Coherent;
        opts.alpha = Cplx(std::sqrt(mean), 0.0);
        opts.coupling = coupling;
        opts.orientation = orientation;
        const ProtocolResult r = run_protocol(source, opts);
        out.push_back({mean, minimal_coherent_cutoff(mean), r.average_fidelity,
                       r.overflow_probability});
    }
    return out;
}

}  // namespace fockent
