// Acceptance suite: eight numbered end-to-end checks over the library, each
// printed as a single pass/fail line with its elapsed time. Tolerances and
// runtime budgets are pinned here as constants next to each criterion. The
// process exit code is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fockent/dynamics.hpp"
#include "fockent/entropy.hpp"
#include "fockent/interferometer.hpp"
#include "fockent/measures.hpp"
#include "fockent/overlap.hpp"
#include "fockent/states.hpp"
#include "fockent/teleport.hpp"
#include "test_support.hpp"

namespace {

using namespace fockent;

struct Criterion {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 8) failures.push_back(what);
    }
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Scales a raw symmetric/antisymmetric coefficient matrix so its induced
// two-particle state is normalized.
WMatrix normalized_w(Statistics stats, const Eigen::Matrix4cd& raw) {
    double norm2 = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) norm2 += 4.0 * std::norm(raw(a, b));
    if (stats == Statistics::Boson)
        for (int a = 0; a < 4; ++a) norm2 += std::norm(raw(a, a));
    return WMatrix(stats, raw / std::sqrt(norm2));
}

Eigen::Vector4cd random_source(std::mt19937& g) {
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = testsup::random_cplx(g);
    v.normalize();
    return v;
}

double site_entropy(const QuantumState& s, const std::string& site) {
    return site_entropy_measure(s, site).total_entropy;
}

// --------------------------------------------------------------------------
// 1. The bonding-orbital ground state: two ebits of site entanglement, zero
//    pairing measure, a single Slater determinant.
void criterion_molecular(Criterion& c) {
    constexpr double kEntropyTol = 1e-9;
    constexpr double kEtaTol = 1e-10;
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = molecular_orbital_state(sys);
    const double sb = site_entropy(s, "B");
    c.expect(std::abs(sb - 2.0) <= kEntropyTol, "site entropy B = " + num(sb) + ", want 2");
    const double eta = schliemann_eta(s);
    c.expect(eta <= kEtaTol, "eta = " + num(eta) + ", want 0");
    const int rank = slater_decompose(w_from_state(s)).rank;
    c.expect(rank == 1, "Slater rank = " + std::to_string(rank) + ", want 1");
}

// --------------------------------------------------------------------------
// 2. Spin-coefficient states: occupation-basis site entropy equals the
//    Wootters binary entropy of the tangle, and eta equals the concurrence.
void criterion_wootters(Criterion& c) {
    constexpr double kTol = 1e-9;
    constexpr int kReps = 1000;
    std::mt19937 g(202608231u);
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    double worst_s = 0.0, worst_eta = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        Eigen::Vector4cd v = random_source(g);
        const QuantumState s = spin_coefficient_state(sys, v(0), v(1), v(2), v(3));
        const WoottersReport wr = wootters_report(v(0), v(1), v(2), v(3));
        worst_s = std::max(worst_s, std::abs(site_entropy(s, "B") - wr.entropy));
        worst_eta = std::max(worst_eta, std::abs(schliemann_eta(s) - std::sqrt(wr.tau)));
    }
    c.expect(worst_s <= kTol, "max |site entropy - Wootters entropy| = " + num(worst_s));
    c.expect(worst_eta <= kTol, "max |eta - sqrt(tau)| = " + num(worst_eta));
}

// --------------------------------------------------------------------------
// 3. Leading response orders of the competing measures on the
//    bonding-orbital state, under on-site repulsion and spin-flip hopping.
void criterion_response(Criterion& c) {
    constexpr double kCoeffRelTol = 0.05;  // coefficient shape check, 5%
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = molecular_orbital_state(sys);
    const OperatorMatrix hu = hubbard_onsite(sys, 1.0, "A");

    const MeasureFn entropy_b = [](const QuantumState& q) { return site_entropy(q, "B"); };
    const MeasureFn eta_fn = [](const QuantumState& q) { return schliemann_eta(q); };
    // The site-B reduction of the molecular state sits at the maximally mixed
    // point, where the entropy is stationary: any order-k change in rho_B
    // moves the entropy only at order 2k.  The site measure therefore asserts
    // a change of rho_B itself, via the Frobenius displacement from the
    // unperturbed reduction.
    const Eigen::MatrixXcd rho0 = partial_trace_site(density_from_state(s), "B").matrix();
    const MeasureFn rho_disp = [rho0](const QuantumState& q) {
        return (partial_trace_site(density_from_state(q), "B").matrix() - rho0).norm();
    };

    // Exact evolution under the on-site interaction only re-phases one
    // amplitude and leaves rho_B (hence the entropy) exactly invariant; the
    // quadratic response appears through the truncated first-order map.
    const ResponseProbe r1 =
        response_order(rho_disp, hu, s, kDefaultEpsGrid, EvolutionMap::FirstOrder);
    c.expect(!r1.no_response && r1.order == 2,
             "(site reduction, on-site U): order " + std::to_string(r1.order) + ", want 2");
    const ResponseProbe r1x = response_order(entropy_b, hu, s);
    c.expect(r1x.no_response,
             "(site entropy, on-site U, exact map): expected exact invariance");

    const ResponseProbe r2 = response_order(eta_fn, hu, s);
    c.expect(!r2.no_response && r2.order == 1,
             "(eta, on-site U): order " + std::to_string(r2.order) + ", want 1");

    // Under exact evolution a single-particle generator keeps the state a
    // Slater determinant, so eta responds only through the truncated
    // first-order map; its coefficient scales as t^2/2.
    for (double t : {1.0, 2.0}) {
        const OperatorMatrix ht = spinflip_hopping(sys, t);
        const ResponseProbe r3 =
            response_order(eta_fn, ht, s, kDefaultEpsGrid, EvolutionMap::FirstOrder);
        c.expect(!r3.no_response && r3.order == 2,
                 "(eta, hopping t=" + num(t) + "): order " + std::to_string(r3.order) +
                     ", want 2");
        const double want = t * t / 2.0;
        c.expect(std::abs(r3.coefficient - want) <= kCoeffRelTol * want,
                 "(eta, hopping t=" + num(t) + "): coefficient " + num(r3.coefficient) +
                     ", want ~" + num(want));
    }
    const ResponseProbe r3x = response_order(eta_fn, spinflip_hopping(sys, 1.0), s);
    c.expect(r3x.no_response, "(eta, hopping, exact map): expected no response");

    const ResponseProbe r4 = response_order(rho_disp, spinflip_hopping(sys, 1.0), s);
    c.expect(!r4.no_response && r4.order == 1,
             "(site reduction, hopping): order " + std::to_string(r4.order) + ", want 1");
}

// --------------------------------------------------------------------------
// 4. The closed-form site-B blocks agree with the generic partial trace on
//    random coefficient matrices of both symmetries.
void criterion_blocks(Criterion& c) {
    constexpr double kTol = 1e-10;
    constexpr int kRepsPerStats = 500;
    std::mt19937 g(202608232u);
    double worst = 0.0;
    for (Statistics stats : {Statistics::Fermion, Statistics::Boson}) {
        const ModeSystem sys = two_site_system(stats);
        for (int rep = 0; rep < kRepsPerStats; ++rep) {
            const WMatrix w = normalized_w(stats, testsup::random_w_raw(stats, g));
            const DensityMatrix closed = reduced_blocks_closed_form(sys, w);
            const QuantumState s = state_from_w(sys, w);
            const DensityMatrix generic = partial_trace_site(density_from_state(s), "B");
            worst = std::max(worst,
                             (closed.matrix() - generic.matrix()).cwiseAbs().maxCoeff());
        }
    }
    c.expect(worst <= kTol, "max |closed form - partial trace| = " + num(worst));
}

// --------------------------------------------------------------------------
// 5. Bell states built from nonorthogonal orbitals: eta starts at one,
//    symmetric-spin fermionic states die as the overlap approaches one, the
//    antisymmetric combination survives with vanishing eta, monotonically.
void criterion_overlap(Criterion& c) {
    constexpr double kEtaOneTol = 1e-9;
    constexpr double kDestroyedWeight = 1e-3;   // squared prenorm at S = 0.9999
    constexpr double kPsiMinusEtaCap = 0.02;    // at S = 0.999
    constexpr double kMonotoneSlack = 1e-12;
    const std::vector<BellKind> kinds = {BellKind::PsiPlus, BellKind::PsiMinus,
                                         BellKind::PhiPlus, BellKind::PhiMinus};
    for (BellKind k : kinds) {
        const auto p0 = bell_state_nonorthogonal(Statistics::Fermion, k, 0.0);
        const double eta0 = schliemann_eta(p0.state);
        c.expect(std::abs(eta0 - 1.0) <= kEtaOneTol,
                 "eta(" + to_string(k) + ", S=0) = " + num(eta0) + ", want 1");
    }

    const auto plus = bell_state_nonorthogonal(Statistics::Fermion, BellKind::PsiPlus, 0.9999);
    c.expect(plus.prenorm * plus.prenorm < kDestroyedWeight,
             "psi-plus squared prenorm at S=0.9999 = " + num(plus.prenorm * plus.prenorm));

    const auto minus = bell_state_nonorthogonal(Statistics::Fermion, BellKind::PsiMinus, 0.999);
    c.expect(!minus.destroyed, "psi-minus destroyed at S=0.999");
    const double eta_minus = schliemann_eta(minus.state);
    c.expect(eta_minus < kPsiMinusEtaCap,
             "eta(psi-minus, S=0.999) = " + num(eta_minus) + ", want < 0.02");

    std::vector<double> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(0.99 * i / 49.0);
    for (BellKind k : kinds) {
        const auto curve = eta_vs_overlap_curve(Statistics::Fermion, k, grid);
        double prev = 2.0;
        for (const auto& p : curve) {
            if (!p.eta) continue;
            c.expect(*p.eta <= prev + kMonotoneSlack,
                     "eta(" + to_string(k) + ") rises at S = " + num(p.overlap));
            prev = *p.eta;
        }
    }
}

// --------------------------------------------------------------------------
// 6. The beam-splitter apparatus: side entropy conserved at two ebits, the
//    published sector spectra and contributions, one ebit per arm in, 1.8113
//    bits out, and the single-qubit depolarizing channel at p = 3/8.
void criterion_interferometer(Criterion& c) {
    constexpr double kTol = 1e-9;
    constexpr double kPaperTol = 5e-3;          // against the rounded 1.81
    constexpr double kArmOutExact = 1.8112781244591328;  // -2(3/8)lg(3/8)-2(1/8)lg(1/8)
    constexpr double kPTol = 1e-6;
    constexpr double kResidualTol = 1e-9;
    const ApparatusRun run = run_apparatus();

    c.expect(std::abs(run.side1_in.total_entropy - 2.0) <= kTol,
             "S(side1, in) = " + num(run.side1_in.total_entropy));
    c.expect(std::abs(run.side1_out.total_entropy - 2.0) <= kTol,
             "S(side1, out) = " + num(run.side1_out.total_entropy));

    auto check_spectrum = [&](const char* label, const std::vector<double>& want) {
        const auto it = run.side1_out.sector_eigenvalues.find(label);
        if (it == run.side1_out.sector_eigenvalues.end()) {
            c.expect(false, std::string("missing output sector ") + label);
            return;
        }
        c.expect(it->second.size() == want.size(),
                 std::string("sector ") + label + ": wrong block size");
        for (std::size_t i = 0; i < std::min(want.size(), it->second.size()); ++i)
            c.expect(std::abs(it->second[i] - want[i]) <= kTol,
                     std::string("sector ") + label + " eigenvalue " + num(it->second[i]) +
                         ", want " + num(want[i]));
    };
    check_spectrum("2+0", {0.25, 0.0});
    check_spectrum("1+1", {0.25, 0.25, 0.25, 0.0});

    const auto c20 = run.side1_out.sector_contributions.find("2+0");
    const auto c11 = run.side1_out.sector_contributions.find("1+1");
    c.expect(c20 != run.side1_out.sector_contributions.end() &&
                 std::abs(c20->second - 0.5) <= kTol,
             "2+0 contribution, want 0.5");
    c.expect(c11 != run.side1_out.sector_contributions.end() &&
                 std::abs(c11->second - 1.5) <= kTol,
             "1+1 contribution, want 1.5");

    c.expect(std::abs(run.arm1l_in.total_entropy - 1.0) <= kTol,
             "S(1L, in) = " + num(run.arm1l_in.total_entropy));
    c.expect(std::abs(run.arm1l_out.total_entropy - 1.81) <= kPaperTol,
             "S(1L, out) = " + num(run.arm1l_out.total_entropy) + " vs published 1.81");
    c.expect(std::abs(run.arm1l_out.total_entropy - kArmOutExact) <= kTol,
             "S(1L, out) = " + num(run.arm1l_out.total_entropy) + " vs closed form");

    const ChannelFit& best = run.channels.best;
    const bool single = best.variant.kind == ChannelKind::SingleQubitFirst ||
                        best.variant.kind == ChannelKind::SingleQubitSecond;
    c.expect(single, "best channel is " + to_string(best.variant.kind) +
                         ", want a single-qubit variant");
    c.expect(std::abs(best.variant.p - 0.375) <= kPTol,
             "best channel p = " + num(best.variant.p) + ", want 0.375");
    c.expect(best.residual <= kResidualTol,
             "best channel residual = " + num(best.residual));
}

// --------------------------------------------------------------------------
// 7. Teleportation: unit fidelity for every source and branch in the ideal
//    protocol; strictly improving average fidelity with the coherent sink
//    amplitude, reaching 0.9 by |alpha|^2 = 100. The measured coherent curve
//    is frozen as a regression baseline next to the canonical state files on
//    the first run and compared against on every later run.
void criterion_teleport(Criterion& c) {
    constexpr double kFidelityTol = 1e-9;
    constexpr int kSources = 100;
    constexpr double kFinalFidelity = 0.9;
    constexpr double kBaselineTol = 1e-9;
    const std::string baseline_path =
        std::string(FOCKENT_DATA_DIR) + "/coherent_fidelity_baseline.csv";

    std::mt19937 g(202608233u);
    double worst = 1.0;
    for (int rep = 0; rep < kSources; ++rep) {
        const ProtocolResult res = run_protocol(random_source(g));
        worst = std::min(worst, res.average_fidelity);
        for (const auto& br : res.branches) worst = std::min(worst, br.fidelity);
    }
    c.expect(std::abs(worst - 1.0) <= kFidelityTol,
             "ideal fidelity reaches only " + num(worst));

    Eigen::Vector4cd source;
    source << Cplx(1.0, 0.0), Cplx(2.0, 0.0), Cplx(0.0, 3.0), Cplx(1.0, -1.0);
    source.normalize();
    const std::vector<double> grid = {1.0, 4.0, 25.0, 100.0};
    const auto sweep = coherent_fidelity_sweep(source, grid);
    for (std::size_t i = 1; i < sweep.size(); ++i)
        c.expect(sweep[i].average_fidelity > sweep[i - 1].average_fidelity,
                 "fidelity not strictly increasing at |alpha|^2 = " +
                     num(sweep[i].mean_occupation));
    c.expect(sweep.back().average_fidelity >= kFinalFidelity,
             "fidelity at |alpha|^2 = 100 is " + num(sweep.back().average_fidelity));

    std::ifstream in(baseline_path);
    if (!in) {
        std::ofstream out(baseline_path);
        out << "mean_occupation,average_fidelity\n";
        char buf[80];
        for (const auto& p : sweep) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.mean_occupation,
                          p.average_fidelity);
            out << buf;
        }
        std::printf("    (coherent fidelity baseline recorded at %s)\n", baseline_path.c_str());
        return;
    }
    std::string line;
    std::getline(in, line);  // header
    for (const auto& p : sweep) {
        if (!std::getline(in, line)) {
            c.expect(false, "baseline file is short");
            break;
        }
        const auto comma = line.find(',');
        const double mean = std::strtod(line.substr(0, comma).c_str(), nullptr);
        const double fid = std::strtod(line.substr(comma + 1).c_str(), nullptr);
        c.expect(std::abs(mean - p.mean_occupation) <= 1e-12 &&
                     std::abs(fid - p.average_fidelity) <= kBaselineTol,
                 "baseline regression at |alpha|^2 = " + num(p.mean_occupation) + ": " +
                     num(p.average_fidelity) + " vs recorded " + num(fid));
    }
}

// --------------------------------------------------------------------------
// 8. Randomized property suites, 200 instances each: the fermionic sign
//    algebra, entropy symmetry of pure bipartitions, local-unitary
//    invariance, eta invariance under mode rotations, and exactly vanishing
//    off-block weight for definite particle number.
void criterion_properties(Criterion& c) {
    constexpr int kReps = 200;
    constexpr double kZeroTol = 1e-12;
    constexpr double kEntropySymTol = 1e-9;
    constexpr double kLocalUnitaryTol = 1e-10;
    constexpr double kEtaRotTol = 1e-9;
    std::mt19937 g(202608234u);
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const ModeSystem bsys = two_site_system(Statistics::Boson, 2);

    // Anticommutation and double creation.
    double worst_anti = 0.0;
    bool pauli_ok = true;
    for (int rep = 0; rep < kReps; ++rep) {
        const QuantumState s = testsup::random_state(sys, g);
        const std::size_t i = g() % sys.size();
        std::size_t j = g() % sys.size();
        if (j == i) j = (j + 1) % sys.size();
        const ModeLabel mi = sys.mode(i), mj = sys.mode(j);
        const QuantumState ij = apply_creation(apply_creation(s, mj), mi);
        const QuantumState ji = apply_creation(apply_creation(s, mi), mj);
        worst_anti = std::max(worst_anti, add(ij, ji).norm());
        pauli_ok = pauli_ok && apply_creation(apply_creation(s, mi), mi).is_zero();
    }
    c.expect(worst_anti <= kZeroTol, "anticommutation defect = " + num(worst_anti));
    c.expect(pauli_ok, "double creation failed to annihilate");

    // Entropy symmetry of the two-site bipartition.
    double worst_sym = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        const QuantumState s = rep % 2 == 0 ? testsup::random_parity_state(sys, rep % 4 / 2, g)
                                            : testsup::random_state(bsys, g);
        const DensityMatrix rho = density_from_state(s);
        worst_sym = std::max(
            worst_sym, std::abs(von_neumann_entropy(partial_trace_site(rho, "A")) -
                                von_neumann_entropy(partial_trace_site(rho, "B"))));
    }
    c.expect(worst_sym <= kEntropySymTol, "entropy asymmetry = " + num(worst_sym));

    // Local unitaries on the kept site leave its entropy unchanged.
    double worst_lu = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        const QuantumState s = testsup::random_state(sys, g);
        Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(4, 4);
        u.block<2, 2>(2, 2) = testsup::random_unitary(2, g);
        const QuantumState rotated = apply(mode_rotation_operator(sys, u), s);
        worst_lu = std::max(worst_lu,
                            std::abs(site_entropy(rotated, "B") - site_entropy(s, "B")));
    }
    c.expect(worst_lu <= kLocalUnitaryTol, "local-unitary entropy drift = " + num(worst_lu));

    // eta is blind to any single-particle basis rotation.
    double worst_eta = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        const QuantumState s = testsup::random_number_state(sys, 2, g);
        const Eigen::MatrixXcd u = testsup::random_unitary(4, g);
        const QuantumState rotated = apply(mode_rotation_operator(sys, u), s);
        worst_eta = std::max(worst_eta,
                             std::abs(schliemann_eta(rotated) - schliemann_eta(s)));
    }
    c.expect(worst_eta <= kEtaRotTol, "eta rotation drift = " + num(worst_eta));

    // Definite particle number: strictly zero off-block weight.
    double worst_off = 0.0;
    for (int rep = 0; rep < kReps; ++rep) {
        const bool f = rep % 2 == 0;
        const ModeSystem& use = f ? sys : bsys;
        const QuantumState s = testsup::random_number_state(use, 2, g);
        const auto rep_b = occupancy_sector_decompose(
            partial_trace_site(density_from_state(s), "B"));
        worst_off = std::max(worst_off, rep_b.off_block_norm);
    }
    c.expect(worst_off == 0.0, "off-block norm = " + num(worst_off) + ", want exact 0");
}

}  // namespace

int main() {
    struct Entry {
        int number;
        const char* name;
        double budget_seconds;
        std::function<void(Criterion&)> body;
    };
    const std::vector<Entry> entries = {
        {1, "molecular-orbital measures", 0.1, criterion_molecular},
        {2, "Wootters equivalence", 5.0, criterion_wootters},
        {3, "response orders", 2.0, criterion_response},
        {4, "closed-form blocks", 5.0, criterion_blocks},
        {5, "overlap curve", 1.0, criterion_overlap},
        {6, "interferometer", 2.0, criterion_interferometer},
        {7, "teleportation", 30.0, criterion_teleport},
        {8, "property suites", 10.0, criterion_properties},
    };

    int failures = 0;
    double total = 0.0;
    for (const auto& e : entries) {
        Criterion c;
        std::string error;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.body(c);
        } catch (const std::exception& ex) {
            error = ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        total += secs;
        if (secs > e.budget_seconds)
            c.expect(false, "runtime " + num(secs) + " s exceeds budget " +
                                num(e.budget_seconds) + " s");
        const bool pass = error.empty() && c.failures.empty();
        std::printf("criterion %d: %-28s %s  (%.2f s)\n", e.number, e.name,
                    pass ? "PASS" : "FAIL", secs);
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        for (const auto& f : c.failures) std::printf("    %s\n", f.c_str());
        if (!pass) ++failures;
    }
    std::printf("total: %.2f s, %d of %zu criteria failed\n", total, failures, entries.size());
    return failures;
}
