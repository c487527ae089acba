#include "fockent/interferometer.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace fockent {

ModeSystem interferometer_system() {
    std::vector<ModeLabel> modes;
    for (const char* side : {"1", "2"})
        for (const char* arm : {"L", "R"})
            for (Spin spin : {Spin::Up, Spin::Down}) modes.push_back({side, spin, arm});
    return ModeSystem(Statistics::Fermion, std::move(modes));
}

QuantumState interferometer_input(const ModeSystem& sys) {
    const ModeLabel l1u{"1", Spin::Up, "L"}, l1d{"1", Spin::Down, "L"};
    const ModeLabel r1u{"1", Spin::Up, "R"}, r1d{"1", Spin::Down, "R"};
    const ModeLabel l2u{"2", Spin::Up, "L"}, l2d{"2", Spin::Down, "L"};
    const ModeLabel r2u{"2", Spin::Up, "R"}, r2d{"2", Spin::Down, "R"};
    const Cplx half(0.5, 0.0);
    // (triplet pair on L arms) x (triplet pair on R arms)
    return build_from_ops(sys, {{half, {l1u, l2d, r1u, r2d}},
                                {half, {l1u, l2d, r1d, r2u}},
                                {half, {l1d, l2u, r1u, r2d}},
                                {half, {l1d, l2u, r1d, r2u}}});
}

OperatorMatrix beam_splitter(const ModeSystem& sys, const std::string& side, double phase) {
    const auto m = static_cast<Eigen::Index>(sys.size());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
    const Cplx fwd = std::exp(Cplx(0.0, phase));
    bool found = false;
    for (Spin spin : {Spin::Up, Spin::Down}) {
        const ModeLabel left{side, spin, "L"}, right{side, spin, "R"};
        if (!sys.contains(left) || !sys.contains(right)) continue;
        found = true;
        const auto l = static_cast<Eigen::Index>(sys.index_of(left));
        const auto r = static_cast<Eigen::Index>(sys.index_of(right));
        const double s = 1.0 / std::sqrt(2.0);
        u(l, l) = s;
        u(r, l) = s * std::conj(fwd);
        u(l, r) = s * fwd;
        u(r, r) = -s;
    }
    if (!found) throw std::invalid_argument("side has no L/R arm pair: " + side);
    return mode_rotation_operator(sys, u);
}

Eigen::Matrix4cd virtual_qubit_map(const DensityMatrix& arm_rho) {
    if (arm_rho.dimension() != 4)
        throw std::invalid_argument("virtual qubit map needs a two-mode reduction");
    // Occupation order (n_up, n_dn) = 00, 10, 01, 11 -> qubit index 2 n_up + n_dn.
    static const int perm[4] = {0, 2, 1, 3};
    Eigen::Matrix4cd out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(perm[i], perm[j]) = arm_rho.matrix()(i, j);
    return out;
}

Eigen::Matrix4cd virtual_qubit_unmap(const Eigen::Matrix4cd& two_qubit) {
    static const int perm[4] = {0, 2, 1, 3};
    Eigen::Matrix4cd out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = two_qubit(perm[i], perm[j]);
    return out;
}

std::string to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::SingleQubitFirst: return "depolarize-first-qubit";
        case ChannelKind::SingleQubitSecond: return "depolarize-second-qubit";
        case ChannelKind::IndependentBoth: return "depolarize-both-qubits";
        case ChannelKind::UniformTwoQubit: return "uniform-two-qubit";
    }
    throw std::invalid_argument("unknown channel kind");
}

namespace {

Eigen::Matrix4cd one_qubit_depolarize(const Eigen::Matrix4cd& rho, int qubit, double p) {
    using M2 = Eigen::Matrix2cd;
    const Cplx i(0.0, 1.0);
    M2 x, y, z;
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    Eigen::Matrix4cd acc = (1.0 - p) * rho;
    for (const M2& sigma : {x, y, z}) {
        Eigen::Matrix4cd lift = Eigen::Matrix4cd::Zero();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    // qubit 0 is the high bit of the index 2 q1 + q2
                    const int row = (qubit == 0) ? 2 * a + c : 2 * c + a;
                    const int col = (qubit == 0) ? 2 * b + c : 2 * c + b;
                    lift(row, col) = sigma(a, b);
                }
        acc += (p / 3.0) * (lift * rho * lift);
    }
    return acc;
}

}  // namespace

Eigen::Matrix4cd depolarizing_channel(const Eigen::Matrix4cd& rho, const ChannelVariant& v) {
    if (v.p < 0.0 || v.p > 1.0)
        throw std::invalid_argument("channel probability must lie in [0, 1]");
    switch (v.kind) {
        case ChannelKind::SingleQubitFirst: return one_qubit_depolarize(rho, 0, v.p);
        case ChannelKind::SingleQubitSecond: return one_qubit_depolarize(rho, 1, v.p);
        case ChannelKind::IndependentBoth:
            return one_qubit_depolarize(one_qubit_depolarize(rho, 0, v.p), 1, v.p);
        case ChannelKind::UniformTwoQubit:
            return (1.0 - v.p) * rho +
                   (v.p / 4.0) * rho.trace() * Eigen::Matrix4cd::Identity();
    }
    throw std::invalid_argument("unknown channel kind");
}

std::string arm_profile_label(const OccupationPattern& p) {
    if (p.size() != 4) throw std::invalid_argument("arm profile label needs a side pattern");
    const int left = p[0] + p[1], right = p[2] + p[3];
    const int hi = std::max(left, right), lo = std::min(left, right);
    return std::to_string(hi) + "+" + std::to_string(lo);
}

namespace {

ChannelEquivalenceReport fit_channels(const Eigen::Matrix4cd& in, const Eigen::Matrix4cd& out) {
    ChannelEquivalenceReport report;
    const auto residual_at = [&](ChannelKind kind, double p) {
        return (depolarizing_channel(in, {kind, p}) - out).norm();
    };
    for (const ChannelKind kind :
         {ChannelKind::SingleQubitFirst, ChannelKind::SingleQubitSecond,
          ChannelKind::IndependentBoth, ChannelKind::UniformTwoQubit}) {
        // Dense scan, then golden-section refinement inside the best bracket.
        // The scan keeps the search robust for variants whose residual is not
        // unimodal over the whole interval.
        const int steps = 1000;
        double best_p = 0.0, best_r = residual_at(kind, 0.0);
        for (int k = 1; k <= steps; ++k) {
            const double p = static_cast<double>(k) / steps;
            const double r = residual_at(kind, p);
            if (r < best_r) {
                best_r = r;
                best_p = p;
            }
        }
        double lo = std::max(0.0, best_p - 1.0 / steps);
        double hi = std::min(1.0, best_p + 1.0 / steps);
        const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - gold * (hi - lo), x2 = lo + gold * (hi - lo);
        double f1 = residual_at(kind, x1), f2 = residual_at(kind, x2);
        while (hi - lo > 1e-12) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gold * (hi - lo);
                f1 = residual_at(kind, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gold * (hi - lo);
                f2 = residual_at(kind, x2);
            }
        }
        const double p_star = 0.5 * (lo + hi);
        const double r_star = residual_at(kind, p_star);
        ChannelFit fit;
        fit.variant = {kind, r_star < best_r ? p_star : best_p};
        fit.residual = std::min(r_star, best_r);
        fit.residual_at_match_p = residual_at(kind, kSingleQubitMatchP);
        report.fits.push_back(fit);
    }
    report.best = report.fits.front();
    for (const ChannelFit& fit : report.fits)
        if (fit.residual < report.best.residual) report.best = fit;
    return report;
}

std::vector<ModeLabel> side_modes(const ModeSystem& sys, const std::string& side) {
    std::vector<ModeLabel> keep;
    for (std::size_t i : sys.site_mode_indices(side)) keep.push_back(sys.mode(i));
    return keep;
}

}  // namespace

ApparatusRun run_apparatus(double phase) {
    const ModeSystem sys = interferometer_system();
    const QuantumState input = interferometer_input(sys);
    const OperatorMatrix bs1 = beam_splitter(sys, "1", phase);
    const OperatorMatrix bs2 = beam_splitter(sys, "2", phase);
    const QuantumState output =
        apply(bs2, apply(bs1, input)).normalized().state;

    const DensityMatrix rho_in = density_from_state(input);
    const DensityMatrix rho_out = density_from_state(output);
    const DensityMatrix side1_in_rho = partial_trace(rho_in, side_modes(sys, "1"));
    const DensityMatrix side1_out_rho = partial_trace(rho_out, side_modes(sys, "1"));
    const std::vector<ModeLabel> arm_1l = {{"1", Spin::Up, "L"}, {"1", Spin::Down, "L"}};

    ApparatusRun run{sys,
                     input,
                     output,
                     sector_decompose(side1_in_rho, arm_profile_label),
                     sector_decompose(side1_out_rho, arm_profile_label),
                     {},
                     {},
                     partial_trace(rho_in, arm_1l),
                     partial_trace(rho_out, arm_1l),
                     {}};
    run.arm1l_in = occupancy_sector_decompose(run.rho_arm_in);
    run.arm1l_out = occupancy_sector_decompose(run.rho_arm_out);
    run.channels =
        fit_channels(virtual_qubit_map(run.rho_arm_in), virtual_qubit_map(run.rho_arm_out));
    return run;
}

}  // namespace fockent
