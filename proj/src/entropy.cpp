#include "fockent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fockent {

namespace {

double max_abs_asymmetry(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(ModeSystem sys, Eigen::MatrixXcd mat)
    : basis_(sys), mat_(std::move(mat)) {
    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    if (mat_.rows() != dim || mat_.cols() != dim)
        throw std::invalid_argument("density matrix dimension does not match basis enumeration");
    if (max_abs_asymmetry(mat_) > kDensityHermTol)
        throw std::invalid_argument("density matrix is not Hermitian within tolerance");
    if (std::abs(mat_.trace().real() - 1.0) > kDensityTraceTol ||
        std::abs(mat_.trace().imag()) > kDensityTraceTol)
        throw std::invalid_argument("density matrix trace is not 1 within tolerance");
}

DensityMatrix density_from_state(const QuantumState& s) {
    if (!s.is_normalized())
        throw std::invalid_argument("density_from_state requires a normalized state");
    BasisEnumeration basis(s.system());
    const auto dense = basis.to_dense(s);
    const auto dim = static_cast<Eigen::Index>(dense.size());
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = dense[static_cast<std::size_t>(i)];
    return DensityMatrix(s.system(), v * v.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<ModeLabel>& keep) {
    const ModeSystem& sys = rho.system();
    if (keep.empty()) throw std::invalid_argument("partial trace must keep at least one mode");
    std::vector<bool> kept_mask(sys.size(), false);
    for (const auto& m : keep) {
        const std::size_t idx = sys.index_of(m);
        if (kept_mask[idx]) throw std::invalid_argument("duplicate kept mode: " + m.str());
        kept_mask[idx] = true;
    }
    if (static_cast<std::size_t>(std::count(kept_mask.begin(), kept_mask.end(), true)) ==
        sys.size())
        throw std::invalid_argument("partial trace must trace out at least one mode");

    std::vector<std::size_t> kept_pos, env_pos;  // positions in the full canonical order
    std::vector<ModeLabel> kept_modes, env_modes;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        if (kept_mask[i]) {
            kept_pos.push_back(i);
            kept_modes.push_back(sys.mode(i));
        } else {
            env_pos.push_back(i);
            env_modes.push_back(sys.mode(i));
        }
    }

    const ModeSystem kept_sys = sys.restricted_to(kept_modes);
    const ModeSystem env_sys = sys.restricted_to(env_modes);
    const BasisEnumeration kept_basis(kept_sys), env_basis(env_sys);
    const BasisEnumeration& full_basis = rho.basis();

    const std::size_t kd = kept_basis.dimension(), ed = env_basis.dimension();
    const bool fermionic = sys.statistics() == Statistics::Fermion;

    OccupationPattern full(sys.size(), 0);
    std::vector<std::size_t> full_index(kd);
    std::vector<double> sign(kd, 1.0);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kd),
                                                  static_cast<Eigen::Index>(kd));
    for (std::size_t e = 0; e < ed; ++e) {
        const OccupationPattern ep = env_basis.pattern(e);
        for (std::size_t i = 0; i < kd; ++i) {
            const OccupationPattern kp = kept_basis.pattern(i);
            for (std::size_t k = 0; k < env_pos.size(); ++k) full[env_pos[k]] = ep[k];
            for (std::size_t k = 0; k < kept_pos.size(); ++k) full[kept_pos[k]] = kp[k];
            full_index[i] = full_basis.index(full);
            if (fermionic) {
                // Parity of moving each occupied traced mode in front of the
                // kept modes that precede it in canonical order.
                int crossings = 0;
                for (std::size_t t = 0; t < env_pos.size(); ++t) {
                    if (!ep[t]) continue;
                    for (std::size_t k = 0; k < kept_pos.size(); ++k)
                        if (kept_pos[k] < env_pos[t] && kp[k]) ++crossings;
                }
                sign[i] = (crossings & 1) ? -1.0 : 1.0;
            }
        }
        for (std::size_t i = 0; i < kd; ++i)
            for (std::size_t j = 0; j < kd; ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                    sign[i] * sign[j] *
                    rho.matrix()(static_cast<Eigen::Index>(full_index[i]),
                                 static_cast<Eigen::Index>(full_index[j]));
    }
    return DensityMatrix(kept_sys, std::move(out));
}

DensityMatrix partial_trace_site(const DensityMatrix& rho, const std::string& site) {
    std::vector<ModeLabel> keep;
    for (std::size_t i : rho.system().site_mode_indices(site)) keep.push_back(rho.system().mode(i));
    return partial_trace(rho, keep);
}

double entropy_of_spectrum(const Eigen::VectorXd& eigenvalues) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lambda = eigenvalues(i);
        if (lambda < -kEigClampTol)
            throw std::runtime_error("density matrix has an eigenvalue below -1e-10");
        if (lambda > 0.0) s -= lambda * std::log2(lambda);
    }
    return s;
}

namespace {

Eigen::VectorXd hermitian_spectrum(const Eigen::MatrixXcd& m) {
    if (max_abs_asymmetry(m) > kDensityHermTol)
        throw std::runtime_error("matrix asymmetry exceeds tolerance in entropy computation");
    const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    return solver.eigenvalues();
}

}  // namespace

double von_neumann_entropy(const DensityMatrix& rho) {
    return entropy_of_spectrum(hermitian_spectrum(rho.matrix()));
}

double EntanglementReport::contribution_sum() const {
    double s = 0.0;
    for (const auto& [label, c] : sector_contributions) s += c;
    return s;
}

EntanglementReport sector_decompose(const DensityMatrix& rho, const SectorLabeler& label) {
    const std::size_t dim = rho.dimension();
    std::map<std::string, std::vector<std::size_t>> sectors;
    std::vector<std::string> label_of(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        label_of[i] = label(rho.basis().pattern(i));
        sectors[label_of[i]].push_back(i);
    }

    EntanglementReport report;
    report.total_entropy = von_neumann_entropy(rho);

    double off2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (label_of[i] != label_of[j])
                off2 += std::norm(rho.matrix()(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)));
    report.off_block_norm = std::sqrt(off2);

    for (const auto& [name, idx] : sectors) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXcd block(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b)
                block(a, b) = rho.matrix()(static_cast<Eigen::Index>(idx[a]),
                                           static_cast<Eigen::Index>(idx[b]));
        Eigen::VectorXd evals = hermitian_spectrum(block);
        report.sector_contributions[name] = entropy_of_spectrum(evals);
        std::vector<double> sorted(evals.data(), evals.data() + evals.size());
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        report.sector_eigenvalues[name] = std::move(sorted);
    }
    return report;
}

EntanglementReport occupancy_sector_decompose(const DensityMatrix& rho) {
    return sector_decompose(
        rho, [](const OccupationPattern& p) { return std::to_string(total_count(p)); });
}

}  // namespace fockent
