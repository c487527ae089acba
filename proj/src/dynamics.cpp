#include "fockent/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace fockent {

OperatorMatrix::OperatorMatrix(ModeSystem sys, Eigen::MatrixXcd mat)
    : basis_(sys), mat_(std::move(mat)) {
    const auto dim = static_cast<Eigen::Index>(basis_.dimension());
    if (mat_.rows() != dim || mat_.cols() != dim)
        throw std::invalid_argument("operator dimension does not match basis enumeration");
}

bool OperatorMatrix::is_hermitian(double tol) const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool OperatorMatrix::is_unitary(double tol) const {
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(mat_.rows(), mat_.cols());
    return (mat_.adjoint() * mat_ - id).cwiseAbs().maxCoeff() <= tol;
}

namespace {

QuantumState basis_ket(const BasisEnumeration& basis, std::size_t index) {
    QuantumState::AmplitudeMap amps;
    amps[basis.pattern(index)] = Cplx(1.0, 0.0);
    return QuantumState::with_terms(basis.system(), amps);
}

Eigen::MatrixXcd columns_from_action(
    const BasisEnumeration& basis,
    const std::function<QuantumState(const QuantumState&)>& action) {
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        const QuantumState out = action(basis_ket(basis, static_cast<std::size_t>(c)));
        for (const auto& [pat, amp] : out.amplitudes())
            mat(static_cast<Eigen::Index>(basis.index(pat)), c) = amp;
    }
    return mat;
}

}  // namespace

OperatorMatrix transfer_term(const ModeSystem& sys, const ModeLabel& to, const ModeLabel& from) {
    BasisEnumeration basis(sys);
    auto mat = columns_from_action(basis, [&](const QuantumState& ket) {
        return apply_creation(apply_annihilation(ket, from), to);
    });
    return OperatorMatrix(sys, std::move(mat));
}

OperatorMatrix number_operator(const ModeSystem& sys, const ModeLabel& m) {
    BasisEnumeration basis(sys);
    const std::size_t idx = sys.index_of(m);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        mat(i, i) = static_cast<double>(basis.pattern(static_cast<std::size_t>(i))[idx]);
    return OperatorMatrix(sys, std::move(mat));
}

OperatorMatrix hubbard_onsite(const ModeSystem& sys, double u, const std::string& site) {
    std::size_t up_idx = sys.size(), dn_idx = sys.size();
    for (std::size_t i : sys.site_mode_indices(site)) {
        if (sys.mode(i).spin == Spin::Up) up_idx = i;
        if (sys.mode(i).spin == Spin::Down) dn_idx = i;
    }
    if (up_idx == sys.size() || dn_idx == sys.size())
        throw std::invalid_argument("on-site interaction requires both spin modes on site " + site);
    BasisEnumeration basis(sys);
    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const OccupationPattern p = basis.pattern(static_cast<std::size_t>(i));
        mat(i, i) = u * static_cast<double>(p[up_idx]) * static_cast<double>(p[dn_idx]);
    }
    return OperatorMatrix(sys, std::move(mat));
}

OperatorMatrix spinflip_hopping(const ModeSystem& sys, double t) {
    if (sys.statistics() != Statistics::Fermion)
        throw std::invalid_argument("spin-flip hopping is defined for fermions");
    if (sys.size() != 4)
        throw std::invalid_argument("spin-flip hopping requires a two-site four-mode system");
    const auto sites = sys.site_names();
    if (sites.size() != 2)
        throw std::invalid_argument("spin-flip hopping requires exactly two sites");
    const ModeLabel au{sites[0], Spin::Up}, ad{sites[0], Spin::Down};
    const ModeLabel bu{sites[1], Spin::Up}, bd{sites[1], Spin::Down};
    for (const auto& m : {au, ad, bu, bd})
        if (!sys.contains(m))
            throw std::invalid_argument("spin-flip hopping requires both spins on both sites");
    const Eigen::MatrixXcd mat =
        0.5 * t *
        (transfer_term(sys, bd, au).matrix() + transfer_term(sys, au, bd).matrix() -
         transfer_term(sys, bu, ad).matrix() - transfer_term(sys, ad, bu).matrix());
    return OperatorMatrix(sys, mat);
}

OperatorMatrix mode_rotation_operator(const ModeSystem& sys, const Eigen::MatrixXcd& u) {
    const auto m = static_cast<Eigen::Index>(sys.size());
    if (u.rows() != m || u.cols() != m)
        throw std::invalid_argument("mode rotation matrix size must match the mode count");
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("mode rotation must be unitary");
    BasisEnumeration basis(sys);
    auto mat = columns_from_action(basis, [&](const QuantumState& ket) {
        // ket is a single canonical pattern; rebuild it from vacuum with each
        // creation operator replaced by its rotated linear combination.
        const OccupationPattern p = ket.amplitudes().begin()->first;
        QuantumState out = QuantumState::vacuum(sys);
        double factorials = 1.0;
        for (std::size_t i = p.size(); i-- > 0;) {
            for (int rep = 0; rep < p[i]; ++rep) {
                QuantumState acc = scaled(out, Cplx(0.0, 0.0));
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const Cplx uji = u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
                    if (std::abs(uji) < 1e-300) continue;
                    acc = add(acc, scaled(apply_creation(out, sys.mode(j)), uji));
                }
                out = acc;
            }
            for (int rep = 2; rep <= p[i]; ++rep) factorials *= rep;
        }
        return scaled(out, Cplx(1.0 / std::sqrt(factorials), 0.0));
    });
    return OperatorMatrix(sys, std::move(mat));
}

QuantumState apply(const OperatorMatrix& op, const QuantumState& s) {
    if (!(op.system() == s.system()))
        throw std::invalid_argument("operator and state live on different systems");
    const auto dense = op.basis().to_dense(s);
    const auto dim = static_cast<Eigen::Index>(dense.size());
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = dense[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd w = op.matrix() * v;
    return op.basis().from_dense(std::span<const Cplx>(w.data(), static_cast<std::size_t>(dim)),
                                 false);
}

Cplx expectation(const OperatorMatrix& op, const QuantumState& s) {
    return inner_product(s, apply(op, s));
}

QuantumState evolve_exact(const QuantumState& s, const OperatorMatrix& h, double eps) {
    if (!(h.system() == s.system()))
        throw std::invalid_argument("operator and state live on different systems");
    if (!h.is_hermitian(1e-12))
        throw std::invalid_argument("exact evolution requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const auto dense = h.basis().to_dense(s);
    const auto dim = static_cast<Eigen::Index>(dense.size());
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = dense[static_cast<std::size_t>(i)];
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        phases(i) = std::exp(Cplx(0.0, -eps * solver.eigenvalues()(i)));
    const Eigen::VectorXcd w =
        solver.eigenvectors() * phases.cwiseProduct(solver.eigenvectors().adjoint() * v);
    return h.basis().from_dense(std::span<const Cplx>(w.data(), static_cast<std::size_t>(dim)),
                                false);
}

QuantumState first_order_map(const QuantumState& s, const OperatorMatrix& h, double eps) {
    if (!h.is_hermitian(1e-12))
        throw std::invalid_argument("first-order map requires a Hermitian generator");
    const QuantumState step = add(s, scaled(apply(h, s), Cplx(0.0, -eps)));
    return step.normalized().state;
}

ResponseProbe response_order(const MeasureFn& measure, const OperatorMatrix& h,
                             const QuantumState& s, const std::vector<double>& eps_grid,
                             EvolutionMap map) {
    if (eps_grid.size() < 2)
        throw std::invalid_argument("response probe needs at least two grid points");
    ResponseProbe probe;
    probe.baseline = measure(s);
    const double floor = 1e-12 * std::max(1.0, std::abs(probe.baseline));

    std::vector<double> ln_eps, ln_delta;
    for (double eps : eps_grid) {
        const QuantumState evolved = (map == EvolutionMap::Exact)
                                         ? evolve_exact(s, h, eps).normalized().state
                                         : first_order_map(s, h, eps);
        const double m = measure(evolved);
        probe.samples.emplace_back(eps, m);
        const double delta = std::abs(m - probe.baseline);
        if (delta > floor) {
            ln_eps.push_back(std::log(eps));
            ln_delta.push_back(std::log(delta));
        }
    }

    if (ln_eps.size() < 2) {
        probe.no_response = true;
        return probe;
    }

    const auto n = static_cast<double>(ln_eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ln_eps.size(); ++i) {
        sx += ln_eps[i];
        sy += ln_delta[i];
        sxx += ln_eps[i] * ln_eps[i];
        sxy += ln_eps[i] * ln_delta[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    probe.fitted_slope = slope;
    probe.order = static_cast<int>(std::lround(slope));
    probe.coefficient = std::exp(intercept);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < ln_eps.size(); ++i) {
        const double fit = intercept + slope * ln_eps[i];
        max_dev = std::max(max_dev, std::abs(fit - ln_delta[i]) / std::log(10.0));
    }
    probe.fit_residual = max_dev;
    probe.residual_diagnostic = max_dev > 0.2;
    return probe;
}

}  // namespace fockent
