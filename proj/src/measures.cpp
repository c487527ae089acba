#include "fockent/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace fockent {

namespace {

void check_four_mode_two_site(const ModeSystem& sys) {
    if (sys.size() != 4)
        throw std::invalid_argument("operation requires a four-mode system");
}

// Permutation sign of (a,b,c,d) as a rearrangement of (0,1,2,3); 0 on repeats.
int levi_civita4(int a, int b, int c, int d) {
    const int p[4] = {a, b, c, d};
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (p[i] == p[j]) return 0;
            if (p[i] > p[j]) sign = -sign;
        }
    return sign;
}

double induced_state_norm(const WMatrix& w) {
    // Norm of the amplitude vector produced by state_from_w.
    const auto& m = w.matrix();
    double n2 = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) n2 += std::norm(2.0 * m(a, b));
    if (w.statistics() == Statistics::Boson)
        for (int a = 0; a < 4; ++a) n2 += std::norm(m(a, a));
    return std::sqrt(n2);
}

}  // namespace

WMatrix::WMatrix(Statistics stats, const Eigen::Matrix4cd& w) : stats_(stats), w_(w) {
    const double asym = (stats == Statistics::Fermion)
                            ? (w + w.transpose()).cwiseAbs().maxCoeff()
                            : (w - w.transpose()).cwiseAbs().maxCoeff();
    if (asym > kWSymmetryTol)
        throw std::invalid_argument(
            stats == Statistics::Fermion
                ? "fermionic w matrix must be antisymmetric"
                : "bosonic w matrix must be symmetric");
}

WMatrix w_from_state(const QuantumState& s) {
    check_four_mode_two_site(s.system());
    if (!s.is_normalized())
        throw std::invalid_argument("w_from_state requires a normalized state");
    Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
    const bool fermionic = s.system().statistics() == Statistics::Fermion;
    for (const auto& [pat, amp] : s.amplitudes()) {
        if (total_count(pat) != 2)
            throw std::invalid_argument("w_from_state requires a two-particle sector state");
        int first = -1, second = -1;
        for (int m = 0; m < 4; ++m) {
            if (pat[static_cast<std::size_t>(m)] == 1) (first < 0 ? first : second) = m;
            if (pat[static_cast<std::size_t>(m)] == 2) first = second = m;
        }
        if (first == second) {
            w(first, first) = amp;  // bosonic double occupancy
        } else {
            w(first, second) = 0.5 * amp;
            w(second, first) = fermionic ? -0.5 * amp : 0.5 * amp;
        }
    }
    return WMatrix(s.system().statistics(), w);
}

QuantumState state_from_w(const ModeSystem& sys, const WMatrix& w) {
    check_four_mode_two_site(sys);
    if (sys.statistics() != w.statistics())
        throw std::invalid_argument("statistics of w matrix and system disagree");
    if (sys.statistics() == Statistics::Boson && sys.nmax() < 2)
        throw std::invalid_argument("bosonic system needs occupation cap >= 2 for w states");
    QuantumState::AmplitudeMap amps;
    const auto& m = w.matrix();
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            OccupationPattern p(4, 0);
            p[static_cast<std::size_t>(a)] = 1;
            p[static_cast<std::size_t>(b)] = 1;
            amps[p] = 2.0 * m(a, b);
        }
    if (sys.statistics() == Statistics::Boson)
        for (int a = 0; a < 4; ++a) {
            OccupationPattern p(4, 0);
            p[static_cast<std::size_t>(a)] = 2;
            amps[p] = m(a, a);
        }
    return QuantumState::with_terms(sys, amps);
}

Cplx pfaffian4(const Eigen::Matrix4cd& w) {
    return w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
}

Eigen::Matrix4cd wmatrix_dual(const Eigen::Matrix4cd& w) {
    Eigen::Matrix4cd dual = Eigen::Matrix4cd::Zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            Cplx acc(0.0, 0.0);
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const int eps = levi_civita4(a, b, c, d);
                    if (eps != 0) acc += 0.5 * static_cast<double>(eps) * std::conj(w(c, d));
                }
            dual(a, b) = acc;
        }
    return dual;
}

double schliemann_eta(const WMatrix& w) {
    if (w.statistics() != Statistics::Fermion)
        throw std::invalid_argument("eta is defined for fermionic states only");
    return 8.0 * std::abs(pfaffian4(w.matrix()));
}

double schliemann_eta(const QuantumState& s) {
    return schliemann_eta(w_from_state(s));
}

namespace {

using Vec4 = Eigen::Vector4cd;

// Removes the components of v along each (orthonormal) vector in basis.
Vec4 project_out(Vec4 v, const std::vector<Vec4>& basis) {
    for (const auto& b : basis) v -= b.dot(v) * b;  // Eigen dot conjugates b
    return v;
}

Vec4 completion_vector(const std::vector<Vec4>& used) {
    for (int i = 0; i < 4; ++i) {
        Vec4 cand = project_out(Vec4::Unit(i), used);
        if (cand.norm() > 0.5) return cand.normalized();
    }
    throw std::runtime_error("failed to complete orthonormal basis");
}

}  // namespace

SlaterDecomposition slater_decompose(const WMatrix& w) {
    if (w.statistics() != Statistics::Fermion)
        throw std::invalid_argument("Slater decomposition applies to fermionic w matrices");
    const Eigen::Matrix4cd& a = w.matrix();

    // a = U Sigma U^T implies a† a = conj(U) diag(z^2) conj(U)†, so the
    // Hermitian product's eigenvectors are conjugates of the pair vectors and
    // its eigenvalues come in pairs z_1^2, z_1^2, z_2^2, z_2^2.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(a.adjoint() * a);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed in Slater decomposition");
    const Eigen::Vector4d evals = solver.eigenvalues();  // ascending
    const Eigen::Matrix4cd evecs = solver.eigenvectors();

    SlaterDecomposition out;
    out.coefficients[0] = std::sqrt(std::max(0.0, 0.5 * (evals(2) + evals(3))));
    out.coefficients[1] = std::sqrt(std::max(0.0, 0.5 * (evals(0) + evals(1))));

    std::vector<Vec4> used;
    const int candidate_order[2][2] = {{3, 2}, {1, 0}};
    for (int p = 0; p < 2; ++p) {
        const double z = out.coefficients[static_cast<std::size_t>(p)];
        Vec4 ua = Vec4::Zero(), ub = Vec4::Zero();
        if (z > kSlaterRankTol) {
            for (int c : candidate_order[p]) {
                Vec4 cand = project_out(evecs.col(c).conjugate(), used);
                if (cand.norm() > 1e-6) {
                    ua = cand.normalized();
                    break;
                }
            }
            if (ua.norm() < 0.5) ua = completion_vector(used);
            ub = project_out(-a * ua.conjugate() / z, used);
            ub -= ua.dot(ub) * ua;
            ub.normalize();
        } else {
            ua = completion_vector(used);
            used.push_back(ua);
            ub = completion_vector(used);
            used.pop_back();
        }
        used.push_back(ua);
        used.push_back(ub);
    }

    for (int k = 0; k < 4; ++k) out.mode_vectors.col(k) = used[static_cast<std::size_t>(k)];
    Eigen::Matrix4cd sigma = Eigen::Matrix4cd::Zero();
    for (int p = 0; p < 2; ++p) {
        const double z = out.coefficients[static_cast<std::size_t>(p)];
        sigma(2 * p, 2 * p + 1) = z;
        sigma(2 * p + 1, 2 * p) = -z;
    }
    const Eigen::Matrix4cd rec =
        out.mode_vectors * sigma * out.mode_vectors.transpose();
    out.reconstruction_error = (rec - a).norm();
    out.rank = 0;
    for (double z : out.coefficients)
        if (z > kSlaterRankTol) ++out.rank;
    return out;
}

double binary_entropy(double x) {
    if (x < -1e-12 || x > 1.0 + 1e-12)
        throw std::invalid_argument("binary entropy argument outside [0, 1]");
    double s = 0.0;
    if (x > 0.0 && x < 1.0) s = -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
    return s;
}

WoottersReport wootters_report(Cplx a, Cplx b, Cplx c, Cplx d) {
    const double n2 = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    if (std::abs(n2 - 1.0) > 1e-9)
        throw std::invalid_argument("spin coefficients must be normalized");
    WoottersReport rep;
    const double conc = 2.0 * std::abs(a * d - b * c);
    rep.tau = conc * conc;
    rep.x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - rep.tau)));
    rep.entropy = binary_entropy(rep.x);
    return rep;
}

EntanglementReport site_entropy_measure(const QuantumState& s, const std::string& site) {
    const DensityMatrix rho = density_from_state(s);
    return occupancy_sector_decompose(partial_trace_site(rho, site));
}

DensityMatrix reduced_blocks_closed_form(const ModeSystem& sys, const WMatrix& w) {
    check_four_mode_two_site(sys);
    if (sys.statistics() != w.statistics())
        throw std::invalid_argument("statistics of w matrix and system disagree");
    const auto sites = sys.site_names();
    if (sites.size() != 2)
        throw std::invalid_argument("closed-form reduction requires a two-site system");
    if (std::abs(induced_state_norm(w) - 1.0) > 1e-9)
        throw std::invalid_argument("w matrix must describe a normalized state");
    // Canonical order puts the first site's up/down modes at 0,1 and the
    // second site's at 2,3; the reduction keeps the second site.
    std::vector<ModeLabel> kept = {sys.mode(2), sys.mode(3)};
    const ModeSystem kept_sys = sys.restricted_to(kept);
    const BasisEnumeration kb(kept_sys);

    const auto& m = w.matrix();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(kb.dimension()),
                                                  static_cast<Eigen::Index>(kb.dimension()));
    auto at = [&](int nu, int nd) {
        OccupationPattern p = {static_cast<std::uint8_t>(nu), static_cast<std::uint8_t>(nd)};
        return static_cast<Eigen::Index>(kb.index(p));
    };

    const Eigen::Index i00 = at(0, 0), iu = at(1, 0), id = at(0, 1), iud = at(1, 1);
    const bool bosonic = sys.statistics() == Statistics::Boson;

    rho(i00, i00) = 4.0 * std::norm(m(0, 1));
    if (bosonic) rho(i00, i00) += std::norm(m(0, 0)) + std::norm(m(1, 1));

    rho(iu, iu) = 4.0 * (std::norm(m(0, 2)) + std::norm(m(1, 2)));
    rho(id, id) = 4.0 * (std::norm(m(0, 3)) + std::norm(m(1, 3)));
    rho(iu, id) = 4.0 * (m(0, 2) * std::conj(m(0, 3)) + m(1, 2) * std::conj(m(1, 3)));
    rho(id, iu) = std::conj(rho(iu, id));

    rho(iud, iud) = 4.0 * std::norm(m(2, 3));
    if (bosonic) {
        const Eigen::Index iuu = at(2, 0), idd = at(0, 2);
        rho(iuu, iuu) = std::norm(m(2, 2));
        rho(idd, idd) = std::norm(m(3, 3));
        rho(iud, iuu) = 2.0 * m(2, 3) * std::conj(m(2, 2));
        rho(iud, idd) = 2.0 * m(2, 3) * std::conj(m(3, 3));
        rho(iuu, idd) = m(2, 2) * std::conj(m(3, 3));
        rho(iuu, iud) = std::conj(rho(iud, iuu));
        rho(idd, iud) = std::conj(rho(iud, idd));
        rho(idd, iuu) = std::conj(rho(iuu, idd));
    }
    return DensityMatrix(kept_sys, std::move(rho));
}

}  // namespace fockent
