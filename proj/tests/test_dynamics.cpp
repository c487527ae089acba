#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fockent/dynamics.hpp"
#include "fockent/entropy.hpp"
#include "fockent/measures.hpp"
#include "fockent/states.hpp"
#include "test_support.hpp"

using namespace fockent;

namespace {
OccupationPattern pat(std::initializer_list<int> occ) {
    OccupationPattern p;
    for (int n : occ) p.push_back(static_cast<std::uint8_t>(n));
    return p;
}

double site_b_entropy(const QuantumState& s) {
    return site_entropy_measure(s, "B").total_entropy;
}
}  // namespace

TEST_CASE("on-site interaction is diagonal with weight on doubly occupied sites") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix h = hubbard_onsite(sys, 1.7, "A");
    CHECK(h.is_hermitian());
    const BasisEnumeration& basis = h.basis();
    CHECK(std::abs(h.matrix()(basis.index(pat({1, 1, 0, 0})), basis.index(pat({1, 1, 0, 0}))) -
                   Cplx(1.7, 0.0)) < 1e-14);
    CHECK(std::abs(h.matrix()(basis.index(pat({1, 0, 0, 1})), basis.index(pat({1, 0, 0, 1})))) <
          1e-14);
    CHECK((h.matrix() - h.matrix().diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <
          1e-14);

    const ModeSystem lone(Statistics::Fermion, {{"A", Spin::Up}, {"B", Spin::Up}});
    CHECK_THROWS_AS(hubbard_onsite(lone, 1.0, "A"), std::invalid_argument);
}

TEST_CASE("number operator and expectation values") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix n_au = number_operator(sys, {"A", Spin::Up});
    const QuantumState mol = molecular_orbital_state(sys);
    CHECK(std::abs(expectation(n_au, mol) - Cplx(0.5, 0.0)) < 1e-12);
}

TEST_CASE("spin-flip hopping acts on the bonding state as specified") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const double t = 1.3;
    const OperatorMatrix h = spinflip_hopping(sys, t);
    CHECK(h.is_hermitian());

    const QuantumState out = apply(h, molecular_orbital_state(sys));
    // H |mol> = -(t/2)(|1010> + |0101>): both parallel-spin patterns.
    CHECK(out.term_count() == 2);
    CHECK(std::abs(out.amplitude(pat({1, 0, 1, 0})) - Cplx(-t / 2, 0.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(pat({0, 1, 0, 1})) - Cplx(-t / 2, 0.0)) < 1e-12);

    CHECK_THROWS_AS(spinflip_hopping(two_site_system(Statistics::Boson), 1.0),
                    std::invalid_argument);
}

TEST_CASE("exact evolution under hopping follows the two-level closed form") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const double t = 1.0, eps = 0.3;
    const OperatorMatrix h = spinflip_hopping(sys, t);
    const QuantumState evolved = evolve_exact(molecular_orbital_state(sys), h, eps);
    CHECK(evolved.norm() == doctest::Approx(1.0).epsilon(1e-12));

    const double c = std::cos(eps * t) / 2.0, s = std::sin(eps * t) / 2.0;
    CHECK(std::abs(evolved.amplitude(pat({1, 1, 0, 0})) - Cplx(c, 0.0)) < 1e-12);
    CHECK(std::abs(evolved.amplitude(pat({0, 0, 1, 1})) - Cplx(c, 0.0)) < 1e-12);
    CHECK(std::abs(evolved.amplitude(pat({1, 0, 1, 0})) - Cplx(0.0, s)) < 1e-12);
    CHECK(std::abs(evolved.amplitude(pat({0, 1, 0, 1})) - Cplx(0.0, s)) < 1e-12);
    CHECK(std::abs(evolved.amplitude(pat({1, 0, 0, 1})) - Cplx(0.5, 0.0)) < 1e-12);
    CHECK(std::abs(evolved.amplitude(pat({0, 1, 1, 0})) - Cplx(-0.5, 0.0)) < 1e-12);
}

TEST_CASE("exact evolution requires a hermitian generator") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix hop = transfer_term(sys, {"B", Spin::Up}, {"A", Spin::Up});
    CHECK_FALSE(hop.is_hermitian());
    CHECK_THROWS_AS(evolve_exact(molecular_orbital_state(sys), hop, 0.1),
                    std::invalid_argument);
}

TEST_CASE("pairing measure is exactly invariant under exact hopping evolution") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix h = spinflip_hopping(sys, 1.0);
    const QuantumState mol = molecular_orbital_state(sys);
    for (double eps : {0.1, 0.3, 1.0})
        CHECK(schliemann_eta(evolve_exact(mol, h, eps).normalized().state) < 1e-12);
}

TEST_CASE("site entropy is exactly invariant under the on-site interaction") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix h = hubbard_onsite(sys, 1.0, "A");
    const QuantumState mol = molecular_orbital_state(sys);
    const double s0 = site_b_entropy(mol);
    for (double eps : {0.1, 0.3, 1.0}) {
        const double s = site_b_entropy(evolve_exact(mol, h, eps).normalized().state);
        CHECK(std::abs(s - s0) < 1e-12);
    }
}

TEST_CASE("pairing measure responds at first order to the on-site interaction") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const double u = 1.0;
    const OperatorMatrix h = hubbard_onsite(sys, u, "A");
    const QuantumState mol = molecular_orbital_state(sys);

    // Closed form: eta(eps) = sin(eps u / 2) under exact evolution.
    const double eps = 0.3;
    const double eta = schliemann_eta(evolve_exact(mol, h, eps).normalized().state);
    CHECK(eta == doctest::Approx(std::sin(eps * u / 2.0)).epsilon(1e-10));

    const ResponseProbe probe = response_order(
        [](const QuantumState& s) { return schliemann_eta(s); }, h, mol);
    CHECK_FALSE(probe.no_response);
    CHECK(probe.order == 1);
    CHECK_FALSE(probe.residual_diagnostic);
    CHECK(probe.coefficient == doctest::Approx(u / 2.0).epsilon(1e-3));
}

TEST_CASE("probe reports no response for exactly invariant measures") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState mol = molecular_orbital_state(sys);

    const ResponseProbe eta_probe = response_order(
        [](const QuantumState& s) { return schliemann_eta(s); }, spinflip_hopping(sys, 1.0),
        mol);
    CHECK(eta_probe.no_response);

    const ResponseProbe ent_probe =
        response_order(site_b_entropy, hubbard_onsite(sys, 1.0, "A"), mol);
    CHECK(ent_probe.no_response);
}

TEST_CASE("site matrix moves at first order and its entropy at second") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const double t = 1.0;
    const OperatorMatrix h = spinflip_hopping(sys, t);
    const QuantumState mol = molecular_orbital_state(sys);
    const Eigen::MatrixXcd rho0 =
        partial_trace_site(density_from_state(mol), "B").matrix();

    const MeasureFn matrix_change = [&](const QuantumState& s) {
        const Eigen::MatrixXcd rho = partial_trace_site(density_from_state(s), "B").matrix();
        return (rho - rho0).norm();
    };
    const ResponseProbe mat_probe = response_order(matrix_change, h, mol);
    CHECK(mat_probe.order == 1);
    CHECK_FALSE(mat_probe.residual_diagnostic);
    CHECK(mat_probe.coefficient == doctest::Approx(t / std::sqrt(2.0)).epsilon(1e-2));

    const ResponseProbe ent_probe = response_order(site_b_entropy, h, mol);
    CHECK(ent_probe.order == 2);
}

TEST_CASE("truncated first-order map fakes a second-order pairing response") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const double t = 1.0;
    const OperatorMatrix h = spinflip_hopping(sys, t);
    const QuantumState mol = molecular_orbital_state(sys);

    const QuantumState stepped = first_order_map(mol, h, 0.1);
    CHECK(stepped.norm() == doctest::Approx(1.0).epsilon(1e-12));

    const ResponseProbe probe =
        response_order([](const QuantumState& s) { return schliemann_eta(s); }, h, mol,
                       kDefaultEpsGrid, EvolutionMap::FirstOrder);
    CHECK_FALSE(probe.no_response);
    CHECK(probe.order == 2);
    CHECK(probe.coefficient == doctest::Approx(t * t / 2.0).epsilon(1e-3));
}

TEST_CASE("mode rotation lifts the single-particle matrix column by column") {
    auto& g = testsup::rng();
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const Eigen::MatrixXcd u = testsup::random_unitary(4, g);
    const OperatorMatrix lift = mode_rotation_operator(sys, u);
    CHECK(lift.is_unitary(1e-10));

    for (std::size_t i = 0; i < sys.size(); ++i) {
        const QuantumState one =
            apply_creation(QuantumState::vacuum(sys), sys.mode(i));
        const QuantumState rotated = apply(lift, one);
        for (std::size_t j = 0; j < sys.size(); ++j) {
            OccupationPattern p(4, 0);
            p[j] = 1;
            CHECK(std::abs(rotated.amplitude(p) -
                           u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) <
                  1e-12);
        }
    }

    CHECK_THROWS_AS(mode_rotation_operator(sys, Eigen::MatrixXcd::Identity(3, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(mode_rotation_operator(sys, 2.0 * Eigen::MatrixXcd::Identity(4, 4)),
                    std::invalid_argument);
}

TEST_CASE("two bosons interfere on a balanced splitter") {
    const ModeSystem sys(Statistics::Boson, {{"A", Spin::None}, {"B", Spin::None}}, 2);
    Eigen::MatrixXcd u(2, 2);
    u << 1, 1, 1, -1;
    u /= std::sqrt(2.0);
    const OperatorMatrix lift = mode_rotation_operator(sys, u);

    // The lift on a capped bosonic space is unitary on every total-number
    // sector that fits under the cap; columns beyond lose truncated weight.
    std::vector<Eigen::Index> safe;
    for (std::size_t i = 0; i < lift.basis().dimension(); ++i)
        if (total_count(lift.basis().pattern(i)) <= 2)
            safe.push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXcd block(safe.size(), safe.size());
    for (std::size_t r = 0; r < safe.size(); ++r)
        for (std::size_t c = 0; c < safe.size(); ++c)
            block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                lift.matrix()(safe[r], safe[c]);
    CHECK((block.adjoint() * block -
           Eigen::MatrixXcd::Identity(block.rows(), block.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);

    const QuantumState both = build_from_ops(
        sys, {{Cplx(1.0, 0.0), {{"A", Spin::None}, {"B", Spin::None}}}});
    const QuantumState out = apply(lift, both);
    const double amp = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitude(pat({2, 0})) - Cplx(amp, 0.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(pat({0, 2})) - Cplx(-amp, 0.0)) < 1e-12);
    CHECK(std::abs(out.amplitude(pat({1, 1}))) < 1e-12);
}

TEST_CASE("pairing measure is invariant under every mode rotation") {
    auto& g = testsup::rng();
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    for (int rep = 0; rep < 100; ++rep) {
        const QuantumState s = testsup::random_number_state(sys, 2, g);
        const Eigen::MatrixXcd u = testsup::random_unitary(4, g);
        const QuantumState rotated =
            apply(mode_rotation_operator(sys, u), s).normalized().state;
        CHECK(std::abs(schliemann_eta(rotated) - schliemann_eta(s)) < 1e-9);
    }
}

TEST_CASE("probe flags a zero generator as giving no response") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const OperatorMatrix zero(sys, Eigen::MatrixXcd::Zero(16, 16));
    const ResponseProbe probe = response_order(
        [](const QuantumState& s) { return schliemann_eta(s); }, zero,
        molecular_orbital_state(sys));
    CHECK(probe.no_response);
}

TEST_CASE("operator construction validates dimensions and systems") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    CHECK_THROWS_AS(OperatorMatrix(sys, Eigen::MatrixXcd::Zero(4, 4)), std::invalid_argument);

    const ModeSystem other(Statistics::Fermion, {{"C", Spin::Up}, {"C", Spin::Down}});
    const OperatorMatrix n_c = number_operator(other, {"C", Spin::Up});
    CHECK_THROWS_AS(apply(n_c, molecular_orbital_state(sys)), std::invalid_argument);
}
