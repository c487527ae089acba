#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fockent/fock.hpp"
#include "fockent/states.hpp"
#include "test_support.hpp"

using namespace fockent;

namespace {
const double kSqrtHalf = 1.0 / std::sqrt(2.0);

OccupationPattern pat(std::initializer_list<int> occ) {
    OccupationPattern p;
    for (int n : occ) p.push_back(static_cast<std::uint8_t>(n));
    return p;
}
}  // namespace

TEST_CASE("canonical mode order is lexicographic in site, arm, spin") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    REQUIRE(sys.size() == 4);
    CHECK(sys.mode(0) == ModeLabel{"A", Spin::Up});
    CHECK(sys.mode(1) == ModeLabel{"A", Spin::Down});
    CHECK(sys.mode(2) == ModeLabel{"B", Spin::Up});
    CHECK(sys.mode(3) == ModeLabel{"B", Spin::Down});
    CHECK(sys.index_of({"B", Spin::Up}) == 2);
    CHECK(sys.site_names() == std::vector<std::string>{"A", "B"});
    CHECK(sys.site_mode_indices("B") == std::vector<std::size_t>{2, 3});

    const ModeSystem armed(Statistics::Fermion,
                           {{"1", Spin::Down, "R"},
                            {"1", Spin::Up, "L"},
                            {"2", Spin::Up, "R"},
                            {"1", Spin::Up, "R"},
                            {"2", Spin::Down, "L"},
                            {"1", Spin::Down, "L"},
                            {"2", Spin::Down, "R"},
                            {"2", Spin::Up, "L"}});
    CHECK(armed.mode(0) == ModeLabel{"1", Spin::Up, "L"});
    CHECK(armed.mode(1) == ModeLabel{"1", Spin::Down, "L"});
    CHECK(armed.mode(2) == ModeLabel{"1", Spin::Up, "R"});
    CHECK(armed.mode(5) == ModeLabel{"2", Spin::Down, "L"});
    CHECK(armed.mode(7) == ModeLabel{"2", Spin::Down, "R"});
}

TEST_CASE("mode system rejects duplicates and bad caps") {
    CHECK_THROWS_AS(ModeSystem(Statistics::Fermion,
                               {{"A", Spin::Up}, {"A", Spin::Up}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem(Statistics::Boson, {{"A", Spin::Up}}, 0), std::invalid_argument);
    CHECK(ModeSystem(Statistics::Fermion, {{"A", Spin::Up}}).nmax() == 1);
}

TEST_CASE("per-site occupation caps override the default and survive restriction") {
    const std::vector<ModeLabel> labels = {{"A", Spin::Up}, {"A", Spin::Down}, {"D", Spin::None}};
    const ModeSystem sys(Statistics::Boson, labels, 2, {{"D", 5}});
    CHECK(sys.cap(0) == 2);
    CHECK(sys.cap(1) == 2);
    CHECK(sys.cap(2) == 5);

    // Mixed-radix enumeration: dimension is the product of (cap + 1).
    const BasisEnumeration basis(sys);
    REQUIRE(basis.dimension() == 3 * 3 * 6);
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        CHECK(basis.index(basis.pattern(i)) == i);
    CHECK(basis.pattern(9) == pat({0, 0, 1}));  // first mode fastest, radix 3,3,6

    // Creation blocks at the per-mode cap, not the system default.
    QuantumState five = QuantumState::vacuum(sys);
    for (int k = 0; k < 5; ++k) five = apply_creation(five, {"D", Spin::None});
    CHECK(five.truncation_loss() == 0.0);
    CHECK(apply_creation(five, {"D", Spin::None}).is_zero());
    CHECK_THROWS_AS(QuantumState::with_terms(sys, {{pat({0, 0, 6}), Cplx(1, 0)}}),
                    std::invalid_argument);
    CHECK_NOTHROW(QuantumState::with_terms(sys, {{pat({0, 0, 5}), Cplx(1, 0)}}));

    const ModeSystem sub = sys.restricted_to({{"D", Spin::None}, {"A", Spin::Up}});
    CHECK(sub.size() == 2);
    CHECK(sub.cap(sub.index_of({"D", Spin::None})) == 5);
    CHECK(sub.cap(sub.index_of({"A", Spin::Up})) == 2);

    CHECK_THROWS_AS(ModeSystem(Statistics::Boson, labels, 2, {{"X", 3}}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem(Statistics::Boson, labels, 2, {{"D", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(ModeSystem(Statistics::Fermion, labels, 1, {{"D", 2}}), std::invalid_argument);
}

TEST_CASE("statistics and spin strings round-trip") {
    CHECK(statistics_from_string(to_string(Statistics::Fermion)) == Statistics::Fermion);
    CHECK(statistics_from_string(to_string(Statistics::Boson)) == Statistics::Boson);
    for (Spin s : {Spin::Up, Spin::Down, Spin::None})
        CHECK(spin_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(statistics_from_string("anyon"), std::invalid_argument);
    CHECK_THROWS_AS(spin_from_string("sideways"), std::invalid_argument);
}

TEST_CASE("fermionic creation carries the parity of preceding occupied modes") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState vac = QuantumState::vacuum(sys);

    const QuantumState one = apply_creation(vac, {"A", Spin::Up});
    CHECK(one.amplitude(pat({1, 0, 0, 0})) == Cplx(1.0, 0.0));

    // c†_{A dn} c†_{A up} |0> = -|1100>: one occupied mode precedes A dn.
    const QuantumState two = apply_creation(one, {"A", Spin::Down});
    CHECK(two.amplitude(pat({1, 1, 0, 0})) == Cplx(-1.0, 0.0));

    // Creating in descending canonical order crosses nothing.
    const QuantumState asc =
        apply_creation(apply_creation(vac, {"B", Spin::Up}), {"A", Spin::Down});
    CHECK(asc.amplitude(pat({0, 1, 1, 0})) == Cplx(1.0, 0.0));

    // Pauli exclusion maps the doubly created term to zero.
    CHECK(apply_creation(one, {"A", Spin::Up}).is_zero());
}

TEST_CASE("fermionic annihilation mirrors the creation signs") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState two = QuantumState::with_terms(sys, {{pat({1, 1, 0, 0}), Cplx(1.0, 0.0)}});
    CHECK(apply_annihilation(two, {"A", Spin::Up}).amplitude(pat({0, 1, 0, 0})) == Cplx(1.0, 0.0));
    CHECK(apply_annihilation(two, {"A", Spin::Down}).amplitude(pat({1, 0, 0, 0})) ==
          Cplx(-1.0, 0.0));
    CHECK(apply_annihilation(two, {"B", Spin::Up}).is_zero());
}

TEST_CASE("creation and annihilation are mutually adjoint") {
    auto& g = testsup::rng();
    for (const Statistics st : {Statistics::Fermion, Statistics::Boson}) {
        const ModeSystem sys = two_site_system(st);
        for (int rep = 0; rep < 200; ++rep) {
            const QuantumState a = testsup::random_state(sys, g);
            const QuantumState b = testsup::random_state(sys, g);
            const ModeLabel m = sys.mode(static_cast<std::size_t>(g() % sys.size()));
            const Cplx lhs = inner_product(a, apply_creation(b, m));
            const Cplx rhs = inner_product(apply_annihilation(a, m), b);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
}

TEST_CASE("fermionic creation operators anticommute") {
    auto& g = testsup::rng();
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    for (int rep = 0; rep < 200; ++rep) {
        const QuantumState s = testsup::random_state(sys, g);
        const ModeLabel m1 = sys.mode(g() % sys.size());
        const ModeLabel m2 = sys.mode(g() % sys.size());
        const QuantumState lhs = apply_creation(apply_creation(s, m1), m2);
        const QuantumState rhs = apply_creation(apply_creation(s, m2), m1);
        const QuantumState sum = add(lhs, rhs);
        if (m1 == m2)
            CHECK(lhs.is_zero());
        else
            CHECK(sum.norm() < 1e-12);
    }
}

TEST_CASE("bosonic ladder operators carry square-root factors and cap loss") {
    const ModeSystem sys(Statistics::Boson, {{"A", Spin::None}, {"B", Spin::None}}, 2);
    const QuantumState vac = QuantumState::vacuum(sys);
    const ModeLabel a{"A", Spin::None};

    QuantumState s = apply_creation(apply_creation(vac, a), a);
    CHECK(std::abs(s.amplitude(pat({2, 0})) - Cplx(std::sqrt(2.0), 0.0)) < 1e-14);
    CHECK(s.truncation_loss() == 0.0);

    // A third quantum cannot be stored at nmax = 2: the term is dropped and
    // the lost weight |amp|^2 (n+1) = 2 * 3 is recorded.
    const QuantumState blocked = apply_creation(s, a);
    CHECK(blocked.is_zero());
    CHECK(blocked.truncation_loss() == doctest::Approx(6.0).epsilon(1e-14));

    const QuantumState down = apply_annihilation(s, a);
    CHECK(std::abs(down.amplitude(pat({1, 0})) - Cplx(2.0, 0.0)) < 1e-14);
}

TEST_CASE("inner product is conjugate-linear in its first argument") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = QuantumState::with_terms(sys, {{pat({1, 0, 0, 0}), Cplx(1.0, 0.0)}});
    const QuantumState is = scaled(s, Cplx(0.0, 1.0));
    CHECK(std::abs(inner_product(is, s) - Cplx(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(inner_product(s, is) - Cplx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("state validation rejects malformed amplitude maps") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    CHECK_THROWS_AS(QuantumState::with_terms(sys, {{pat({1, 0, 0}), Cplx(1.0, 0.0)}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(QuantumState::with_terms(sys, {{pat({2, 0, 0, 0}), Cplx(1.0, 0.0)}}),
                    std::invalid_argument);
    const ModeSystem bos = two_site_system(Statistics::Boson);
    CHECK_THROWS_AS(QuantumState::with_terms(bos, {{pat({3, 0, 0, 0}), Cplx(1.0, 0.0)}}),
                    std::invalid_argument);
}

TEST_CASE("normalization reports the original norm and rejects the zero state") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s =
        QuantumState::with_terms(sys, {{pat({1, 0, 0, 0}), Cplx(3.0, 0.0)},
                                       {pat({0, 1, 0, 0}), Cplx(0.0, 4.0)}});
    const auto norm = s.normalized();
    CHECK(norm.original_norm == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(norm.state.is_normalized());
    CHECK(norm.state.norm() == doctest::Approx(1.0).epsilon(1e-14));

    const QuantumState zero = scaled(s, Cplx(0.0, 0.0));
    CHECK(zero.is_zero());
    CHECK_THROWS_AS(zero.normalized(), std::runtime_error);
}

TEST_CASE("build_from_ops resolves fermionic reordering and normalizes") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = build_from_ops(
        sys, {{Cplx(1.0, 0.0), {{"A", Spin::Down}, {"A", Spin::Up}}}});
    CHECK(s.amplitude(pat({1, 1, 0, 0})) == Cplx(-1.0, 0.0));

    // A Pauli-violating string alone has zero norm.
    CHECK_THROWS_AS(
        build_from_ops(sys, {{Cplx(1.0, 0.0), {{"A", Spin::Up}, {"A", Spin::Up}}}}),
        std::runtime_error);
}

TEST_CASE("number sector projection keeps amplitudes and reports the weight") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = QuantumState::with_terms(
        sys, {{pat({0, 0, 0, 0}), Cplx(0.6, 0.0)}, {pat({1, 1, 0, 0}), Cplx(0.8, 0.0)}});
    const SectorProjection proj = number_sector_project(s, 2);
    CHECK(proj.retained_norm == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(proj.state.amplitude(pat({1, 1, 0, 0})) == Cplx(0.8, 0.0));
    CHECK(proj.state.amplitude(pat({0, 0, 0, 0})) == Cplx(0.0, 0.0));
}

TEST_CASE("basis enumeration varies the first canonical mode fastest") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const BasisEnumeration basis(sys);
    REQUIRE(basis.dimension() == 16);
    CHECK(basis.pattern(0) == pat({0, 0, 0, 0}));
    CHECK(basis.pattern(1) == pat({1, 0, 0, 0}));
    CHECK(basis.pattern(2) == pat({0, 1, 0, 0}));
    CHECK(basis.pattern(3) == pat({1, 1, 0, 0}));
    CHECK(basis.pattern(15) == pat({1, 1, 1, 1}));
    for (std::size_t i = 0; i < basis.dimension(); ++i) CHECK(basis.index(basis.pattern(i)) == i);

    const ModeSystem bos = two_site_system(Statistics::Boson);  // nmax 2
    CHECK(BasisEnumeration(bos).dimension() == 81);
}

TEST_CASE("dense vector round trip preserves a state") {
    auto& g = testsup::rng();
    const ModeSystem sys = two_site_system(Statistics::Boson);
    const BasisEnumeration basis(sys);
    const QuantumState s = testsup::random_state(sys, g);
    const auto dense = basis.to_dense(s);
    const QuantumState back = basis.from_dense(dense, true);
    for (const auto& [p, amp] : s.amplitudes()) CHECK(std::abs(back.amplitude(p) - amp) < 1e-14);
    CHECK(back.is_normalized());
}

TEST_CASE("bonding-orbital state has the expected four amplitudes") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState s = molecular_orbital_state(sys);
    CHECK(s.is_normalized());
    CHECK(s.term_count() == 4);
    CHECK(std::abs(s.amplitude(pat({1, 1, 0, 0})) - Cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.amplitude(pat({1, 0, 0, 1})) - Cplx(0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.amplitude(pat({0, 1, 1, 0})) - Cplx(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(s.amplitude(pat({0, 0, 1, 1})) - Cplx(0.5, 0.0)) < 1e-14);
}

TEST_CASE("localized Bell states have unit norm and the advertised signs") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    const QuantumState psip = localized_bell_state(sys, BellKind::PsiPlus);
    CHECK(std::abs(psip.amplitude(pat({1, 0, 0, 1})) - Cplx(kSqrtHalf, 0.0)) < 1e-14);
    CHECK(std::abs(psip.amplitude(pat({0, 1, 1, 0})) - Cplx(kSqrtHalf, 0.0)) < 1e-14);

    const QuantumState psim = localized_bell_state(sys, BellKind::PsiMinus);
    CHECK(std::abs(psim.amplitude(pat({1, 0, 0, 1})) - Cplx(kSqrtHalf, 0.0)) < 1e-14);
    CHECK(std::abs(psim.amplitude(pat({0, 1, 1, 0})) - Cplx(-kSqrtHalf, 0.0)) < 1e-14);

    const QuantumState phim = localized_bell_state(sys, BellKind::PhiMinus);
    CHECK(std::abs(phim.amplitude(pat({1, 0, 1, 0})) - Cplx(kSqrtHalf, 0.0)) < 1e-14);
    CHECK(std::abs(phim.amplitude(pat({0, 1, 0, 1})) - Cplx(-kSqrtHalf, 0.0)) < 1e-14);

    for (BellKind k : {BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus,
                       BellKind::PhiMinus}) {
        CHECK(localized_bell_state(sys, k).is_normalized());
        CHECK(bell_kind_from_string(to_string(k)) == k);
    }
}

TEST_CASE("spin coefficient state rejects the zero vector") {
    const ModeSystem sys = two_site_system(Statistics::Fermion);
    CHECK_THROWS_AS(spin_coefficient_state(sys, Cplx(0, 0), Cplx(0, 0), Cplx(0, 0), Cplx(0, 0)),
                    std::exception);
}
