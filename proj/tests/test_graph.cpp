#include "rbskit/errors.hpp"
#include "rbskit/graph.hpp"

#include <doctest.h>

#include <cmath>

using namespace rbskit;

namespace {

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an rbskit::Error");
    return Errc::SchemaError;
}

} // namespace

TEST_CASE("two rings split symmetrically around omega0")
{
    auto a = two_ring(100.0, 3.0, 2.0, 1.0, 0.5);
    auto b = normal_modes(a);
    REQUIRE(b.size() == 2);
    CHECK(b.frequencies(0) == doctest::Approx(97.0));
    CHECK(b.frequencies(1) == doctest::Approx(103.0));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(b.vectors(0, 0) == doctest::Approx(h));
    CHECK(b.vectors(1, 0) == doctest::Approx(-h));
    CHECK(b.vectors(0, 1) == doctest::Approx(h));
    CHECK(b.vectors(1, 1) == doctest::Approx(h));
    // per-mode rates are half the waveguide rates
    CHECK(b.gammaL(0) == doctest::Approx(1.0));
    CHECK(b.gammaR(1) == doctest::Approx(0.5));
    CHECK(b.gL(0) == 1.0);
    CHECK(b.gR(0) == -1.0);
    CHECK(b.gR(1) == 1.0);
}

TEST_CASE("four-ring cycle with v = 2u is equally spaced with uniform support")
{
    const double u = 1.5;
    auto a = four_ring(0.0, u, 2 * u, 1.0, 1.0);
    auto b = normal_modes(a);
    for (int k = 0; k < 4; ++k) {
        CHECK(b.frequencies(k) == doctest::Approx((2 * k - 3) * u));
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(b.vectors(j, k)) == doctest::Approx(0.5));
        CHECK(b.gammaL(k) == doctest::Approx(0.25));
    }
    CHECK(b.gR(0) == 1.0);
    CHECK(b.gR(1) == -1.0);
    CHECK(b.gR(2) == -1.0);
    CHECK(b.gR(3) == 1.0);
}

TEST_CASE("closed-form lattice modes agree with numerical diagonalization")
{
    for (auto [L, M] : {std::pair{2, 2}, {2, 3}, {3, 3}, {3, 4}}) {
        const double u = 1.0, v = 1.7;
        auto num = normal_modes(rectangular_array(L, M, u, v, 5.0));
        auto cf = rectangular_modes(L, M, u, v, 5.0);
        REQUIRE(cf.size() == L * M);
        for (int k = 0; k < L * M; ++k) {
            CHECK(cf.frequencies(k) == doctest::Approx(num.frequencies(k)).epsilon(1e-12));
            // columns agree up to sign
            const double d = std::abs(cf.vectors.col(k).dot(num.vectors.col(k)));
            CHECK(d == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("2x3 lattice at v = 3u/sqrt(2) has six equally spaced levels")
{
    const double u = 1.0;
    auto b = rectangular_modes(2, 3, u, 3.0 * u / std::sqrt(2.0), 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    const double expect[6] = {-5 * r, -3 * r, -r, r, 3 * r, 5 * r};
    for (int k = 0; k < 6; ++k)
        CHECK(b.frequencies(k) == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("lattice indexing is row major")
{
    CHECK(lattice_index(3, 1, 1) == 0);
    CHECK(lattice_index(3, 1, 3) == 2);
    CHECK(lattice_index(3, 2, 1) == 3);
}

TEST_CASE("build_array validates its input")
{
    CHECK(code_of([] { build_array(2, 0, {{0, 2, 1.0}}, {}, 0); }) == Errc::IndexOutOfRange);
    CHECK(code_of([] { build_array(0, 0, {}, {}, 0); }) == Errc::IndexOutOfRange);
    CHECK(code_of([] { build_array(2, 0, {{0, 1, 1.0}, {1, 0, 1.0}}, {}, 0); }) == Errc::DuplicateEdge);
    CHECK(code_of([] { build_array(2, 0, {{0, 0, 1.0}}, {}, 0); }) == Errc::DuplicateEdge);
    CHECK(code_of([] { build_array(2, 0, {{0, 1, 1.0}}, {{0, 1.0, Side::L}, {1, 1.0, Side::L}}, 0); }) ==
          Errc::DuplicateEdge);
    CHECK(code_of([] { build_array(2, 0, {{0, 1, -1.0}}, {}, 0); }) == Errc::NegativeRate);
    CHECK(code_of([] { build_array(2, 0, {{0, 1, 1.0}}, {}, -0.1); }) == Errc::NegativeRate);
    CHECK(code_of([] { build_array(3, 0, {{0, 1, 1.0}}, {}, 0); }) == Errc::DisconnectedGraph);
}

TEST_CASE("degenerate levels are grouped")
{
    auto b = normal_modes(rectangular_array(2, 2, 1.0, 1.0, 0.0));
    auto g = degenerate_groups(b.frequencies);
    REQUIRE(g.size() == 3);
    CHECK(g[1].size() == 2);
}

TEST_CASE("hamiltonian adds omega0 on the diagonal")
{
    auto a = two_ring(7.0, 2.0, 0.0);
    Eigen::MatrixXd h = hamiltonian(a);
    CHECK(h(0, 0) == 7.0);
    CHECK(h(0, 1) == 2.0);
    CHECK(coupling_matrix(a)(0, 0) == 0.0);
}
