#include "rbskit/errors.hpp"
#include "rbskit/modulation.hpp"
#include "rbskit/perturbation.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace rbskit;

namespace {

// d c_j(s) / ds at s = 0 projected on c_l, from exact eigenvectors by central difference.
Eigen::MatrixXd exact_coefficients(const NormalModeBasis& b, const Eigen::MatrixXd& H0, const Eigen::MatrixXd& V,
                                   double s)
{
    auto vecs = [&](double t) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H0 + t * V);
        Eigen::MatrixXd P = b.vectors.transpose() * es.eigenvectors();
        for (int j = 0; j < P.cols(); ++j)
            if (P(j, j) < 0)
                P.col(j) *= -1;
        return P;
    };
    return (vecs(s) - vecs(-s)) / (2 * s);
}

} // namespace

TEST_CASE("two-ring coefficient against exact diagonalization")
{
    const double u = 3.0, da = 0.02, db = -0.05;
    auto a = two_ring(0.0, u, 0.0);
    Perturbation p{PerturbationKind::diagonal, {{0, da}, {1, db}}};
    auto c = corrected_modes(a, p);
    auto b = normal_modes(a);
    Eigen::MatrixXd V = perturbation_matrix(a, p);
    auto ex = exact_coefficients(b, hamiltonian(a), V, 1e-4);
    CHECK(std::abs(c.coefficients(1, 0) - ex(1, 0)) < 1e-8);
    CHECK(std::abs(c.coefficients(0, 1) - ex(0, 1)) < 1e-8);
    CHECK(std::abs(c.coefficients(1, 0)) == doctest::Approx(std::abs(da - db) / (4 * u)).epsilon(1e-12));
    CHECK(c.coefficients(0, 1) == doctest::Approx(-c.coefficients(1, 0)).epsilon(1e-12));
    for (int j = 0; j < 2; ++j)
        CHECK(c.frequencies[j] - b.frequencies[j] == doctest::Approx((da + db) / 2).epsilon(1e-12));
}

TEST_CASE("four-ring edge disorder against exact diagonalization")
{
    const double u = 2.0, v = 4.0;
    auto a = four_ring(0.0, u, v, 0.0);
    Perturbation p{PerturbationKind::edge, {{0, 0.01}, {1, -0.02}, {2, 0.03}, {3, 0.005}}};
    auto c = corrected_modes(a, p);
    auto b = normal_modes(a);
    Eigen::MatrixXd V = perturbation_matrix(a, p);
    CHECK((V - V.transpose()).cwiseAbs().maxCoeff() == 0.0);
    auto ex = exact_coefficients(b, hamiltonian(a), V, 1e-4);
    Eigen::MatrixXd off = c.coefficients - ex;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-7);
    Eigen::VectorXd first = (b.vectors.transpose() * V * b.vectors).diagonal();
    CHECK(((c.frequencies - b.frequencies) - first).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("first-order frequencies are accurate to second order")
{
    auto a = four_ring(0.0, 1.0, 2.0, 0.0);
    auto b = normal_modes(a);
    Perturbation dir{PerturbationKind::diagonal, {{0, 0.3}, {1, -0.7}, {2, 0.5}, {3, 0.1}}};
    Eigen::MatrixXd V = perturbation_matrix(a, dir);
    std::vector<double> s, err;
    for (int k = 0; k < 7; ++k) {
        const double sc = 1e-4 * std::pow(100.0, k / 6.0);
        auto c = corrected_modes(b, sc * V);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian(a) + sc * V);
        s.push_back(sc);
        err.push_back((es.eigenvalues() - c.frequencies).norm());
    }
    CHECK(loglog_slope(s, err) >= 1.9);
}

TEST_CASE("zero perturbation leaves everything unchanged")
{
    auto a = rectangular_array(2, 3, 1.0, 3.0 / std::sqrt(2.0), 5.0);
    auto b = normal_modes(a);
    auto c = corrected_modes(a, Perturbation{PerturbationKind::edge, {}});
    CHECK(c.frequencies == b.frequencies);
    CHECK(c.vectors == b.vectors);
    CHECK(c.coefficients.isZero(0.0));
    auto d = drive_in_corrected_basis(rectangular_pattern_signs(2, 3, RectPattern::P1), b, c);
    CHECK(d.M == d.M0);
    CHECK(d.residual == 0.0);
    CHECK(d.terms.empty());
}

TEST_CASE("degenerate spectrum is rejected")
{
    auto a = rectangular_array(2, 2, 1.0, 1.0, 0.0);
    try {
        corrected_modes(a, Perturbation{PerturbationKind::diagonal, {{0, 0.01}}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DegenerateSpectrum);
    }
}

TEST_CASE("large perturbations warn")
{
    auto a = two_ring(0.0, 1.0, 0.0);
    auto c = corrected_modes(a, Perturbation{PerturbationKind::diagonal, {{0, 0.5}}});
    CHECK_FALSE(c.warnings.empty());
    CHECK(corrected_modes(a, Perturbation{PerturbationKind::diagonal, {{0, 0.01}}}).warnings.empty());
}

TEST_CASE("two-ring drive picks up diagonal terms")
{
    const double u = 2.0, da = 0.04, db = -0.02;
    auto a = two_ring(0.0, u, 0.0);
    auto b = normal_modes(a);
    auto c = corrected_modes(a, Perturbation{PerturbationKind::diagonal, {{0, da}, {1, db}}});
    auto d = drive_in_corrected_basis({1, -1}, b, c);
    REQUIRE(d.terms.size() == 2);
    for (const auto& t : d.terms) {
        CHECK(t.type == "diagonal");
        CHECK(std::abs(t.coefficient) == doctest::Approx((da - db) / (2 * u)).epsilon(1e-9));
    }
    CHECK(d.terms[0].coefficient == doctest::Approx(-d.terms[1].coefficient).epsilon(1e-9));
    CHECK(std::abs(d.M(0, 1)) == doctest::Approx(std::abs(d.M0(0, 1))).epsilon(1e-3));
}

TEST_CASE("pattern robustness on the four-ring lattice")
{
    auto a = rectangular_array(2, 2, 1.0, 2.0, 0.0);
    auto p1 = robustness_report(a, rectangular_pattern_signs(2, 2, RectPattern::P1), PerturbationKind::edge, "P1");
    auto p2 = robustness_report(a, rectangular_pattern_signs(2, 2, RectPattern::P2), PerturbationKind::edge, "P2");
    auto p3 = robustness_report(a, rectangular_pattern_signs(2, 2, RectPattern::P3), PerturbationKind::edge, "P3");
    CHECK(p1.first_order_robust);
    CHECK(p1.slope >= 1.9);
    CHECK(p1.induced_terms.empty());
    CHECK_FALSE(p2.first_order_robust);
    CHECK(p2.slope <= 1.1);
    CHECK_FALSE(p2.induced_terms.empty());
    CHECK_FALSE(p3.first_order_robust);
    CHECK(p3.slope <= 1.1);
    CHECK_FALSE(p3.induced_terms.empty());
    CHECK(p1.scales.size() == 7);
    CHECK(p1.scales.front() == doctest::Approx(1e-4));
    CHECK(p1.scales.back() == doctest::Approx(1e-2));

    // every fragile residual lands on a pair outside the driven pattern or on the diagonal
    auto b = normal_modes(a);
    Eigen::MatrixXd F = drive_matrix(b.vectors, rectangular_pattern_signs(2, 2, RectPattern::P2));
    for (const auto& t : p2.induced_terms)
        CHECK((t.i == t.j || std::abs(F(t.i, t.j)) < 1e-12));

    auto again = robustness_report(a, rectangular_pattern_signs(2, 2, RectPattern::P2), PerturbationKind::edge, "P2");
    CHECK(again.residuals == p2.residuals);
}

TEST_CASE("P1 stays robust on larger lattices")
{
    auto a = rectangular_array(2, 3, 1.0, 3.0 / std::sqrt(2.0), 0.0);
    auto r = robustness_report(a, rectangular_pattern_signs(2, 3, RectPattern::P1), PerturbationKind::edge, "P1");
    CHECK(r.first_order_robust);
    CHECK(r.slope >= 1.9);
}

TEST_CASE("no drive is vacuously robust")
{
    auto a = rectangular_array(2, 2, 1.0, 2.0, 0.0);
    auto r = robustness_report(a, {0, 0, 0, 0}, PerturbationKind::edge);
    CHECK(r.first_order_robust);
    CHECK(std::isnan(r.slope));
    CHECK(r.induced_terms.empty());
}

TEST_CASE("loglog slope")
{
    CHECK(loglog_slope({1, 10, 100}, {2, 200, 20000}) == doctest::Approx(2.0));
    CHECK(parse_perturbation_kind("edge") == PerturbationKind::edge);
    CHECK_THROWS_AS(parse_perturbation_kind("x"), Error);
}
