#include "rbskit/slh.hpp"

#include <doctest.h>

#include <complex>

using namespace rbskit;
using cd = std::complex<double>;

namespace {

SlhTriple<double> single_mode(double gamma, double detuning)
{
    SlhTriple<double> s;
    s.S = CMatrixXd::Identity(1, 1);
    s.Omega = CMatrixXd::Constant(1, 1, detuning);
    s.Phi = CMatrixXd::Constant(1, 1, std::sqrt(gamma));
    return s;
}

} // namespace

TEST_CASE("a lossless cavity reflects with a pi phase on resonance")
{
    auto sys = abcd_from_slh(single_mode(2.0, 0.0));
    auto xi = transfer_function(sys, 0.0);
    CHECK(std::abs(xi(0, 0) - cd(-1.0, 0.0)) < 1e-14);
    // off resonance the magnitude stays one
    auto off = transfer_function(sys, 3.0);
    CHECK(std::abs(off(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("internal loss gives the critical-coupling dip")
{
    auto sys = abcd_from_slh(single_mode(2.0, 0.0));
    add_internal_loss(sys, 2.0);
    auto xi = transfer_function(sys, 0.0);
    CHECK(std::abs(xi(0, 0)) < 1e-14);
}

TEST_CASE("ABCD blocks follow from the SLH triple")
{
    SlhTriple<double> s;
    s.S = CMatrixXd::Identity(2, 2);
    s.Omega = CMatrixXd::Zero(3, 3);
    s.Omega(0, 1) = s.Omega(1, 0) = 0.7;
    s.Phi = CMatrixXd::Zero(2, 3);
    s.Phi(0, 0) = 1.0;
    s.Phi(1, 2) = 0.5;
    CHECK(well_formed(s));
    auto sys = abcd_from_slh(s);
    CHECK(sys.A.rows() == 3);
    CHECK(sys.B.cols() == 2);
    CHECK(std::abs(sys.A(0, 0) - cd(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(sys.A(0, 1) - cd(0.0, -0.7)) < 1e-15);
    CHECK(std::abs(sys.B(0, 0) + 1.0) < 1e-15);
}

TEST_CASE("a passive lossless network is unitary at any frequency")
{
    SlhTriple<double> s;
    s.S = CMatrixXd::Identity(2, 2);
    s.Omega = CMatrixXd::Zero(2, 2);
    s.Omega(0, 1) = s.Omega(1, 0) = 1.3;
    s.Phi = CMatrixXd::Identity(2, 2) * std::sqrt(0.8);
    auto sys = abcd_from_slh(s);
    for (double w : {-2.0, 0.0, 0.4, 5.0})
        CHECK(is_unitary<double>(transfer_function(sys, w), 1e-12));
}

TEST_CASE("shape, time dependence and singular resolvent are reported")
{
    SlhTriple<double> bad = single_mode(1.0, 0.0);
    bad.Phi = CMatrixXd::Zero(2, 1);
    CHECK_THROWS_AS(abcd_from_slh(bad), Error);

    auto td = single_mode(1.0, 0.0);
    td.time_dependent = true;
    auto sys = abcd_from_slh(td);
    CHECK_THROWS_AS(transfer_function(sys, 0.0), Error);

    auto dark = abcd_from_slh(single_mode(0.0, 0.0));
    try {
        transfer_function(dark, 0.0);
        FAIL("expected SingularResolvent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::SingularResolvent);
    }
}

TEST_CASE("series cascade equals the product of the transfer functions")
{
    auto a = abcd_from_slh(single_mode(1.0, 0.3));
    auto b = abcd_from_slh(single_mode(2.5, -0.8));
    add_internal_loss(b, 0.4);
    auto ab = series(a, b);
    for (double w : {-1.0, 0.0, 0.6}) {
        CMatrixXd prod = transfer_function(b, w) * transfer_function(a, w);
        CHECK((transfer_function(ab, w) - prod).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("resonator-basis triple has one port per waveguide")
{
    auto a = two_ring(0.0, 1.0, 2.0, 3.0);
    auto s = slh_from_array(a);
    CHECK(s.S.rows() == 2);
    CHECK(s.Phi(0, 0).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.Phi(1, 1).real() == doctest::Approx(std::sqrt(3.0)));
    CHECK(well_formed(s));
}
