#pragma once

#include "rbskit/errors.hpp"
#include "rbskit/graph.hpp"
#include "rbskit/modulation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <vector>

namespace rbskit {

template <typename T>
using CMatrix = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
using CMatrixXd = CMatrix<double>;

// Port on a spatial waveguide carrying one frequency mode.
struct PortLabel {
    int mode = 0;
    Side side = Side::L;
    double carrier = 0.0;   // rad/s
    double linewidth = 0.0; // kappa of the mode behind the port
};

template <typename T>
struct SlhTriple {
    CMatrix<T> S;     // ports x ports
    CMatrix<T> Omega; // modes x modes
    CMatrix<T> Phi;   // ports x modes
    bool time_dependent = false;
};

template <typename T>
struct AbcdSystem {
    CMatrix<T> A, B, C, D;
    std::vector<PortLabel> ports;
    bool time_dependent = false;

    Eigen::Index modes() const { return A.rows(); }
};

template <typename T>
bool is_unitary(const CMatrix<T>& U, T tol)
{
    if (U.rows() != U.cols())
        return false;
    return (U.adjoint() * U - CMatrix<T>::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() <= tol;
}

template <typename T>
bool is_hermitian(const CMatrix<T>& H, T tol)
{
    return H.rows() == H.cols() && (H - H.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

template <typename T>
bool well_formed(const SlhTriple<T>& s, T tol = T(1e-12))
{
    return is_unitary<T>(s.S, tol) && is_hermitian<T>(s.Omega, tol * std::max<T>(T(1), s.Omega.cwiseAbs().maxCoeff()));
}

// A = -1/2 Phi^dag Phi - i Omega, B = -Phi^dag S, C = Phi, D = S.
template <typename T>
AbcdSystem<T> abcd_from_slh(const SlhTriple<T>& s)
{
    const auto m = s.Omega.rows();
    const auto p = s.S.rows();
    if (s.Omega.cols() != m || s.S.cols() != p || s.Phi.rows() != p || s.Phi.cols() != m)
        throw Error(Errc::DimensionMismatch, "SLH blocks have inconsistent shapes");
    const std::complex<T> I(0, 1);
    AbcdSystem<T> sys;
    sys.A = T(-0.5) * s.Phi.adjoint() * s.Phi - I * s.Omega;
    sys.B = -s.Phi.adjoint() * s.S;
    sys.C = s.Phi;
    sys.D = s.S;
    sys.time_dependent = s.time_dependent;
    return sys;
}

// Internal loss enters as -kappa/2 on every diagonal entry of A.
template <typename T>
void add_internal_loss(AbcdSystem<T>& sys, T kappa_int)
{
    sys.A.diagonal().array() -= std::complex<T>(kappa_int / T(2), 0);
}

// Xi(omega) = C (i omega I - A)^-1 B + D.
template <typename T>
CMatrix<T> transfer_function(const AbcdSystem<T>& sys, T omega)
{
    if (sys.time_dependent)
        throw Error(Errc::TimeDependentA, "time-dependent A has no transfer function; use the RWA engine");
    const auto m = sys.A.rows();
    if (m == 0)
        return sys.D;
    CMatrix<T> R = std::complex<T>(0, omega) * CMatrix<T>::Identity(m, m) - sys.A;
    Eigen::PartialPivLU<CMatrix<T>> lu(R);
    const T rc = lu.rcond();
    if (!(rc > T(64) * std::numeric_limits<T>::epsilon()))
        throw Error(Errc::SingularResolvent, "i omega I - A is singular at this frequency");
    return sys.C * lu.solve(sys.B) + sys.D;
}

// Output of `first` feeds the input of `second` with no delay.
template <typename T>
AbcdSystem<T> series(const AbcdSystem<T>& first, const AbcdSystem<T>& second)
{
    if (first.D.rows() != second.D.cols())
        throw Error(Errc::DimensionMismatch, "cascaded systems have different port counts");
    const auto n1 = first.A.rows(), n2 = second.A.rows();
    AbcdSystem<T> s;
    s.A = CMatrix<T>::Zero(n1 + n2, n1 + n2);
    s.A.topLeftCorner(n1, n1) = first.A;
    s.A.bottomRightCorner(n2, n2) = second.A;
    s.A.bottomLeftCorner(n2, n1) = second.B * first.C;
    s.B.resize(n1 + n2, first.B.cols());
    s.B << first.B, second.B * first.D;
    s.C.resize(second.C.rows(), n1 + n2);
    s.C << second.D * first.C, second.C;
    s.D = second.D * first.D;
    s.ports = second.ports;
    s.time_dependent = first.time_dependent || second.time_dependent;
    return s;
}

// Resonator-basis triple: one port per spatial waveguide, Omega = h0.
template <typename T = double>
SlhTriple<T> slh_from_array(const ResonatorArray& a, const ModulationSpec* drive = nullptr)
{
    SlhTriple<T> s;
    const int n = a.n;
    const int p = static_cast<int>(a.waveguides.size());
    s.Omega = hamiltonian(a).template cast<std::complex<T>>();
    s.S = CMatrix<T>::Identity(p, p);
    s.Phi = CMatrix<T>::Zero(p, n);
    for (int r = 0; r < p; ++r)
        s.Phi(r, a.waveguides[r].node) = std::sqrt(T(a.waveguides[r].gamma));
    s.time_dependent = drive && !drive->tones.empty();
    return s;
}

} // namespace rbskit
