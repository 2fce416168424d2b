#include "rbskit/td_oracle.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

namespace rbskit {

namespace {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
constexpr cd I{0.0, 1.0};

// Dormand-Prince 5(4) tableau.
constexpr double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double A[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double E[7] = {35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
                         125.0 / 192 - 393.0 / 640, -2187.0 / 6784 + 92097.0 / 339200,
                         11.0 / 84 - 187.0 / 2100, -1.0 / 40};

double mode_kappa_min(const NormalModeBasis& b, double kappa_int)
{
    double k = std::numeric_limits<double>::infinity();
    for (int j = 0; j < b.size(); ++j) {
        double kj = b.gammaL(j) + b.gammaR(j) + kappa_int;
        if (kj > 0.0)
            k = std::min(k, kj);
    }
    return k;
}

double min_splitting(const Eigen::VectorXd& w)
{
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < w.size(); ++k)
        if (w(k) - w(k - 1) > degeneracy_tol(w))
            d = std::min(d, w(k) - w(k - 1));
    return d;
}

std::vector<double> ranks(const std::vector<double>& v)
{
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (size_t i = 0; i < idx.size();) {
        size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
            ++j;
        for (size_t k = i; k <= j; ++k)
            r[idx[k]] = 0.5 * double(i + j) + 1.0;
        i = j + 1;
    }
    return r;
}

} // namespace

TimeSeries integrate(const ResonatorArray& array, const ModulationSpec& mod, const std::vector<InputTone>& inputs,
                     const SimulationConfig& cfg)
{
    validate(mod, array.n);
    const int n = array.n;
    const NormalModeBasis basis = normal_modes(array);
    const double kmin = mode_kappa_min(basis, array.kappa_int);
    if (!std::isfinite(kmin))
        throw Error(Errc::SchemaError, "no mode is damped; a steady state does not exist");
    const double duration = std::isnan(cfg.duration) ? 60.0 / kmin : cfg.duration;
    if (duration * kmin < 20.0)
        throw Error(Errc::InsufficientWindow, "duration * kappa_min must be at least 20 to reach steady state");

    const Eigen::MatrixXd U = coupling_matrix(array);
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k)
        F(k) = mod.signs.empty() ? 0.0 : mod.signs[k];

    // time-independent part: -i U - (Phi^T Phi + kappa_int) / 2
    Eigen::MatrixXcd A0 = -I * U.cast<cd>();
    for (const auto& w : array.waveguides)
        A0(w.node, w.node) -= 0.5 * w.gamma;
    A0.diagonal().array() -= 0.5 * array.kappa_int;

    struct Drive {
        int node;
        Side side;
        double sqrt_gamma;
        double detuning;
        cd amp;
    };
    std::vector<Drive> drives;
    TimeSeries s;
    s.omega0 = array.omega0;
    for (const auto& in : inputs) {
        auto wg = array.waveguide(in.side);
        if (!wg)
            throw Error(Errc::PortMismatch, std::string("no waveguide on side ") + side_char(in.side));
        drives.push_back({wg->node, in.side, std::sqrt(wg->gamma), in.omega - array.omega0, in.amplitude});
        s.input_power += std::norm(in.amplitude);
    }

    double span = 0.0, tone_max = 0.0, eps_sum = 0.0, in_max = 0.0;
    for (int k = 0; k < n; ++k)
        span = std::max(span, std::abs(basis.frequencies(k) - array.omega0));
    for (const auto& t : mod.tones) {
        tone_max = std::max(tone_max, t.omega_d);
        eps_sum += t.eps;
    }
    for (const auto& d : drives)
        in_max = std::max(in_max, std::abs(d.detuning));
    span += tone_max + eps_sum + in_max;
    const double dt0 = std::numbers::pi / (8.0 * std::max(span, kmin));
    const double dmin = min_splitting(basis.frequencies);
    s.beat_period = std::isfinite(dmin) ? 2.0 * std::numbers::pi / dmin : 16.0 * dt0;
    const long per_beat = std::max(1L, long(std::ceil(s.beat_period / dt0)));
    s.dt = s.beat_period / double(per_beat);
    const long samples = long(std::ceil(duration / s.dt));

    auto eps_t = [&](double t) {
        double e = 0.0;
        for (const auto& tone : mod.tones)
            e += tone.eps * std::cos(tone.omega_d * t + tone.phi);
        return e;
    };
    auto rhs = [&](double t, const Vec& a) {
        Vec d = A0 * a;
        const double e = eps_t(t);
        if (e != 0.0)
            d.array() -= I * e * (F.array().cast<cd>() * a.array());
        for (const auto& dr : drives)
            d(dr.node) -= dr.sqrt_gamma * dr.amp * std::exp(-I * dr.detuning * t);
        return d;
    };
    auto record = [&](double t, const Vec& a) {
        s.t.push_back(t);
        s.a.push_back(a);
        Vec b(array.waveguides.size());
        for (size_t w = 0; w < array.waveguides.size(); ++w) {
            const auto& wg = array.waveguides[w];
            b(w) = std::sqrt(wg.gamma) * a(wg.node);
            for (const auto& dr : drives)
                if (dr.side == wg.side)
                    b(w) += dr.amp * std::exp(-I * dr.detuning * t);
        }
        s.b_out.push_back(std::move(b));
    };
    for (const auto& wg : array.waveguides)
        s.out_sides.push_back(wg.side);

    Vec y = Vec::Zero(n);
    double t = 0.0;
    double h = 0.25 * s.dt;
    record(0.0, y);
    Vec k[7];
    k[0] = rhs(t, y);
    const double hmin = 1e-14 * duration;
    for (long m = 1; m <= samples; ++m) {
        const double target = double(m) * s.dt;
        while (t < target) {
            bool last = false;
            double hs = h;
            if (t + hs >= target) {
                hs = target - t;
                last = true;
            }
            for (int st = 1; st < 7; ++st) {
                Vec acc = y;
                for (int j = 0; j < st; ++j)
                    if (A[st][j] != 0.0)
                        acc += hs * A[st][j] * k[j];
                k[st] = rhs(t + C[st] * hs, acc);
            }
            Vec ynew = y;
            Vec err = Vec::Zero(n);
            for (int j = 0; j < 7; ++j) {
                if (j < 6 && A[6][j] != 0.0)
                    ynew += hs * A[6][j] * k[j];
                err += hs * E[j] * k[j];
            }
            double norm = 0.0;
            for (int i = 0; i < n; ++i) {
                const double sc = cfg.atol + cfg.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                norm += std::norm(err(i)) / (sc * sc);
            }
            norm = std::sqrt(norm / n);
            const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
            if (norm <= 1.0) {
                y = std::move(ynew);
                k[0] = k[6];
                t = last ? target : t + hs;
                ++s.steps;
                if (!last)
                    h = hs * fac;
                else
                    h = std::max(h, hs * fac);
            } else {
                ++s.rejected;
                h = hs * fac;
                if (h < hmin)
                    throw Error(Errc::StepFailure, "step size underflow; tolerances unreachable");
            }
            if (s.steps + s.rejected > 200'000'000)
                throw Error(Errc::StepFailure, "step budget exhausted");
        }
        record(target, y);
    }
    return s;
}

std::complex<double> demodulate(const TimeSeries& s, Side side, double omega, double transient_fraction)
{
    int w = -1;
    for (size_t k = 0; k < s.out_sides.size(); ++k)
        if (s.out_sides[k] == side)
            w = int(k);
    if (w < 0)
        throw Error(Errc::PortMismatch, std::string("no output on side ") + side_char(side));
    const long total = long(s.t.size());
    const long first = long(std::ceil(transient_fraction * double(total - 1)));
    const long per_beat = std::lround(s.beat_period / s.dt);
    const long beats = (total - first) / per_beat;
    if (beats < 2)
        throw Error(Errc::InsufficientWindow, "steady window holds fewer than two beat periods");
    const long len = beats * per_beat;
    const long start = total - len;
    const double det = omega - s.omega0;
    cd acc = 0.0;
    double wsum = 0.0;
    for (long m = 0; m < len; ++m) {
        const double win = std::pow(std::sin(std::numbers::pi * double(m) / double(len)), 2);
        const long idx = start + m;
        acc += win * s.b_out[idx](w) * std::exp(I * det * s.t[idx]);
        wsum += win;
    }
    return acc / wsum;
}

EmpiricalTransfer steady_state_transfer(const ResonatorArray& array, const ModulationSpec& mod,
                                        const std::vector<PortLabel>& ports, const SimulationConfig& cfg)
{
    const NormalModeBasis basis = normal_modes(array);
    const int np = int(ports.size());
    for (const auto& p : ports)
        if (p.mode < 0 || p.mode >= basis.size())
            throw Error(Errc::IndexOutOfRange, "port refers to a missing mode");
    EmpiricalTransfer out;
    out.ports = ports;
    out.m = CMatrixXd::Zero(np, np);
    out.power_balance.assign(np, 0.0);
    parallel_for(size_t(np), [&](size_t c) {
        const auto& in = ports[c];
        InputTone tone{basis.frequencies(in.mode), 1.0, in.side};
        TimeSeries s = integrate(array, mod, {tone}, cfg);
        for (int r = 0; r < np; ++r)
            out.m(r, c) = demodulate(s, ports[r].side, basis.frequencies(ports[r].mode), cfg.transient_fraction);
        // time-averaged output power over whole beats of the steady window
        const long total = long(s.t.size());
        const long per_beat = std::lround(s.beat_period / s.dt);
        const long len = ((total - 1) / 2 / per_beat) * per_beat;
        double p = 0.0;
        for (long m = total - len; m < total; ++m)
            p += s.b_out[m].squaredNorm();
        out.power_balance[c] = len > 0 ? p / double(len) / s.input_power : 0.0;
    });
    return out;
}

ComparisonReport compare(const TransferMatrix& eff, const EmpiricalTransfer& emp, double tol, double min_splitting)
{
    if (eff.ports.size() != emp.ports.size())
        throw Error(Errc::PortMismatch, "effective and empirical port sets differ in size");
    for (size_t k = 0; k < eff.ports.size(); ++k)
        if (eff.ports[k].mode != emp.ports[k].mode || eff.ports[k].side != emp.ports[k].side)
            throw Error(Errc::PortMismatch, "port " + std::to_string(k) + " differs");
    ComparisonReport r;
    r.tol = tol;
    r.eps = eff.eps;
    r.eps_over_delta = min_splitting > 0.0 ? eff.eps / min_splitting : 0.0;
    r.deviation = (eff.m.cwiseAbs2() - emp.m.cwiseAbs2()).cwiseAbs();
    r.max_deviation = r.deviation.size() ? r.deviation.maxCoeff() : 0.0;
    r.pass = r.max_deviation <= tol;
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Errc::LengthMismatch, "spearman needs two equal-length series");
    auto rx = ranks(x), ry = ranks(y);
    const double n = double(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t k = 0; k < rx.size(); ++k) {
        sxy += (rx[k] - mx) * (ry[k] - my);
        sxx += (rx[k] - mx) * (rx[k] - mx);
        syy += (ry[k] - my) * (ry[k] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

void write_series_csv(std::ostream& os, const TimeSeries& s)
{
    os << "t_ns";
    const Eigen::Index n = s.a.empty() ? 0 : s.a.front().size();
    const Eigen::Index w = s.b_out.empty() ? 0 : s.b_out.front().size();
    for (Eigen::Index k = 0; k < n; ++k)
        os << ",re_a" << k << ",im_a" << k;
    for (Eigen::Index k = 0; k < w; ++k)
        os << ",re_b" << k << ",im_b" << k;
    os << '\n';
    const auto prec = os.precision(12);
    for (size_t m = 0; m < s.t.size(); ++m) {
        os << s.t[m] * 1e9;
        for (Eigen::Index k = 0; k < n; ++k)
            os << ',' << s.a[m](k).real() << ',' << s.a[m](k).imag();
        for (Eigen::Index k = 0; k < w; ++k)
            os << ',' << s.b_out[m](k).real() << ',' << s.b_out[m](k).imag();
        os << '\n';
    }
    os.precision(prec);
}

} // namespace rbskit
