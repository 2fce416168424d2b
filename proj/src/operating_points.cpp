#include "rbskit/operating_points.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/rwa.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rbskit {

PointKind parse_point_kind(const std::string& s)
{
    static const std::map<std::string, PointKind> m{
        {"ratio", PointKind::ratio_R},          {"ratio_R", PointKind::ratio_R},
        {"gcc", PointKind::GCC},                {"GCC", PointKind::GCC},
        {"bs50_minus", PointKind::bs50_minus},  {"bs50_plus", PointKind::bs50_plus},
        {"bs_R_2wg", PointKind::bs_R_2wg},      {"bs_r_2wg", PointKind::bs_R_2wg},
        {"undercoupled_peak", PointKind::undercoupled_peak},
        {"four_way", PointKind::four_way},
    };
    auto it = m.find(s);
    if (it == m.end())
        throw Error(Errc::SchemaError, "unknown operating point kind '" + s + "'");
    return it->second;
}

const char* point_kind_name(PointKind k)
{
    switch (k) {
    case PointKind::ratio_R: return "ratio_R";
    case PointKind::GCC: return "GCC";
    case PointKind::bs50_minus: return "bs50_minus";
    case PointKind::bs50_plus: return "bs50_plus";
    case PointKind::bs_R_2wg: return "bs_R_2wg";
    case PointKind::undercoupled_peak: return "undercoupled_peak";
    case PointKind::four_way: return "four_way";
    }
    return "?";
}

std::pair<double, double> epsilon_for_ratio(double R, double gamma, double kappa_int)
{
    if (!(R > 0.0 && R <= 1.0))
        throw Error(Errc::RatioUnreachable, "ratio must lie in (0, 1]");
    const double disc = gamma * gamma / R - kappa_int * kappa_int;
    if (disc < 0.0)
        throw Error(Errc::RatioUnreachable,
                    "gamma^2 / R < kappa_int^2: under-coupled, this ratio is not reachable");
    const double a = std::sqrt((1.0 - R) / R) * gamma;
    const double b = std::sqrt(disc);
    double e1 = std::abs(a - b), e2 = std::abs(a + b);
    return {std::min(e1, e2), std::max(e1, e2)};
}

double transmission_K(double R, double gamma, double kappa_int, int branch)
{
    const double disc = gamma * gamma - R * kappa_int * kappa_int;
    if (disc < 0.0)
        throw Error(Errc::RatioUnreachable, "ratio not reachable at this cooperativity");
    const double s = branch < 0 ? -1.0 : 1.0;
    return (kappa_int * std::sqrt(1.0 - R) + s * std::sqrt(disc)) / (gamma + kappa_int);
}

OperatingPoint operating_point(PointKind kind, const PointParams& p)
{
    const double g = p.gammaL, ki = p.kappa_int;
    if (!(g >= 0.0 && ki >= 0.0 && p.gammaR >= 0.0))
        throw Error(Errc::NegativeRate, "rates must be nonnegative");
    OperatingPoint op;
    op.kind = kind;
    switch (kind) {
    case PointKind::ratio_R: {
        auto [em, ep] = epsilon_for_ratio(p.R, g, ki);
        op.eps = p.branch < 0 ? em : ep;
        op.K = transmission_K(p.R, g, ki, p.branch);
        op.R = p.R;
        break;
    }
    case PointKind::GCC:
        if (g < ki)
            throw Error(Errc::RegimeViolation, "GCC needs gammaL >= kappa_int");
        op.eps = std::sqrt(g * g - ki * ki);
        op.K = std::sqrt((g - ki) / (g + ki));
        op.R = 1.0;
        break;
    case PointKind::bs50_minus:
    case PointKind::bs50_plus: {
        if (2.0 * g * g < ki * ki)
            throw Error(Errc::RegimeViolation, "50-50 point needs 2 gammaL^2 >= kappa_int^2");
        const double s = kind == PointKind::bs50_minus ? -1.0 : 1.0;
        op.eps = std::abs(g + s * std::sqrt(2.0 * g * g - ki * ki));
        op.K = transmission_K(0.5, g, ki, int(s));
        op.R = 0.5;
        break;
    }
    case PointKind::bs_R_2wg: {
        const double k = g + p.gammaR + ki;
        op.eps = k;
        op.I_R = 2.0 * g * p.gammaR / (k * k);
        op.I_L = ((p.gammaR + ki) * (p.gammaR + ki) + g * g) / (k * k);
        op.loss = 2.0 * g * ki / (k * k);
        op.R = 0.5;
        return op;
    }
    case PointKind::undercoupled_peak:
        if (g > ki)
            throw Error(Errc::RegimeViolation, "under-coupled peak needs gammaL <= kappa_int");
        op.eps = std::sqrt(ki * ki - g * g);
        op.K = ki > 0 ? std::sqrt((ki - g) / (ki + g)) : 1.0;
        op.R = ki > 0 ? g * g / (ki * ki) : 0.0;
        break;
    case PointKind::four_way:
        if (g < ki)
            throw Error(Errc::RegimeViolation, "4-way splitter needs gammaL >= kappa_int");
        op.eps = std::sqrt(g * g - ki * ki);
        op.K = (g - ki) / (g + ki);
        op.loss = 1.0 - (op.K * op.K + op.K) / 2.0;
        op.R = 0.75;
        return op;
    }
    op.loss = 1.0 - op.K * op.K;
    return op;
}

LossKind parse_loss_kind(const std::string& s)
{
    static const std::map<std::string, LossKind> m{
        {"gcc_2ring", LossKind::gcc_2ring},           {"bs_2ring_minus", LossKind::bs_2ring_minus},
        {"bs_2ring_plus", LossKind::bs_2ring_plus},   {"bs_R_2ring_2wg", LossKind::bs_R_2ring_2wg},
        {"gcc_4ring", LossKind::gcc_4ring},           {"bs_4ring_minus", LossKind::bs_4ring_minus},
        {"bs_4ring_plus", LossKind::bs_4ring_plus},   {"bs_R_4ring_2wg", LossKind::bs_R_4ring_2wg},
        {"four_way", LossKind::four_way},             {"undercoupled", LossKind::undercoupled},
    };
    auto it = m.find(s);
    if (it == m.end())
        throw Error(Errc::SchemaError, "unknown loss kind '" + s + "'");
    return it->second;
}

LossReport device_loss(LossKind kind, double aL, double aR)
{
    const double r2 = std::sqrt(2.0);
    LossReport r;
    auto sq = [](double x) { return x * x; };
    switch (kind) {
    case LossKind::gcc_2ring:
        r.loss = 4.0 / (aL + 2.0);
        break;
    case LossKind::bs_2ring_minus:
    case LossKind::bs_2ring_plus: {
        const double s = kind == LossKind::bs_2ring_minus ? 1.0 : -1.0;
        r.loss = (4.0 * r2 * (aL + 1.0) + s * 4.0 * std::sqrt(aL * aL - 2.0)) / (r2 * sq(aL + 2.0));
        break;
    }
    case LossKind::bs_R_2ring_2wg: {
        const double d = sq(aL + aR + 2.0);
        r.loss = 4.0 * aL / d;
        r.I_R = 2.0 * aL * aR / d;
        r.I_L = (sq(aR + 2.0) + aL * aL) / d;
        break;
    }
    case LossKind::gcc_4ring:
        r.loss = 8.0 / (aL + 4.0);
        break;
    case LossKind::bs_4ring_minus:
    case LossKind::bs_4ring_plus: {
        const double s = kind == LossKind::bs_4ring_minus ? 1.0 : -1.0;
        r.loss = 8.0 * (r2 * (aL + 2.0) + s * std::sqrt(aL * aL - 8.0)) / (r2 * sq(aL + 4.0));
        break;
    }
    case LossKind::bs_R_4ring_2wg: {
        const double d = sq(aL + aR + 4.0);
        r.loss = 8.0 * aL / d;
        r.I_R = 2.0 * aL * aR / d;
        r.I_L = (sq(aR + 4.0) + aL * aL) / d;
        break;
    }
    case LossKind::four_way:
        r.loss = 4.0 * (3.0 * aL + 4.0) / sq(aL + 4.0);
        break;
    case LossKind::undercoupled:
        r.loss = 2.0 * aL / (2.0 + aL);
        break;
    }
    return r;
}

NoShifterReport no_shifter_with_second_waveguide(double gL, double gR, double ki, int grid)
{
    NoShifterReport rep;
    rep.grid = grid;
    rep.reduced_to_single_waveguide = gR == 0.0;
    ClosedFormParams p;
    p.gammaL = gL;
    p.gammaR = gR;
    p.kappa_int = ki;
    const double disc = gL * gL - (gR + ki) * (gR + ki);
    if (disc >= 0.0) {
        rep.eps_gcc = std::sqrt(disc);
        p.eps = rep.eps_gcc;
        auto t = closed_form(Device::two_ring_2wg, p);
        rep.xi21_at_gcc = std::abs(t.m(1, 0));
    }
    const double kappa = gL + gR + ki;
    rep.min_xi21 = std::numeric_limits<double>::infinity();
    for (int s = 1; s <= grid; ++s) {
        p.eps = 2.0 * kappa * s / grid;
        auto t = closed_form(Device::two_ring_2wg, p);
        double x21 = std::abs(t.m(1, 0)), x41 = std::abs(t.m(3, 0));
        if (x41 > 0.01) {
            rep.min_xi21 = std::min(rep.min_xi21, x21);
            if (x21 < 1e-12)
                rep.shifter_found = true;
        }
    }
    return rep;
}

} // namespace rbskit
