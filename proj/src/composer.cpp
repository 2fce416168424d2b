#include "rbskit/composer.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/operating_points.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace rbskit {

namespace {

bool same_port(const PortLabel& a, const PortLabel& b)
{
    if (a.mode != b.mode || a.side != b.side)
        return false;
    const double scale = std::max({std::abs(a.carrier), std::abs(b.carrier), 1.0});
    return std::abs(a.carrier - b.carrier) <= 1e-9 * scale;
}

TransferMatrix stage_matrix(const RingStage& s, double eps, double phi)
{
    ClosedFormParams p;
    p.eps = eps;
    p.phi = phi;
    p.gammaL = s.gamma;
    p.kappa_int = s.kappa_int;
    return closed_form(Device::two_ring_1wg, p);
}

bool matches(double eps, double target)
{
    return std::abs(eps - target) <= 1e-9 * std::max(1.0, std::abs(target));
}

} // namespace

TransferMatrix cascade(const std::vector<TransferMatrix>& stages)
{
    if (stages.empty())
        throw Error(Errc::PortMismatch, "cascade needs at least one stage");
    TransferMatrix out = stages.front();
    for (size_t k = 1; k < stages.size(); ++k) {
        const auto& s = stages[k];
        if (s.size() != out.size() || s.ports.size() != out.ports.size())
            throw Error(Errc::PortMismatch, "stage " + std::to_string(k) + " has a different port count");
        for (size_t p = 0; p < s.ports.size(); ++p)
            if (!same_port(s.ports[p], out.ports[p]))
                throw Error(Errc::PortMismatch,
                            "stage " + std::to_string(k) + " port " + std::to_string(p) + " does not match");
        out.m = s.m * out.m;
        out.warnings.insert(out.warnings.end(), s.warnings.begin(), s.warnings.end());
    }
    out.device = stages.size() == 1 ? stages.front().device : "cascade";

    std::vector<PortLabel> all;
    for (const auto& s : stages)
        all.insert(all.end(), s.ports.begin(), s.ports.end());
    for (size_t a = 0; a < all.size(); ++a)
        for (size_t b = a + 1; b < all.size(); ++b) {
            const double scale = std::max({std::abs(all[a].carrier), std::abs(all[b].carrier), 1.0});
            const double gap = std::abs(all[a].carrier - all[b].carrier);
            if (gap > 1e-9 * scale && gap < 1.5 * (all[a].linewidth + all[b].linewidth)) {
                std::ostringstream w;
                w << "resonances at " << all[a].carrier << " and " << all[b].carrier
                  << " rad/s overlap within 3 kappa; cascading may not be valid";
                out.warnings.push_back(w.str());
                return out;
            }
        }
    return out;
}

PhaseShifter phase_shifter(double mu, const RingStage& first, const RingStage& second)
{
    double eps[2];
    const RingStage* st[2] = {&first, &second};
    for (int k = 0; k < 2; ++k) {
        const auto& s = *st[k];
        if (s.gamma < s.kappa_int)
            throw Error(Errc::NotAtGCC, "stage " + std::to_string(k) + " cannot reach GCC (gamma < kappa_int)");
        const double gcc = std::sqrt(s.gamma * s.gamma - s.kappa_int * s.kappa_int);
        if (!std::isnan(s.eps) && !matches(s.eps, gcc))
            throw Error(Errc::NotAtGCC, "stage " + std::to_string(k) + " is not driven at its GCC amplitude");
        eps[k] = gcc;
    }
    PhaseShifter ps;
    ps.xi = cascade({stage_matrix(first, eps[0], std::numbers::pi), stage_matrix(second, eps[1], 0.5 * mu)});
    ps.xi.device = "phase_shifter";
    auto K = [](const RingStage& s) { return (s.gamma - s.kappa_int) / (s.gamma + s.kappa_int); };
    ps.K_PS = std::sqrt(K(first) * K(second));
    ps.loss = 1.0 - ps.K_PS * ps.K_PS;
    ps.relative_phase = std::arg(ps.xi.m(0, 0) * std::conj(ps.xi.m(1, 1)));
    return ps;
}

MachZehnder mach_zehnder(double phi1, const RingStage& first, const RingStage& second)
{
    const RingStage* st[2] = {&first, &second};
    double eps[2], K[2];
    for (int k = 0; k < 2; ++k) {
        const auto& s = *st[k];
        PointParams p;
        p.gammaL = s.gamma;
        p.kappa_int = s.kappa_int;
        OperatingPoint op;
        try {
            op = operating_point(s.branch < 0 ? PointKind::bs50_minus : PointKind::bs50_plus, p);
        } catch (const Error&) {
            throw Error(Errc::NotAt5050, "stage " + std::to_string(k) + " cannot reach a 50-50 point");
        }
        if (!std::isnan(s.eps) && !matches(s.eps, op.eps))
            throw Error(Errc::NotAt5050, "stage " + std::to_string(k) + " is not driven at a 50-50 amplitude");
        eps[k] = op.eps;
        K[k] = op.K;
    }
    MachZehnder mz;
    mz.xi = cascade({stage_matrix(first, eps[0], 0.0), stage_matrix(second, eps[1], phi1)});
    mz.xi.device = "mach_zehnder";
    mz.K_MZ = K[0] * K[1];
    mz.p_same = std::norm(mz.xi.m(0, 0));
    mz.p_swap = std::norm(mz.xi.m(1, 0));
    return mz;
}

} // namespace rbskit
