#include "rbskit/rwa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace rbskit {

namespace {

using cd = std::complex<double>;
constexpr cd I(0.0, 1.0);

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

int TransferMatrix::port(int mode, Side side) const
{
    for (size_t k = 0; k < ports.size(); ++k)
        if (ports[k].mode == mode && ports[k].side == side)
            return int(k);
    return -1;
}

ModulationSpec with_amplitude(ModulationSpec mod, double eps)
{
    for (auto& t : mod.tones)
        t.eps = eps;
    return mod;
}

double max_column_norm(const CMatrixXd& m)
{
    double best = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        best = std::max(best, m.col(c).norm());
    return best;
}

EffectiveSystem effective_system(const ResonatorArray& array, const NormalModeBasis& basis,
                                 const ModulationSpec& mod,
                                 const std::vector<double>& input_carriers, const RwaOptions& opt)
{
    validate(mod, array.n);
    const int n = basis.size();
    EffectiveSystem sys;
    sys.pattern = pattern_from_signs(basis, mod.signs);

    // Linewidths and resolution.
    sys.kappa = basis.gammaL + basis.gammaR;
    sys.kappa.array() += array.kappa_int;
    const Eigen::VectorXd& w = basis.frequencies;
    sys.min_splitting = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int l = 0; l < n; ++l)
            if (l != k)
                nearest = std::min(nearest, std::abs(w(l) - w(k)));
        sys.min_splitting = std::min(sys.min_splitting, nearest);
        if (n == 1)
            break;
        if (nearest < degeneracy_tol(w))
            throw Error(Errc::UnresolvedModes, "modes " + std::to_string(k) +
                                                   " is degenerate with another mode");
        if (sys.kappa(k) >= opt.unresolved_ratio * nearest)
            throw Error(Errc::UnresolvedModes,
                        "linewidth of mode " + std::to_string(k) + " (" + fmt(sys.kappa(k)) +
                            " rad/s) is not small against its nearest splitting (" + fmt(nearest) +
                            " rad/s)");
        if (sys.kappa(k) >= opt.unresolved_warn * nearest)
            sys.warnings.push_back("mode " + std::to_string(k) + " is only marginally resolved");
    }

    // Validity of the rotating-wave truncation.
    if (opt.validity_guard && n > 1) {
        for (const auto& t : mod.tones) {
            if (t.eps >= sys.min_splitting)
                throw Error(Errc::ValidityViolation, "eps = " + fmt(t.eps) +
                                                         " rad/s reaches the level splitting " +
                                                         fmt(sys.min_splitting) + " rad/s");
            if (t.eps >= 0.5 * sys.min_splitting)
                sys.warnings.push_back("eps is above half the level splitting; RWA accuracy degrades");
        }
    }

    // Tone assignment.
    const auto& pairs = sys.pattern.pairs;
    std::vector<std::vector<int>> tone_of_pair(pairs.size());
    std::vector<int> pairs_of_tone(mod.tones.size(), 0);
    for (size_t p = 0; p < pairs.size(); ++p) {
        double delta = w(pairs[p].j) - w(pairs[p].i);
        for (size_t t = 0; t < mod.tones.size(); ++t)
            if (std::abs(delta - mod.tones[t].omega_d) <= opt.detuning_rel_tol * delta) {
                tone_of_pair[p].push_back(int(t));
                ++pairs_of_tone[t];
                sys.assignment.emplace_back(int(p), int(t));
            }
        if (tone_of_pair[p].empty())
            sys.undriven_pairs.push_back(int(p));
    }
    for (size_t t = 0; t < mod.tones.size(); ++t)
        if (pairs_of_tone[t] == 0)
            throw Error(Errc::NoResonantTone, "tone at " + fmt(mod.tones[t].omega_d) +
                                                  " rad/s matches no splitting of the pattern");
    for (double d : sys.pattern.diagonal)
        if (d != 0.0) {
            sys.warnings.push_back("diagonal drive terms present; they rotate at omega_d and are dropped");
            break;
        }
    for (const auto& [p, t] : sys.assignment)
        if (std::abs(std::abs(pairs[p].w) - 1.0) > 1e-9) {
            sys.warnings.push_back("non-unit pattern weights are carried into Aeff");
            break;
        }

    // Clusters of modes linked by driven pairs.
    std::vector<std::vector<std::pair<int, double>>> adj(n); // neighbour, frame offset
    for (const auto& [p, t] : sys.assignment) {
        const auto& pp = pairs[p];
        double wd = mod.tones[t].omega_d;
        adj[pp.i].emplace_back(pp.j, +wd);
        adj[pp.j].emplace_back(pp.i, -wd);
    }
    std::vector<char> in_pair(n, 0);
    for (const auto& [p, t] : sys.assignment)
        in_pair[pairs[p].i] = in_pair[pairs[p].j] = 1;
    for (int k = 0; k < n; ++k)
        if (!in_pair[k])
            sys.isolated_modes.push_back(k);

    sys.frames = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    auto propagate = [&](int seed) {
        std::queue<int> q;
        q.push(seed);
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (auto [y, off] : adj[x]) {
                double want = sys.frames(x) + off;
                if (std::isnan(sys.frames(y))) {
                    sys.frames(y) = want;
                    q.push(y);
                } else if (std::abs(sys.frames(y) - want) > 1e-6 * std::abs(off)) {
                    throw Error(Errc::NoResonantTone,
                                "tone frequencies are inconsistent around a cycle of the pattern");
                }
            }
        }
    };
    for (double c : input_carriers) {
        int best = 0;
        for (int k = 1; k < n; ++k)
            if (std::abs(w(k) - c) < std::abs(w(best) - c))
                best = k;
        if (std::abs(w(best) - c) > sys.kappa(best))
            throw Error(Errc::NoResonantTone, "input carrier " + fmt(c) +
                                                  " rad/s is not resonant with any mode");
        sys.inputs.emplace_back(c, best);
        if (std::isnan(sys.frames(best))) {
            sys.frames(best) = c;
            propagate(best);
        } else if (std::abs(sys.frames(best) - c) > 1e-9 * std::max(1.0, std::abs(c))) {
            throw Error(Errc::NoResonantTone,
                        "two input carriers in one driven cluster disagree with the tone frequencies");
        }
        if (!in_pair[best])
            sys.warnings.push_back("input resonant with mode " + std::to_string(best) +
                                   " which no tone couples; it passes through as a bare cavity");
    }
    for (int k = 0; k < n; ++k)
        if (std::isnan(sys.frames(k))) {
            sys.frames(k) = w(k);
            propagate(k);
        }

    // SLH triple in the slow frame with one virtual port per (mode, waveguide).
    const auto wl = array.waveguide(Side::L);
    const auto wr = array.waveguide(Side::R);
    std::vector<PortLabel> ports;
    std::vector<double> coupling;
    for (int k = 0; k < n; ++k)
        for (const auto& wg : {wl, wr})
            if (wg) {
                ports.push_back({k, wg->side, sys.frames(k), sys.kappa(k)});
                coupling.push_back(std::sqrt(wg->gamma) * basis.vectors(wg->node, k));
            }
    const int np = int(ports.size());

    SlhTriple<double> slh;
    slh.S = CMatrixXd::Identity(np, np);
    slh.Phi = CMatrixXd::Zero(np, n);
    for (int r = 0; r < np; ++r)
        slh.Phi(r, ports[r].mode) = coupling[r];
    slh.Omega = CMatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k)
        slh.Omega(k, k) = w(k) - sys.frames(k);
    for (const auto& [p, t] : sys.assignment) {
        const auto& pp = pairs[p];
        const auto& tone = mod.tones[t];
        cd h = 0.5 * pp.w * tone.eps * std::exp(I * tone.phi);
        slh.Omega(pp.i, pp.j) += h;
        slh.Omega(pp.j, pp.i) += std::conj(h);
    }
    sys.abcd = abcd_from_slh(slh);
    add_internal_loss(sys.abcd, array.kappa_int);
    sys.abcd.ports = std::move(ports);
    return sys;
}

TransferMatrix effective_transfer(const EffectiveSystem& sys)
{
    TransferMatrix t;
    try {
        t.m = transfer_function(sys.abcd, 0.0);
    } catch (const Error& e) {
        if (e.code() == Errc::SingularResolvent)
            throw Error(Errc::SingularAeff, "effective A matrix is singular (lossless dark mode?)");
        throw;
    }
    t.ports = sys.abcd.ports;
    t.device = "generic";
    t.warnings = sys.warnings;
    double eps = 0.0;
    for (Eigen::Index i = 0; i < sys.abcd.A.rows(); ++i)
        for (Eigen::Index j = 0; j < sys.abcd.A.cols(); ++j)
            if (i != j)
                eps = std::max(eps, 2.0 * std::abs(sys.abcd.A(i, j)));
    t.eps = eps;
    return t;
}

TransferMatrix generic_transfer(const ResonatorArray& array, const ModulationSpec& mod, double eps,
                                const std::vector<double>& input_carriers, const RwaOptions& opt)
{
    NormalModeBasis b = normal_modes(array);
    auto sys = effective_system(array, b, with_amplitude(mod, eps), input_carriers, opt);
    auto t = effective_transfer(sys);
    t.eps = eps;
    return t;
}

Device parse_device(const std::string& name)
{
    static const std::map<std::string, Device> names{
        {"two_ring_1wg", Device::two_ring_1wg}, {"two_ring_2wg", Device::two_ring_2wg},
        {"block2x2", Device::block2x2},         {"block4x4", Device::block4x4},
        {"four_way", Device::four_way},
    };
    auto it = names.find(name);
    if (it == names.end())
        throw Error(Errc::UnknownDevice, "no closed form named '" + name + "'");
    return it->second;
}

const char* device_name(Device d)
{
    switch (d) {
    case Device::two_ring_1wg: return "two_ring_1wg";
    case Device::two_ring_2wg: return "two_ring_2wg";
    case Device::block2x2: return "block2x2";
    case Device::block4x4: return "block4x4";
    case Device::four_way: return "four_way";
    }
    return "?";
}

namespace {

TransferMatrix block2x2(double gi, double gj, double kint, double eps, double phi)
{
    const double ki = gi + kint, kj = gj + kint;
    const double den = eps * eps + ki * kj;
    TransferMatrix t;
    t.m.resize(2, 2);
    t.m(0, 0) = 1.0 - 2.0 * kj * gi / den;
    t.m(1, 1) = 1.0 - 2.0 * ki * gj / den;
    t.m(0, 1) = I * 2.0 * eps * std::sqrt(gi * gj) * std::exp(I * phi) / den;
    t.m(1, 0) = I * 2.0 * eps * std::sqrt(gi * gj) * std::exp(-I * phi) / den;
    t.ports = {{0, Side::L, 0.0, ki}, {1, Side::L, 0.0, kj}};
    return t;
}

// Ports (i,L), (i,R), (j,L), (j,R); entries from the analytic inverse of the 2x2 Aeff.
TransferMatrix block4x4(double gLi, double gRi, double gLj, double gRj, double si, double sj,
                        double kint, double eps, double phi)
{
    const double ki = gLi + gRi + kint, kj = gLj + gRj + kint;
    const double den = eps * eps + ki * kj;
    const double c[4] = {std::sqrt(gLi), si * std::sqrt(gRi), std::sqrt(gLj), sj * std::sqrt(gRj)};
    const int mode[4] = {0, 0, 1, 1};
    // (-Aeff)^-1 scaled: entries of 2/den * [[kj, -i eps e^{i phi}], [-i eps e^{-i phi}, ki]]
    auto inv = [&](int a, int b) -> cd {
        if (a == 0 && b == 0)
            return 2.0 * kj / den;
        if (a == 1 && b == 1)
            return 2.0 * ki / den;
        if (a == 0)
            return -I * 2.0 * eps * std::exp(I * phi) / den;
        return -I * 2.0 * eps * std::exp(-I * phi) / den;
    };
    TransferMatrix t;
    t.m.resize(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            t.m(r, s) = (r == s ? 1.0 : 0.0) - c[r] * inv(mode[r], mode[s]) * c[s];
    t.ports = {{0, Side::L, 0.0, ki}, {0, Side::R, 0.0, ki}, {1, Side::L, 0.0, kj}, {1, Side::R, 0.0, kj}};
    return t;
}

TransferMatrix four_way(double g, double kint, double eps)
{
    const double k = g + kint;
    const double e = 0.5 * eps;
    const double q = k * k + 4.0 * e * e;
    const double d = 1.0 - 2.0 * g * (k * k + 2.0 * e * e) / (k * q);
    const double a = 2.0 * g * e / q;
    const double b = 4.0 * g * e * e / (k * q);
    TransferMatrix t;
    t.m.resize(4, 4);
    t.m << d, -a, -b, a,
           a, d, -a, -b,
           -b, a, d, -a,
           -a, -b, a, d;
    for (int i = 0; i < 4; ++i)
        t.ports.push_back({i, Side::L, 0.0, k});
    return t;
}

} // namespace

TransferMatrix closed_form(Device device, const ClosedFormParams& p)
{
    for (double x : {p.eps, p.kappa_int, p.gammaL, p.gammaR})
        if (!(x >= 0.0))
            throw Error(Errc::NegativeRate, "closed-form parameters must be nonnegative");
    const double gLj = p.gammaL_j < 0 ? p.gammaL : p.gammaL_j;
    const double gRj = p.gammaR_j < 0 ? p.gammaR : p.gammaR_j;
    TransferMatrix t;
    switch (device) {
    case Device::two_ring_1wg:
        t = block2x2(p.gammaL, p.gammaL, p.kappa_int, p.eps, p.phi);
        break;
    case Device::block2x2:
        t = block2x2(p.gammaL, gLj, p.kappa_int, p.eps, p.phi);
        break;
    case Device::two_ring_2wg:
        t = block4x4(p.gammaL, p.gammaR, p.gammaL, p.gammaR, -1.0, 1.0, p.kappa_int, p.eps, p.phi);
        break;
    case Device::block4x4:
        t = block4x4(p.gammaL, p.gammaR, gLj, gRj, p.g_i, p.g_j, p.kappa_int, p.eps, p.phi);
        break;
    case Device::four_way:
        t = four_way(p.gammaL, p.kappa_int, p.eps);
        break;
    }
    t.eps = p.eps;
    t.device = device_name(device);
    return t;
}

TransferMatrix assemble_blocks(const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<TransferMatrix>& blocks)
{
    if (pairs.size() != blocks.size())
        throw Error(Errc::DimensionMismatch, "one block per pattern pair is required");
    std::set<int> used;
    for (auto [a, b] : pairs)
        if (a == b || !used.insert(a).second || !used.insert(b).second)
            throw Error(Errc::OverlappingPairs, "pattern pairs share a mode");
    std::vector<int> modes(used.begin(), used.end());
    auto global = [&](int mode) { return int(std::lower_bound(modes.begin(), modes.end(), mode) - modes.begin()); };

    Eigen::Index per_mode = blocks.empty() ? 1 : blocks.front().size() / 2;
    for (const auto& b : blocks)
        if (b.size() != 2 * per_mode)
            throw Error(Errc::DimensionMismatch, "blocks disagree on ports per mode");

    TransferMatrix t;
    const Eigen::Index np = Eigen::Index(modes.size()) * per_mode;
    t.m = CMatrixXd::Zero(np, np);
    t.ports.resize(np);
    t.device = "assembled";
    for (size_t k = 0; k < pairs.size(); ++k) {
        const auto& b = blocks[k];
        auto gidx = [&](Eigen::Index local) {
            const auto& pl = b.ports[local];
            int gm = global(pl.mode == 0 ? pairs[k].first : pairs[k].second);
            return gm * per_mode + (per_mode == 2 && pl.side == Side::R ? 1 : 0);
        };
        for (Eigen::Index r = 0; r < b.size(); ++r) {
            auto gr = gidx(r);
            t.ports[gr] = b.ports[r];
            t.ports[gr].mode = b.ports[r].mode == 0 ? pairs[k].first : pairs[k].second;
            for (Eigen::Index c = 0; c < b.size(); ++c)
                t.m(gr, gidx(c)) = b.m(r, c);
        }
        t.eps = b.eps;
    }
    return t;
}

} // namespace rbskit
