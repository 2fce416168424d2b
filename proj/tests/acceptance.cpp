// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include "rbskit/errors.hpp"
#include "rbskit/feasibility.hpp"
#include "rbskit/modulation.hpp"
#include "rbskit/operating_points.hpp"
#include "rbskit/perturbation.hpp"
#include "rbskit/rwa.hpp"
#include "rbskit/td_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace rbskit;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kG = 2.0 * pi * 1e9;

// Pinned tolerances.
constexpr double kFig2Zero = 1e-10;
constexpr double kFig2Swap = 1e-10;
constexpr double kFig2Split = 1e-8;
constexpr double kFig2Seconds = 1.0;
constexpr double kLossAnchor = 1e-3;
constexpr double kBreakEven = 1e-12;
constexpr double kRatioEps = 1e-6;
constexpr double kRatioLoss = 1e-4;
constexpr double kUndercoupled = 1e-10;
constexpr double kFourWay = 1e-10;
constexpr double kFourWayLimit = 1e-8;
constexpr double kGeneric = 1e-10;
constexpr double kGenericSeconds = 10.0;
constexpr double kOracle = 0.05;
constexpr double kOracleSpearman = 0.8;
constexpr double kOracleSeconds = 120.0;
constexpr double kWitnessSeconds = 30.0;
constexpr double kTable = 1e-6;
constexpr double kCoefficient = 1e-10;
constexpr double kRobustSlope = 1.9;
constexpr double kFragileSlope = 1.1;

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int failures = 0;

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double maxdiff(const CMatrixXd& a, const CMatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// 1. Two-ring sweep at the figure parameters.
void fig2()
{
    Clock clk;
    const double u = 14.1 * kG, G = 5.31 * kG, ki = 0.17 * kG;
    auto a = two_ring(193e3 * kG, u, G, 0.0, ki);
    ModulationSpec mod{{1, -1}, {{0.0, 2 * u, 0.0}}};
    for (int k = 0; k < 201; ++k)
        generic_transfer(a, mod, 10.0 * kG * k / 200.0);
    PointParams p{G / 2, 0.0, ki};
    const double alpha = G / ki;
    auto gcc = generic_transfer(a, mod, operating_point(PointKind::GCC, p).eps);
    const double z = std::norm(gcc.m(0, 0));
    const double sw = std::abs(std::norm(gcc.m(1, 0)) - (alpha - 2) / (alpha + 2));
    double split = 0.0;
    for (auto kind : {PointKind::bs50_minus, PointKind::bs50_plus}) {
        auto t = generic_transfer(a, mod, operating_point(kind, p).eps);
        split = std::max(split, std::abs(std::norm(t.m(0, 0)) - std::norm(t.m(1, 0))));
    }
    const double sec = clk.seconds();
    report(1, z < kFig2Zero && sw < kFig2Swap && split < kFig2Split && sec < kFig2Seconds,
           fmt("|Xi11(gcc)|^2=%.2e (<%.0e), swap dev=%.2e (<%.0e), 50-50 dev=%.2e (<%.0e), %.3f s (<%.0f s)", z,
               kFig2Zero, sw, kFig2Swap, split, kFig2Split, sec, kFig2Seconds));
}

// 2. Loss anchors and the break-even cooperativity.
void loss_anchors()
{
    const double l2 = device_loss(LossKind::bs_R_2ring_2wg, 30, 30).loss;
    const double l4 = device_loss(LossKind::bs_R_4ring_2wg, 30, 30).loss;
    const bool anchors = std::abs(l2 - 0.0312) <= kLossAnchor && std::abs(l4 - 0.0585) <= kLossAnchor;

    // loss read off the transfer matrix at eps_bs^-, alpha from 1.5 to 60
    bool agree = true;
    int points = 0;
    for (double alpha = 1.5; alpha <= 60.0 + 1e-9; alpha += 0.25, ++points) {
        const double ki = 1.0, g = alpha * ki / 2;
        ClosedFormParams q;
        q.gammaL = g;
        q.kappa_int = ki;
        q.eps = operating_point(PointKind::bs50_minus, {g, 0.0, ki}).eps;
        const double loss = 1.0 - closed_form(Device::two_ring_1wg, q).m.col(0).squaredNorm();
        const bool breaks_even = loss <= 0.5 + kBreakEven;
        agree = agree && (breaks_even == (alpha >= 10.0));
    }
    report(2, anchors && agree,
           fmt("L_2wg(30)=%.5f vs 0.0312, L_4ring_2wg(30)=%.5f vs 0.0585 (+-%.0e); break-even iff alpha>=10 on %d "
               "points: %s",
               l2, l4, kLossAnchor, points, agree ? "yes" : "no"));
}

// 3. Strong-coupling ratios of the two 50-50 points.
void ratio_anchors()
{
    const double alpha = 1e6, ki = 1.0, g = alpha * ki / 2;
    PointParams p{g, 0.0, ki};
    auto m = operating_point(PointKind::bs50_minus, p), q = operating_point(PointKind::bs50_plus, p);
    const double target = 3 + 2 * std::sqrt(2.0);
    const double de = std::abs(q.eps / m.eps - target);
    const double dl = std::abs(q.loss / m.loss - 1 / target);
    report(3, de <= kRatioEps && dl <= kRatioLoss,
           fmt("eps+/eps- dev=%.2e (<=%.0e), L+/L- dev=%.2e (<=%.0e)", de, kRatioEps, dl, kRatioLoss));
}

// 4. Under-coupled peak at alpha = 1, through the generic pipeline.
void undercoupled()
{
    const double u = 100.0, ki = 1.0, G = 1.0;
    auto a = two_ring(0.0, u, G, 0.0, ki);
    ModulationSpec mod{{1, -1}, {{0.0, 2 * u, 0.0}}};
    auto op = operating_point(PointKind::undercoupled_peak, {G / 2, 0.0, ki});
    auto t = generic_transfer(a, mod, op.eps);
    const double stay = std::norm(t.m(0, 0)), move = std::norm(t.m(1, 0));
    const double dr = std::abs(stay / (stay + move) - 0.75);
    const double dl = std::abs(1.0 - stay - move - 2.0 / 3.0);
    report(4, dr <= kUndercoupled && dl <= kUndercoupled,
           fmt("ratio dev from 75-25=%.2e, loss dev from 2/3=%.2e (<=%.0e)", dr, dl, kUndercoupled));
}

// 5. Four-way splitter.
void four_way()
{
    const double u = 14.1 * kG, G = 5.0 * kG;
    auto a = four_ring(193e3 * kG, u, 2 * u, G);
    ModulationSpec mod{{1, -1, 0, 0}, {{0.0, 2 * u, pi / 2}, {0.0, 6 * u, -pi / 2}}};
    auto t = generic_transfer(a, mod, operating_point(PointKind::four_way, {G / 4, 0.0, 0.0}).eps);
    double d = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            d = std::max(d, std::abs(std::norm(t.m(r, c)) - 0.25));
    ClosedFormParams q;
    q.gammaL = G / 4;
    q.eps = 1e12 * q.gammaL; // residual falls off as gamma / eps
    auto lim = closed_form(Device::four_way, q);
    Eigen::MatrixXd swap = Eigen::MatrixXd::Zero(4, 4);
    swap(2, 0) = swap(0, 2) = swap(3, 1) = swap(1, 3) = 1.0;
    const double dl = (lim.m.cwiseAbs() - swap).cwiseAbs().maxCoeff();
    report(5, d <= kFourWay && dl <= kFourWayLimit,
           fmt("max ||Xi_rc|^2-1/4|=%.2e (<=%.0e), strong-drive swap dev=%.2e (<=%.0e)", d, kFourWay, dl,
               kFourWayLimit));
}

// 6. Generic construction against every closed form.
void generic_equivalence()
{
    Clock clk;
    double worst = 0.0;
    const int samples = 50;
    auto grid = [&](double top, auto&& fn) {
        for (int k = 0; k < samples; ++k)
            worst = std::max(worst, fn(top * k / (samples - 1)));
    };
    const double u = 50.0;
    {
        auto a = two_ring(1000.0, u, 4.0, 0.0, 0.3);
        ModulationSpec mod{{1, -1}, {{0.0, 2 * u, 0.7}}};
        grid(20.0, [&](double e) {
            ClosedFormParams p;
            p.gammaL = 2.0;
            p.kappa_int = 0.3;
            p.phi = 0.7;
            p.eps = e;
            return maxdiff(generic_transfer(a, mod, e).m, closed_form(Device::two_ring_1wg, p).m);
        });
    }
    {
        auto a = two_ring(0.0, u, 4.0, 2.0, 0.2);
        ModulationSpec mod{{1, -1}, {{0.0, 2 * u, 0.4}}};
        grid(20.0, [&](double e) {
            ClosedFormParams p;
            p.gammaL = 2.0;
            p.gammaR = 1.0;
            p.kappa_int = 0.2;
            p.phi = 0.4;
            p.eps = e;
            return maxdiff(generic_transfer(a, mod, e).m, closed_form(Device::two_ring_2wg, p).m);
        });
    }
    {
        auto a = four_ring(0.0, u, 2 * u, 5.0, 0.0, 0.17);
        ModulationSpec mod{{1, -1, 0, 0}, {{0.0, 2 * u, pi / 2}, {0.0, 6 * u, -pi / 2}}};
        grid(20.0, [&](double e) {
            ClosedFormParams p;
            p.gammaL = 5.0 / 4;
            p.kappa_int = 0.17;
            p.eps = e;
            return maxdiff(generic_transfer(a, mod, e).m, closed_form(Device::four_way, p).m);
        });
    }
    // rectangular patterns: one and two waveguides against assembled 2x2 and 4x4 blocks
    for (bool two : {false, true}) {
        std::vector<Waveguide> wg{{0, 2.0, Side::L}};
        if (two)
            wg.push_back({3, 1.0, Side::R});
        auto a = rectangular_array(2, 2, u, 2 * u, 0.0, wg, 0.1);
        auto b = normal_modes(a);
        for (auto which : {RectPattern::P1, RectPattern::P2, RectPattern::P3}) {
            auto f = rectangular_pattern_signs(2, 2, which);
            auto pat = pattern_from_signs(b, f);
            auto tones = required_tones(pat, b.frequencies);
            ModulationSpec mod{f, {}};
            for (double s : tones.splittings)
                mod.tones.push_back({0.0, s, 0.3});
            grid(20.0, [&](double e) {
                std::vector<std::pair<int, int>> pairs;
                std::vector<TransferMatrix> blocks;
                for (const auto& pp : pat.pairs) {
                    ClosedFormParams p;
                    p.eps = e * std::abs(pp.w);
                    p.kappa_int = 0.1;
                    p.gammaL = b.gammaL(pp.i);
                    p.gammaL_j = b.gammaL(pp.j);
                    p.gammaR = b.gammaR(pp.i);
                    p.gammaR_j = b.gammaR(pp.j);
                    p.g_i = b.gR(pp.i) * b.gL(pp.i);
                    p.g_j = b.gR(pp.j) * b.gL(pp.j);
                    const double sign = (pp.w < 0 ? -1.0 : 1.0) * b.gL(pp.i) * b.gL(pp.j);
                    p.phi = 0.3 + (sign < 0 ? pi : 0.0);
                    pairs.push_back({pp.i, pp.j});
                    blocks.push_back(closed_form(two ? Device::block4x4 : Device::block2x2, p));
                }
                return maxdiff(generic_transfer(a, mod, e).m, assemble_blocks(pairs, blocks).m);
            });
        }
    }
    const double sec = clk.seconds();
    report(6, worst <= kGeneric && sec < kGenericSeconds,
           fmt("max entry deviation=%.2e (<=%.0e) over %d eps samples per case, %.2f s (<%.0f s)", worst, kGeneric,
               samples, sec, kGenericSeconds));
}

// 7. Time-domain oracle on the figure device.
void oracle()
{
    Clock clk;
    const double u = 14.1 * kG, delta = 2 * u;
    auto a = two_ring(193e3 * kG, u, 5.31 * kG, 0.0, 0.17 * kG);
    std::vector<double> ratio, dev;
    bool all = true;
    for (int k = 1; k <= 10; ++k) {
        const double eps = 0.02 * k * delta;
        ModulationSpec mod{{1, -1}, {{eps, delta, 0.0}}};
        auto eff = generic_transfer(a, mod, eps);
        auto emp = steady_state_transfer(a, mod, eff.ports);
        auto c = compare(eff, emp, kOracle, delta);
        all = all && c.pass;
        ratio.push_back(c.eps_over_delta);
        dev.push_back(c.max_deviation);
    }
    const double rho = spearman(ratio, dev);
    const double sec = clk.seconds();
    report(7, all && rho > kOracleSpearman && sec < kOracleSeconds,
           fmt("max |Xi|^2 deviation=%.4f (<=%.2f) up to eps=0.2 Delta, spearman=%.3f (>%.1f), %.1f s (<%.0f s)",
               *std::max_element(dev.begin(), dev.end()), kOracle, rho, kOracleSpearman, sec, kOracleSeconds));
}

Graph graph_of(int n, std::vector<std::pair<int, int>> e) { return Graph{n, std::move(e)}; }

// 8. Feasibility suite.
void feasibility()
{
    std::vector<std::pair<int, int>> k4, cube, k66, two6, k12;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            k4.push_back({i, j});
    for (int a = 0; a < 8; ++a)
        for (int b : {1, 2, 4})
            if (!(a & b))
                cube.push_back({a, a | b});
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            k66.push_back({i, 6 + j});
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            two6.push_back({i, j});
            two6.push_back({6 + i, 6 + j});
        }
    for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
            k12.push_back({i, j});

    auto pk4 = check_penny_necessary(graph_of(4, k4));
    const bool c_k4 = !pk4.penny_bound_ok;

    auto gcube = graph_of(8, cube);
    auto pc = check_penny_necessary(gcube);
    Clock clk;
    auto hc = check_hadamard_diagonalizable(gcube);
    const bool c_cube = hc.diagonalizable && !pc.triangle_free_bound_ok && pc.triangle_free_bound == 11 &&
                        pc.edges == 12;

    auto c4 = classify_and_verdict(four_ring(0.0, 10.0, 20.0, 0.0));
    auto hc4 = check_hadamard_diagonalizable(graph_of(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}));
    const bool c_c4 = c4.verdict == Verdict::feasible && hc4.witness &&
                      verify_witness(graph_of(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}), *hc4.witness);

    bool c_12 = true;
    for (const auto& g : {graph_of(12, k12), graph_of(12, k66), graph_of(12, two6), graph_of(12, {})}) {
        auto p = check_penny_necessary(g);
        auto h = check_hadamard_diagonalizable(g);
        c_12 = c_12 && h.diagonalizable && !candidate_class(g).empty() && (!p.planar || !p.connected);
    }
    const double sec = clk.seconds();
    report(8, c_k4 && c_cube && c_c4 && c_12 && sec < kWitnessSeconds,
           fmt("K4 penny-bound reject: %s; cube Hadamard but %d > %d edges: %s; C4 feasible with witness: %s; "
               "N=12 candidates nonplanar/disconnected: %s; searches %.3f s (<%.0f s)",
               c_k4 ? "yes" : "no", pc.edges, pc.triangle_free_bound, c_cube ? "yes" : "no", c_c4 ? "yes" : "no",
               c_12 ? "yes" : "no", sec, kWitnessSeconds));
}

// 9. Spacing ratios for rectangular lattices.
void table()
{
    struct Case {
        int L, M;
        double expect;
    };
    double worst = 0.0;
    std::string got;
    for (Case c : {Case{2, 2, 2.0}, Case{2, 3, 3.0 / std::sqrt(2.0)}, Case{3, 3, 3.0}}) {
        auto a = rectangular_array(c.L, c.M, 1.0, 2.0, 0.0);
        Graph g = connectivity(a);
        std::vector<int> cls;
        for (const auto& cp : a.couplings)
            cls.push_back(cp.u == 1.0 ? -1 : 0);
        auto r = optimize_spacings(g, cls);
        const double d = r.converged ? std::abs(r.weights[0] - c.expect) : INFINITY;
        worst = std::max(worst, d);
        got += fmt(" %dx%d v/u=%.8f", c.L, c.M, r.weights[0]);
    }
    report(9, worst <= kTable, fmt("%s; max dev=%.2e (<=%.0e), 10 seeded starts", got.c_str(), worst, kTable));
}

// 10. Perturbation suite.
void perturbation()
{
    const double u = 3.0, da = 0.02, db = -0.05;
    auto a = two_ring(0.0, u, 0.0);
    auto c = corrected_modes(a, Perturbation{PerturbationKind::diagonal, {{0, da}, {1, db}}});
    const double measured = std::abs(c.coefficients(1, 0));
    const double claimed = std::abs(da - db) / (2 * u);
    const bool coeff = std::abs(measured - claimed) <= kCoefficient;

    auto lat = rectangular_array(2, 2, 1.0, 2.0, 0.0);
    auto slope = [&](RectPattern p) {
        return robustness_report(lat, rectangular_pattern_signs(2, 2, p), PerturbationKind::edge).slope;
    };
    const double s1 = slope(RectPattern::P1), s2 = slope(RectPattern::P2), s3 = slope(RectPattern::P3);
    const bool slopes = s1 >= kRobustSlope && s2 <= kFragileSlope && s3 <= kFragileSlope;
    report(10, coeff && slopes,
           fmt("two-ring coefficient |c|=%.12f vs delta_-/2u=%.12f (%s, tol %.0e); slopes P1=%.3f (>=%.1f) "
               "P2=%.3f P3=%.3f (<=%.1f)",
               measured, claimed, coeff ? "match" : "mismatch", kCoefficient, s1, kRobustSlope, s2, s3,
               kFragileSlope));
}

} // namespace

int main()
{
    const std::vector<std::function<void()>> criteria = {fig2,   loss_anchors, ratio_anchors, undercoupled,
                                                         four_way, generic_equivalence, oracle, feasibility,
                                                         table,  perturbation};
    for (size_t k = 0; k < criteria.size(); ++k) {
        try {
            criteria[k]();
        } catch (const std::exception& e) {
            report(int(k) + 1, false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
