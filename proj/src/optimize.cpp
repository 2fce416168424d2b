#include "rbskit/feasibility.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rbskit {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                             double step, int max_iter, double ftol, double xtol)
{
    const Eigen::Index d = x0.size();
    std::vector<Eigen::VectorXd> s(d + 1, x0);
    std::vector<double> fs(d + 1);
    for (Eigen::Index k = 0; k < d; ++k)
        s[k + 1](k) += step;
    NelderMeadResult r;
    for (Eigen::Index k = 0; k <= d; ++k)
        fs[k] = f(s[k]);
    r.evaluations = int(d + 1);

    std::vector<int> idx(d + 1);
    for (int it = 0; it < max_iter; ++it) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = idx.front(), worst = idx.back(), second = idx[d - 1];
        double size = 0.0;
        for (Eigen::Index k = 0; k <= d; ++k)
            size = std::max(size, (s[k] - s[best]).cwiseAbs().maxCoeff());
        if (fs[worst] - fs[best] <= ftol || size <= xtol)
            break;

        Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
        for (int k : idx)
            if (k != worst)
                c += s[k];
        c /= double(d);
        auto probe = [&](double t) {
            Eigen::VectorXd x = c + t * (s[worst] - c);
            ++r.evaluations;
            return std::pair{x, f(x)};
        };
        auto [xr, fr] = probe(-1.0);
        if (fr < fs[best]) {
            auto [xe, fe] = probe(-2.0);
            if (fe < fr)
                s[worst] = xe, fs[worst] = fe;
            else
                s[worst] = xr, fs[worst] = fr;
        } else if (fr < fs[second]) {
            s[worst] = xr, fs[worst] = fr;
        } else {
            auto [xc, fc] = fr < fs[worst] ? probe(-0.5) : probe(0.5);
            if (fc < std::min(fr, fs[worst])) {
                s[worst] = xc, fs[worst] = fc;
            } else {
                for (int k : idx)
                    if (k != best) {
                        s[k] = s[best] + 0.5 * (s[k] - s[best]);
                        fs[k] = f(s[k]);
                        ++r.evaluations;
                    }
            }
        }
    }
    int b = int(std::min_element(fs.begin(), fs.end()) - fs.begin());
    r.x = s[b];
    r.f = fs[b];
    return r;
}

double spacing_residual(const Graph& g, const std::vector<double>& w)
{
    if (w.size() != g.edges.size())
        throw Error(Errc::LengthMismatch, "one weight per edge is required");
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(g.n, g.n);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [i, j] = g.edges[e];
        U(i, j) += w[e];
        U(j, i) += w[e];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    if (ev.size() < 3)
        return 0.0;
    const double mean = (ev(ev.size() - 1) - ev(0)) / double(ev.size() - 1);
    if (!(mean > 0.0))
        return std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (Eigen::Index k = 1; k < ev.size(); ++k) {
        double d = ev(k) - ev(k - 1) - mean;
        r += d * d;
    }
    return r / (mean * mean);
}

SpacingResult optimize_spacings(const Graph& g, const std::vector<int>& edge_class, const OptimizeOptions& opt)
{
    if (edge_class.size() != g.edges.size())
        throw Error(Errc::LengthMismatch, "one class per edge is required");
    if (!is_connected(g))
        throw Error(Errc::DisconnectedGraph, "spacing optimization needs a connected graph");
    const int nfree = edge_class.empty() ? 0 : *std::max_element(edge_class.begin(), edge_class.end()) + 1;
    if (nfree < 1)
        throw Error(Errc::SchemaError, "at least one free weight class is required");

    const double lo = std::log(opt.ratio_min), hi = std::log(opt.ratio_max);
    auto weights_of = [&](const Eigen::VectorXd& x) {
        std::vector<double> w(edge_class.size());
        for (size_t e = 0; e < w.size(); ++e)
            w[e] = edge_class[e] < 0 ? 1.0 : std::exp(std::clamp(x(edge_class[e]), lo, hi));
        return w;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        double pen = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k)
            pen += std::pow(std::max({0.0, x(k) - hi, lo - x(k)}), 2);
        return spacing_residual(g, weights_of(x)) + pen;
    };

    std::vector<NelderMeadResult> runs(opt.starts);
    parallel_for(size_t(opt.starts), [&](size_t s) {
        std::mt19937 rng(opt.seed + unsigned(s));
        std::uniform_real_distribution<double> U(lo, hi);
        Eigen::VectorXd x0(nfree);
        for (int k = 0; k < nfree; ++k)
            x0(k) = U(rng);
        auto r = nelder_mead(objective, x0, 0.1 * (hi - lo), opt.max_iter);
        // restart once from the best point to shake off a collapsed simplex
        auto r2 = nelder_mead(objective, r.x, 1e-3, opt.max_iter);
        r2.evaluations += r.evaluations;
        runs[s] = r2.f <= r.f ? r2 : r;
    });

    SpacingResult out;
    const NelderMeadResult* best = nullptr;
    for (const auto& r : runs) {
        out.evaluations += r.evaluations;
        if (!best || r.f < best->f)
            best = &r;
    }
    out.residual = best->f;
    for (int k = 0; k < nfree; ++k)
        out.weights.push_back(std::exp(std::clamp(best->x(k), lo, hi)));
    out.converged = out.residual < opt.residual_target;
    return out;
}

} // namespace rbskit
