#include "rbskit/perturbation.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/modulation.hpp"

#include <cmath>
#include <random>

namespace rbskit {

PerturbationKind parse_perturbation_kind(const std::string& s)
{
    if (s == "diagonal")
        return PerturbationKind::diagonal;
    if (s == "edge")
        return PerturbationKind::edge;
    throw Error(Errc::SchemaError, "perturbation kind must be 'diagonal' or 'edge'");
}

Eigen::MatrixXd perturbation_matrix(const ResonatorArray& a, const Perturbation& p)
{
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(a.n, a.n);
    for (auto [idx, s] : p.strengths) {
        if (p.kind == PerturbationKind::diagonal) {
            if (idx < 0 || idx >= a.n)
                throw Error(Errc::IndexOutOfRange, "ring index " + std::to_string(idx));
            V(idx, idx) += s;
        } else {
            if (idx < 0 || idx >= int(a.couplings.size()))
                throw Error(Errc::IndexOutOfRange, "coupling index " + std::to_string(idx));
            const auto& c = a.couplings[idx];
            V(c.i, c.j) += s;
            V(c.j, c.i) += s;
        }
    }
    return V;
}

CorrectedModes corrected_modes(const NormalModeBasis& b, const Eigen::MatrixXd& V)
{
    const int n = b.size();
    for (const auto& g : degenerate_groups(b.frequencies))
        if (g.size() > 1)
            throw Error(Errc::DegenerateSpectrum, "first-order theory needs a nondegenerate spectrum");
    const Eigen::MatrixXd Vm = b.vectors.transpose() * V * b.vectors; // <c_l|V|c_j>
    CorrectedModes c;
    c.frequencies = b.frequencies + Vm.diagonal();
    c.coefficients = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            if (l != j)
                c.coefficients(l, j) = Vm(l, j) / (b.frequencies(j) - b.frequencies(l));
    c.vectors = b.vectors * (Eigen::MatrixXd::Identity(n, n) + c.coefficients);
    return c;
}

CorrectedModes corrected_modes(const ResonatorArray& a, const Perturbation& p)
{
    NormalModeBasis b = normal_modes(a);
    const Eigen::MatrixXd V = perturbation_matrix(a, p);
    CorrectedModes c = corrected_modes(b, V);
    double umin = std::numeric_limits<double>::infinity();
    for (const auto& cp : a.couplings)
        umin = std::min(umin, cp.u);
    for (auto [idx, s] : p.strengths)
        if (std::abs(s) > 0.1 * umin) {
            c.warnings.push_back("perturbation " + std::to_string(idx) +
                                 " exceeds 10% of the smallest coupling; first order may be poor");
            break;
        }
    return c;
}

DriveDecomposition drive_in_corrected_basis(const std::vector<int>& f, const NormalModeBasis& b,
                                            const CorrectedModes& c)
{
    DriveDecomposition d;
    const Eigen::MatrixXd pattern = drive_matrix(b.vectors, f);
    Eigen::VectorXd F(f.size());
    for (size_t k = 0; k < f.size(); ++k)
        F(k) = f[k];
    // same product on both sides so a zero perturbation cancels exactly
    d.M0 = b.vectors.transpose() * F.asDiagonal() * b.vectors;
    d.M = c.vectors.transpose() * F.asDiagonal() * c.vectors;
    const Eigen::Index n = d.M.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            if (i != j && pattern(i, j) != 0.0)
                continue;
            const double delta = d.M(i, j) - d.M0(i, j);
            d.residual = std::max(d.residual, std::abs(delta));
            if (std::abs(delta) > 1e-12)
                d.terms.push_back({i == j ? "diagonal" : "cross-pattern", int(i), int(j), delta});
        }
    return d;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < n; ++k) {
        const double lx = std::log(x[k]), ly = std::log(std::max(y[k], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RobustnessReport robustness_report(const ResonatorArray& a, const std::vector<int>& f, PerturbationKind model,
                                   const std::string& pattern_id, const RobustnessOptions& opt)
{
    RobustnessReport r;
    r.pattern = pattern_id;
    r.model = model;
    if (int(f.size()) != a.n)
        throw Error(Errc::LengthMismatch, "one sign per ring is required");
    const NormalModeBasis b = normal_modes(a);

    double umin = std::numeric_limits<double>::infinity();
    for (const auto& cp : a.couplings)
        umin = std::min(umin, cp.u);

    // one fixed random direction, unit max-norm
    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Perturbation dir{model, {}};
    const int count = model == PerturbationKind::diagonal ? a.n : int(a.couplings.size());
    for (int k = 0; k < count; ++k)
        dir.strengths[k] = U(rng);
    const Eigen::MatrixXd Vdir = umin * perturbation_matrix(a, dir);

    bool all_zero = true;
    for (int k = 0; k < opt.points; ++k) {
        const double s = opt.s_min * std::pow(opt.s_max / opt.s_min, double(k) / (opt.points - 1));
        auto c = corrected_modes(b, s * Vdir);
        auto d = drive_in_corrected_basis(f, b, c);
        r.scales.push_back(s);
        r.residuals.push_back(d.residual);
        if (d.residual > 0.0)
            all_zero = false;
    }

    // M(s) is quadratic in s, so the central difference isolates the linear term exactly.
    auto plus = drive_in_corrected_basis(f, b, corrected_modes(b, Vdir));
    auto minus = drive_in_corrected_basis(f, b, corrected_modes(b, -Vdir));
    const Eigen::MatrixXd lin = 0.5 * (plus.M - minus.M);
    for (Eigen::Index i = 0; i < lin.rows(); ++i)
        for (Eigen::Index j = i; j < lin.cols(); ++j) {
            if (i != j && std::abs(plus.M0(i, j)) >= 1e-12)
                continue;
            if (std::abs(lin(i, j)) > 1e-12)
                r.induced_terms.push_back({i == j ? "diagonal" : "cross-pattern", int(i), int(j), lin(i, j)});
        }

    if (all_zero) {
        r.slope = std::numeric_limits<double>::quiet_NaN();
        r.first_order_robust = true;
        return r;
    }
    r.slope = loglog_slope(r.scales, r.residuals);
    r.first_order_robust = r.slope > opt.slope_threshold;
    return r;
}

} // namespace rbskit
