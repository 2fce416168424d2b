#include "rbskit/modulation.hpp"
#include "rbskit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rbskit {

void validate(const ModulationSpec& m, int n)
{
    if (static_cast<int>(m.signs.size()) != n)
        throw Error(Errc::LengthMismatch, "expected " + std::to_string(n) + " signs, got " +
                                              std::to_string(m.signs.size()));
    bool any = false;
    for (int f : m.signs) {
        if (f < -1 || f > 1)
            throw Error(Errc::SchemaError, "signs must be -1, 0 or +1");
        any = any || f != 0;
    }
    if (!m.tones.empty() && !any)
        throw Error(Errc::SchemaError, "tones given but every sign is zero");
    for (const auto& t : m.tones) {
        if (!(t.omega_d > 0.0))
            throw Error(Errc::SchemaError, "tone frequencies must be positive");
        if (!(t.eps >= 0.0))
            throw Error(Errc::NegativeRate, "tone amplitude must be nonnegative");
    }
}

Eigen::MatrixXd drive_matrix(const Eigen::MatrixXd& V, const std::vector<int>& f)
{
    if (static_cast<Eigen::Index>(f.size()) != V.rows())
        throw Error(Errc::LengthMismatch, "sign vector length differs from mode count");
    Eigen::VectorXd fd(f.size());
    for (size_t j = 0; j < f.size(); ++j)
        fd(j) = f[j];
    Eigen::MatrixXd M = V.transpose() * fd.asDiagonal() * V;
    M = (M.array().abs() < 1e-12).select(0.0, M);
    return M;
}

CouplingPattern pattern_from_signs(const NormalModeBasis& basis, const std::vector<int>& f)
{
    Eigen::MatrixXd M = drive_matrix(basis.vectors, f);
    CouplingPattern p;
    p.diagonal = M.diagonal();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = i + 1; j < M.cols(); ++j)
            if (M(i, j) != 0.0)
                p.pairs.push_back({int(i), int(j), M(i, j)});
    return p;
}

RectPattern parse_rect_pattern(const std::string& s)
{
    if (s == "P1" || s == "p1")
        return RectPattern::P1;
    if (s == "P2" || s == "p2")
        return RectPattern::P2;
    if (s == "P3" || s == "p3")
        return RectPattern::P3;
    throw Error(Errc::SchemaError, "unknown rectangular pattern '" + s + "'");
}

std::vector<int> rectangular_pattern_signs(int L, int M, RectPattern which)
{
    // An odd side leaves a mode whose partner is itself, which shows up as
    // an unwanted diagonal drive term.
    if (which == RectPattern::P2 && M % 2 != 0)
        throw Error(Errc::OddSideForbidden, "P2 needs an even number of columns");
    if (which == RectPattern::P3 && L % 2 != 0)
        throw Error(Errc::OddSideForbidden, "P3 needs an even number of rows");
    std::vector<int> f(L * M);
    for (int l = 1; l <= L; ++l)
        for (int m = 1; m <= M; ++m) {
            int e = which == RectPattern::P1 ? l + m : which == RectPattern::P2 ? m + 1 : l + 1;
            f[lattice_index(M, l, m)] = e % 2 == 0 ? 1 : -1;
        }
    return f;
}

ToneTable required_tones(const CouplingPattern& pattern, const Eigen::VectorXd& frequencies)
{
    ToneTable t;
    std::vector<double> raw;
    for (const auto& pp : pattern.pairs)
        raw.push_back(std::abs(frequencies(pp.j) - frequencies(pp.i)));
    std::vector<double> sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    double scale = sorted.empty() ? 0.0 : sorted.back();
    for (double d : sorted)
        if (t.splittings.empty() || d - t.splittings.back() > 1e-9 * scale)
            t.splittings.push_back(d);
    for (double d : raw) {
        auto it = std::min_element(t.splittings.begin(), t.splittings.end(),
                                   [&](double x, double y) { return std::abs(x - d) < std::abs(y - d); });
        t.pair_tone.push_back(int(it - t.splittings.begin()));
    }
    return t;
}

} // namespace rbskit
