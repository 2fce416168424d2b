#include "rbskit/graph.hpp"
#include "rbskit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace rbskit {

std::optional<Waveguide> ResonatorArray::waveguide(Side s) const
{
    for (const auto& w : waveguides)
        if (w.side == s)
            return w;
    return std::nullopt;
}

bool is_connected(const Graph& g)
{
    if (g.n <= 1)
        return true;
    std::vector<std::vector<int>> adj(g.n);
    for (auto [i, j] : g.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<char> seen(g.n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = 1;
                ++count;
                q.push(y);
            }
    }
    return count == g.n;
}

Graph connectivity(const ResonatorArray& a)
{
    Graph g;
    g.n = a.n;
    for (const auto& c : a.couplings)
        g.edges.emplace_back(c.i, c.j);
    return g;
}

ResonatorArray build_array(int n, double omega0, std::vector<Coupling> couplings,
                           std::vector<Waveguide> waveguides, double kappa_int)
{
    if (n < 1)
        throw Error(Errc::IndexOutOfRange, "array needs at least one resonator");
    std::set<std::pair<int, int>> seen;
    for (const auto& c : couplings) {
        if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n)
            throw Error(Errc::IndexOutOfRange, "coupling (" + std::to_string(c.i) + "," +
                                                   std::to_string(c.j) + ") outside 0.." +
                                                   std::to_string(n - 1));
        if (c.i == c.j)
            throw Error(Errc::DuplicateEdge, "self-loop on resonator " + std::to_string(c.i));
        if (!seen.insert(std::minmax(c.i, c.j)).second)
            throw Error(Errc::DuplicateEdge, "repeated coupling (" + std::to_string(c.i) + "," +
                                                 std::to_string(c.j) + ")");
        if (!(c.u > 0.0))
            throw Error(Errc::NegativeRate, "coupling strengths must be positive");
    }
    bool hasL = false, hasR = false;
    for (const auto& w : waveguides) {
        if (w.node < 0 || w.node >= n)
            throw Error(Errc::IndexOutOfRange, "waveguide attached to missing resonator " +
                                                   std::to_string(w.node));
        if (!(w.gamma >= 0.0))
            throw Error(Errc::NegativeRate, "waveguide rate must be nonnegative");
        bool& flag = w.side == Side::L ? hasL : hasR;
        if (flag)
            throw Error(Errc::DuplicateEdge, std::string("second waveguide on side ") +
                                                 side_char(w.side));
        flag = true;
    }
    if (!(kappa_int >= 0.0))
        throw Error(Errc::NegativeRate, "internal loss must be nonnegative");

    ResonatorArray a{n, omega0, std::move(couplings), std::move(waveguides), kappa_int};
    if (!is_connected(connectivity(a)))
        throw Error(Errc::DisconnectedGraph, "coupling graph is not connected");
    return a;
}

Eigen::MatrixXd coupling_matrix(const ResonatorArray& a)
{
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(a.n, a.n);
    for (const auto& c : a.couplings) {
        h(c.i, c.j) += c.u;
        h(c.j, c.i) += c.u;
    }
    return h;
}

Eigen::MatrixXd hamiltonian(const ResonatorArray& a)
{
    Eigen::MatrixXd h = coupling_matrix(a);
    h.diagonal().array() += a.omega0;
    return h;
}

namespace {

void fix_signs(Eigen::MatrixXd& V)
{
    for (Eigen::Index k = 0; k < V.cols(); ++k) {
        double tol = 1e-10 * V.col(k).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < V.rows(); ++r) {
            if (std::abs(V(r, k)) > tol) {
                if (V(r, k) < 0)
                    V.col(k) *= -1.0;
                break;
            }
        }
    }
}

double sign_of(double x) { return x < 0 ? -1.0 : 1.0; }

} // namespace

void attach_rates(NormalModeBasis& basis, const ResonatorArray& a)
{
    const int n = basis.size();
    basis.gammaL = Eigen::VectorXd::Zero(n);
    basis.gammaR = Eigen::VectorXd::Zero(n);
    basis.gL = Eigen::VectorXd::Ones(n);
    basis.gR = Eigen::VectorXd::Ones(n);
    for (const auto& w : a.waveguides) {
        auto& rate = w.side == Side::L ? basis.gammaL : basis.gammaR;
        auto& sgn = w.side == Side::L ? basis.gL : basis.gR;
        for (int k = 0; k < n; ++k) {
            double v = basis.vectors(w.node, k);
            rate(k) = w.gamma * v * v;
            sgn(k) = sign_of(v);
        }
    }
}

NormalModeBasis normal_modes(const ResonatorArray& a)
{
    // omega0 I commutes with everything, so diagonalize the coupling part alone.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coupling_matrix(a));
    NormalModeBasis b;
    b.vectors = es.eigenvectors();
    b.frequencies = es.eigenvalues().array() + a.omega0;
    fix_signs(b.vectors);
    attach_rates(b, a);
    return b;
}

NormalModeBasis rectangular_modes(int L, int M, double u, double v, double omega0)
{
    const int n = L * M;
    struct Entry {
        int p, q;
        double w;
    };
    std::vector<Entry> modes;
    for (int p = 1; p <= L; ++p)
        for (int q = 1; q <= M; ++q)
            modes.push_back({p, q,
                             omega0 + 2.0 * v * std::cos(M_PI * p / (L + 1)) +
                                 2.0 * u * std::cos(M_PI * q / (M + 1))});
    std::stable_sort(modes.begin(), modes.end(),
                     [](const Entry& x, const Entry& y) { return x.w < y.w; });

    NormalModeBasis b;
    b.vectors.resize(n, n);
    b.frequencies.resize(n);
    const double norm = 2.0 / std::sqrt(double(L + 1) * double(M + 1));
    for (int k = 0; k < n; ++k) {
        const auto& e = modes[k];
        b.frequencies(k) = e.w;
        b.labels.emplace_back(e.p, e.q);
        for (int l = 1; l <= L; ++l)
            for (int m = 1; m <= M; ++m)
                b.vectors(lattice_index(M, l, m), k) = norm * std::sin(M_PI * l * e.p / (L + 1)) *
                                                       std::sin(M_PI * m * e.q / (M + 1));
    }
    b.gammaL = b.gammaR = Eigen::VectorXd::Zero(n);
    b.gL = b.gR = Eigen::VectorXd::Ones(n);
    return b;
}

ResonatorArray rectangular_array(int L, int M, double u, double v, double omega0,
                                 std::vector<Waveguide> waveguides, double kappa_int)
{
    std::vector<Coupling> cs;
    for (int l = 1; l <= L; ++l)
        for (int m = 1; m <= M; ++m) {
            if (m < M)
                cs.push_back({lattice_index(M, l, m), lattice_index(M, l, m + 1), u});
            if (l < L)
                cs.push_back({lattice_index(M, l, m), lattice_index(M, l + 1, m), v});
        }
    return build_array(L * M, omega0, std::move(cs), std::move(waveguides), kappa_int);
}

ResonatorArray two_ring(double omega0, double u, double GammaL, double GammaR, double kappa_int)
{
    std::vector<Waveguide> ws{{0, GammaL, Side::L}};
    if (GammaR > 0.0)
        ws.push_back({1, GammaR, Side::R});
    return build_array(2, omega0, {{0, 1, u}}, std::move(ws), kappa_int);
}

ResonatorArray four_ring(double omega0, double u, double v, double GammaL, double GammaR,
                         double kappa_int)
{
    std::vector<Waveguide> ws{{0, GammaL, Side::L}};
    if (GammaR > 0.0)
        ws.push_back({2, GammaR, Side::R});
    return build_array(4, omega0, {{0, 1, u}, {1, 2, v}, {2, 3, u}, {0, 3, v}}, std::move(ws),
                       kappa_int);
}

double degeneracy_tol(const Eigen::VectorXd& freqs)
{
    double scale = freqs.size() ? freqs.cwiseAbs().maxCoeff() : 0.0;
    return 1e-9 * std::max(scale, 1e-300);
}

std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXd& freqs)
{
    std::vector<int> order(freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return freqs(x) < freqs(y); });
    const double tol = degeneracy_tol(freqs);
    std::vector<std::vector<int>> groups;
    for (int k : order) {
        if (!groups.empty() && std::abs(freqs(k) - freqs(groups.back().back())) < tol)
            groups.back().push_back(k);
        else
            groups.push_back({k});
    }
    return groups;
}

} // namespace rbskit
