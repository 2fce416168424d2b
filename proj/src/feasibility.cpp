#include "rbskit/feasibility.hpp"
#include "rbskit/errors.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <set>

namespace rbskit {

namespace {

std::vector<std::vector<int>> adjacency(const Graph& g)
{
    std::vector<std::vector<int>> adj(g.n);
    for (auto [i, j] : g.edges)
        if (i != j) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    return adj;
}

std::set<std::pair<int, int>> simple_edges(const Graph& g)
{
    std::set<std::pair<int, int>> s;
    for (auto [i, j] : g.edges)
        if (i != j)
            s.insert({std::min(i, j), std::max(i, j)});
    return s;
}

bool bipartite(const std::vector<std::vector<int>>& adj)
{
    std::vector<int> col(adj.size(), -1);
    for (size_t s = 0; s < adj.size(); ++s) {
        if (col[s] >= 0)
            continue;
        col[s] = 0;
        std::queue<int> q;
        q.push(int(s));
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v]) {
                if (col[w] < 0) {
                    col[w] = 1 - col[v];
                    q.push(w);
                } else if (col[w] == col[v]) {
                    return false;
                }
            }
        }
    }
    return true;
}

std::vector<std::vector<int>> components(const std::vector<std::vector<int>>& adj)
{
    std::vector<int> seen(adj.size(), 0);
    std::vector<std::vector<int>> out;
    for (size_t s = 0; s < adj.size(); ++s) {
        if (seen[s])
            continue;
        out.emplace_back();
        std::vector<int> stack{int(s)};
        seen[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            out.back().push_back(v);
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
    }
    return out;
}

// +-1 vectors as bitmasks: bit k set means entry k is -1.
int pm_dot(uint32_t a, uint32_t b, int n) { return n - 2 * std::popcount(a ^ b); }

int pm_entry(uint32_t mask, int k) { return (mask >> k) & 1u ? -1 : 1; }

// Depth-first search for k mutually orthogonal vectors among `cand`.
struct OrthoSearch {
    int n;
    long budget;
    long nodes = 0;
    bool exhausted = false;
    std::vector<uint32_t> chosen;

    OrthoSearch(int n_, long budget_) : n(n_), budget(budget_) {}

    bool run(const std::vector<uint32_t>& cand, int k)
    {
        if (int(chosen.size()) == k)
            return true;
        if (int(chosen.size() + cand.size()) < k)
            return false;
        for (size_t a = 0; a < cand.size(); ++a) {
            if (++nodes > budget) {
                exhausted = true;
                return false;
            }
            if (int(chosen.size() + cand.size() - a) < k)
                return false;
            std::vector<uint32_t> next;
            next.reserve(cand.size() - a);
            for (size_t b = a + 1; b < cand.size(); ++b)
                if (pm_dot(cand[a], cand[b], n) == 0)
                    next.push_back(cand[b]);
            chosen.push_back(cand[a]);
            if (run(next, k))
                return true;
            chosen.pop_back();
            if (exhausted)
                return false;
        }
        return false;
    }
};

// Multiplicities of the (numerically) distinct eigenvalues of a symmetric matrix.
std::vector<std::pair<double, int>> eigen_groups(const Eigen::MatrixXd& m, double tol)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::vector<std::pair<double, int>> g;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        double x = es.eigenvalues()(k);
        if (!g.empty() && std::abs(x - g.back().first) <= tol)
            ++g.back().second;
        else
            g.push_back({x, 1});
    }
    return g;
}

} // namespace

int harborth_bound(int n, HarborthForm form)
{
    if (form == HarborthForm::shifted)
        return int(std::floor(3.0 * n - std::sqrt(12.0 * n) - 3.0));
    return int(std::floor(3.0 * n - std::sqrt(12.0 * n - 3.0)));
}

int triangle_free_bound(int n) { return int(std::floor(2.0 * n - 1.65 * std::sqrt(double(n)))); }

int girth(const Graph& g)
{
    auto adj = adjacency(g);
    int best = 0;
    for (int s = 0; s < g.n; ++s) {
        std::vector<int> dist(g.n, -1), parent(g.n, -1);
        dist[s] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    q.push(w);
                } else if (parent[v] != w) {
                    int len = dist[v] + dist[w] + 1;
                    if (best == 0 || len < best)
                        best = len;
                }
            }
        }
    }
    return best;
}

PennyFlags check_penny_necessary(const Graph& g, HarborthForm form)
{
    PennyFlags f;
    auto edges = simple_edges(g);
    f.simple = edges.size() == g.edges.size();
    f.connected = is_connected(g);
    f.edges = int(edges.size());

    using BG = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    BG bg(g.n);
    for (auto [i, j] : edges)
        boost::add_edge(i, j, bg);
    f.planar = boost::boyer_myrvold_planarity_test(bg);

    f.penny_bound = harborth_bound(g.n, form);
    f.penny_bound_ok = f.edges <= f.penny_bound;
    Graph simple{g.n, {edges.begin(), edges.end()}};
    f.girth = girth(simple);
    f.triangle_free_bound = triangle_free_bound(g.n);
    f.triangle_free_bound_ok = (f.girth != 0 && f.girth < 4) || f.edges <= f.triangle_free_bound;
    return f;
}

bool is_regular(const Graph& g, int* degree)
{
    std::vector<int> deg(g.n, 0);
    for (auto [i, j] : simple_edges(g)) {
        ++deg[i];
        ++deg[j];
    }
    bool reg = std::adjacent_find(deg.begin(), deg.end(), std::not_equal_to<>()) == deg.end();
    if (degree)
        *degree = reg && g.n > 0 ? deg[0] : -1;
    return reg;
}

Eigen::MatrixXi laplacian(const Graph& g)
{
    Eigen::MatrixXi L = Eigen::MatrixXi::Zero(g.n, g.n);
    for (auto [i, j] : simple_edges(g)) {
        L(i, j) -= 1;
        L(j, i) -= 1;
        L(i, i) += 1;
        L(j, j) += 1;
    }
    return L;
}

bool laplacian_even_integers(const Graph& g)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g).cast<double>(), Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        double x = es.eigenvalues()(k);
        double r = std::round(x);
        if (std::abs(x - r) > 1e-8 || std::llround(r) % 2 != 0)
            return false;
    }
    return true;
}

bool verify_witness(const Graph& g, const Eigen::MatrixXi& H)
{
    if (H.rows() != g.n || H.cols() != g.n)
        return false;
    if ((H.array().abs() != 1).any())
        return false;
    Eigen::MatrixXi G = H.transpose() * H;
    if (G != g.n * Eigen::MatrixXi::Identity(g.n, g.n))
        return false;
    Eigen::MatrixXi D = H.transpose() * laplacian(g) * H;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && D(i, j) != 0)
                return false;
    return true;
}

HadamardResult check_hadamard_diagonalizable(const Graph& g, long node_budget)
{
    HadamardResult r;
    r.regular = is_regular(g, &r.degree);
    r.laplacian_even = laplacian_even_integers(g);
    const int n = g.n;
    if (!(n == 1 || n == 2 || n % 4 == 0)) {
        r.reason = "N is not 1, 2 or a multiple of 4";
        return r;
    }
    if (!r.regular) {
        r.reason = "graph is not regular";
        return r;
    }
    if (!r.laplacian_even) {
        r.reason = "Laplacian eigenvalues are not all even integers";
        return r;
    }
    if (n > kHadamardSearchMaxN)
        throw Error(Errc::SearchLimitExceeded,
                    "witness search is limited to N <= 16; necessary conditions all hold");

    const Eigen::MatrixXi L = laplacian(g);
    auto groups = eigen_groups(L.cast<double>(), 1e-8);
    std::map<int, std::vector<uint32_t>> by_lambda;
    for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
        const uint32_t h = mask << 1; // entry 0 fixed to +1
        int lambda = 0;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            int v = 0;
            for (int j = 0; j < n; ++j)
                v += L(i, j) * pm_entry(h, j);
            if (i == 0)
                lambda = v;
            else
                ok = v == lambda * pm_entry(h, i);
        }
        if (ok)
            by_lambda[lambda].push_back(h);
    }

    std::vector<uint32_t> columns;
    for (auto [lam, mult] : groups) {
        const int key = int(std::lround(lam));
        auto it = by_lambda.find(key);
        if (it == by_lambda.end()) {
            r.reason = "no +-1 eigenvector for eigenvalue " + std::to_string(key);
            return r;
        }
        OrthoSearch s{n, node_budget};
        if (!s.run(it->second, mult)) {
            r.exhaustive = !s.exhausted;
            r.reason = s.exhausted ? "search budget exhausted" : "eigenspace " + std::to_string(key) + " has no +-1 basis";
            return r;
        }
        columns.insert(columns.end(), s.chosen.begin(), s.chosen.end());
    }
    Eigen::MatrixXi H(n, n);
    for (int c = 0; c < n; ++c)
        for (int k = 0; k < n; ++k)
            H(k, c) = pm_entry(columns[c], k);
    if (!verify_witness(g, H)) {
        r.reason = "internal: witness failed exact verification";
        return r;
    }
    r.diagonalizable = true;
    r.witness = H;
    return r;
}

PropertyCheck property1_check(const Eigen::VectorXd& frequencies, double rel_tol)
{
    PropertyCheck p;
    std::vector<double> w(frequencies.data(), frequencies.data() + frequencies.size());
    std::sort(w.begin(), w.end());
    if (w.size() < 3) {
        p.pass = true;
        return p;
    }
    std::vector<double> gaps;
    for (size_t k = 1; k < w.size(); ++k)
        gaps.push_back(w[k] - w[k - 1]);
    double mean = 0.0;
    for (double d : gaps)
        mean += d;
    mean /= double(gaps.size());
    if (!(mean > 0.0)) {
        p.deviation = std::numeric_limits<double>::infinity();
        return p;
    }
    for (double d : gaps)
        p.deviation = std::max(p.deviation, std::abs(d - mean) / mean);
    p.pass = p.deviation <= rel_tol;
    return p;
}

PropertyCheck property2_check(const NormalModeBasis& basis, double abs_tol)
{
    PropertyCheck p;
    const int n = basis.size();
    const double target = 1.0 / std::sqrt(double(n));
    p.pass = true;
    for (const auto& grp : degenerate_groups(basis.frequencies)) {
        if (grp.size() == 1) {
            for (int j = 0; j < n; ++j)
                p.deviation = std::max(p.deviation, std::abs(std::abs(basis.vectors(j, grp[0])) - target));
            continue;
        }
        if (n > kHadamardSearchMaxN) {
            p.pass = false;
            p.deviation = std::numeric_limits<double>::infinity();
            return p;
        }
        Eigen::MatrixXd Vg(n, grp.size());
        for (size_t c = 0; c < grp.size(); ++c)
            Vg.col(c) = basis.vectors.col(grp[c]);
        std::vector<uint32_t> cand;
        Eigen::VectorXd h(n);
        for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
            const uint32_t m = mask << 1;
            for (int k = 0; k < n; ++k)
                h(k) = pm_entry(m, k);
            if (std::abs((Vg.transpose() * h).squaredNorm() - n) <= 1e-8 * n)
                cand.push_back(m);
        }
        OrthoSearch s{n, 2'000'000};
        if (!s.run(cand, int(grp.size()))) {
            p.pass = false;
            p.deviation = std::max(p.deviation, target);
        }
    }
    if (p.deviation > abs_tol)
        p.pass = false;
    return p;
}

std::string candidate_class(const Graph& g)
{
    const int n = g.n;
    const auto edges = simple_edges(g);
    const auto adj = adjacency(Graph{n, {edges.begin(), edges.end()}});
    int deg = -1;
    if (!is_regular(g, &deg))
        return "";
    if (deg == 0)
        return "NK_1";
    if (deg == n - 1)
        return "K_N";
    if (n % 2 == 0) {
        auto comps = components(adj);
        if (deg == n / 2 && comps.size() == 1 && bipartite(adj))
            return "K_{N/2,N/2}";
        if (deg == n / 2 - 1 && comps.size() == 2 && int(comps[0].size()) == n / 2)
            return "2K_{N/2}";
    }
    return "";
}

const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::feasible: return "feasible";
    case Verdict::infeasible: return "infeasible";
    case Verdict::unknown: return "unknown";
    }
    return "?";
}

FeasibilityReport classify_and_verdict(const ResonatorArray& array, HarborthForm form)
{
    FeasibilityReport rep;
    const Graph g = connectivity(array);
    const int n = g.n;
    rep.n = n;
    rep.penny = check_penny_necessary(g, form);
    rep.n_mod4_ok = n == 1 || n == 2 || n % 4 == 0;
    rep.regular = is_regular(g, &rep.degree);
    rep.laplacian_even_integers = laplacian_even_integers(g);
    rep.size_excluded = n % 8 == 4 && n > 4;
    rep.conjecture_flag = n > 4 && n % 4 == 0;
    if (rep.size_excluded)
        rep.candidate_class = candidate_class(g);

    auto& why = rep.reasons;
    if (!rep.penny.simple)
        why.push_back("graph is not simple");
    if (!rep.penny.connected)
        why.push_back("graph is not connected");
    if (!rep.penny.planar)
        why.push_back("graph is not planar");
    if (!rep.penny.penny_bound_ok)
        why.push_back("edge count " + std::to_string(rep.penny.edges) + " exceeds the penny-graph bound " +
                      std::to_string(rep.penny.penny_bound));
    if (!rep.penny.triangle_free_bound_ok)
        why.push_back("edge count " + std::to_string(rep.penny.edges) +
                      " exceeds the triangle-free penny-graph bound " + std::to_string(rep.penny.triangle_free_bound));
    if (!rep.n_mod4_ok)
        why.push_back("N is not 1, 2 or a multiple of 4");
    if (!rep.regular)
        why.push_back("graph is not regular");
    if (!rep.laplacian_even_integers)
        why.push_back("Laplacian eigenvalues are not all even integers");
    if (rep.size_excluded) {
        std::string cls = rep.candidate_class.empty() ? "matches none of K_N, K_{N/2,N/2}, 2K_{N/2}, NK_1" : "only candidate match is " + rep.candidate_class + ", which is not a penny graph";
        why.push_back("N = 8l+4 with l > 0: no Hadamard-diagonalizable penny graph exists (" + cls + ")");
    }

    // searched even when a penny-graph reason already excludes the graph, so the report is complete
    if (rep.n_mod4_ok && rep.regular && rep.laplacian_even_integers && rep.penny.simple) {
        rep.hadamard_searched = true;
        try {
            auto h = check_hadamard_diagonalizable(g);
            rep.hadamard_diagonalizable = h.diagonalizable;
            rep.witness = h.witness;
            if (!h.diagonalizable) {
                if (h.exhaustive)
                    why.push_back("graph is not Hadamard diagonalizable (" + h.reason + ")");
                else
                    rep.notes.push_back("Hadamard search inconclusive: " + h.reason);
            }
        } catch (const Error& e) {
            rep.hadamard_searched = false;
            rep.notes.push_back(e.what());
        }
    }

    NormalModeBasis basis = normal_modes(array);
    rep.property1 = property1_check(basis.frequencies);
    rep.property2 = property2_check(basis);
    if (rep.conjecture_flag)
        rep.notes.push_back("conjecture: no Hadamard-diagonalizable penny graph with N > 4 (checked to N = 36)");

    if (!why.empty()) {
        rep.verdict = Verdict::infeasible;
        return rep;
    }
    if (!rep.hadamard_diagonalizable) {
        rep.verdict = Verdict::unknown;
        return rep;
    }
    if (!rep.property1.pass)
        why.push_back("these weights do not give equally spaced frequencies");
    if (!rep.property2.pass)
        why.push_back("these weights do not give uniform-support modes");
    rep.verdict = why.empty() ? Verdict::feasible : Verdict::infeasible;
    return rep;
}

} // namespace rbskit
