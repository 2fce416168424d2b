// rbskit: sweeps, operating points, composition, feasibility, robustness,
// oracle validation and spacing optimization for modulated resonator arrays.

#include "rbskit/composer.hpp"
#include "rbskit/device_io.hpp"
#include "rbskit/errors.hpp"
#include "rbskit/feasibility.hpp"
#include "rbskit/operating_points.hpp"
#include "rbskit/parallel.hpp"
#include "rbskit/perturbation.hpp"
#include "rbskit/rwa.hpp"
#include "rbskit/td_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace rbskit;
using nlohmann::json;

namespace {

struct Options {
    std::string device;
    std::string out;
    std::string format = "csv";
    std::string emit_normalized;
    std::optional<double> eps_min, eps_max;
    std::optional<int> samples;
    std::string kind;
    double tol = 0.05;
    int eps_grid = 10;
    double ratio = 0.5;
    int branch = -1;
    double mu = 0.0;
    double phi = 0.0;
    std::string model = "edge";
    std::string harborth = "standard";
    std::string series_csv;
    std::string lattice;
};

// exit 3 is reserved for validity-guard failures
struct GuardFailure {
    std::string what;
};

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw Error(Errc::SchemaError, "cannot write '" + path + "'");
    f << text;
}

std::string port_name(const PortLabel& p) { return "mode" + std::to_string(p.mode) + side_char(p.side); }

json ports_json(const std::vector<PortLabel>& ports)
{
    json a = json::array();
    for (size_t k = 0; k < ports.size(); ++k)
        a.push_back({{"index", k}, {"mode", ports[k].mode}, {"side", std::string(1, side_char(ports[k].side))},
                     {"label", port_name(ports[k])}, {"carrier_ghz", rad_to_ghz(ports[k].carrier)},
                     {"linewidth_ghz", rad_to_ghz(ports[k].linewidth)}});
    return a;
}

json matrix_json(const CMatrixXd& m)
{
    json re = json::array(), im = json::array(), a2 = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array(), ii = json::array(), aa = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ii.push_back(m(r, c).imag());
            aa.push_back(std::norm(m(r, c)));
        }
        re.push_back(rr);
        im.push_back(ii);
        a2.push_back(aa);
    }
    return {{"re", re}, {"im", im}, {"abs2", a2}};
}

json transfer_json(const TransferMatrix& t)
{
    json j = {{"device", t.device}, {"eps_ghz", rad_to_ghz(t.eps)}, {"ports", ports_json(t.ports)},
              {"matrix", matrix_json(t.m)}, {"max_column_norm", max_column_norm(t.m)}, {"warnings", t.warnings}};
    return j;
}

json maybe(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

DeviceFile load(const Options& o)
{
    if (o.device.empty())
        throw Error(Errc::SchemaError, "--device is required");
    DeviceFile d = load_device_file(o.device);
    if (!o.emit_normalized.empty())
        write_text(o.emit_normalized, dump_device_json(d));
    return d;
}

// Per-mode rates of the lowest mode; the devices of interest have uniform support.
struct Rates {
    double gammaL = 0.0, gammaR = 0.0, kappa_int = 0.0;
    double GammaL = 0.0, GammaR = 0.0;
};

Rates rates_of(const ResonatorArray& a, const NormalModeBasis& b)
{
    Rates r;
    r.kappa_int = a.kappa_int;
    if (b.size() > 0) {
        r.gammaL = b.gammaL(0);
        r.gammaR = b.gammaR(0);
    }
    if (auto w = a.waveguide(Side::L))
        r.GammaL = w->gamma;
    if (auto w = a.waveguide(Side::R))
        r.GammaR = w->gamma;
    return r;
}

json markers(const ResonatorArray& a, const NormalModeBasis& b)
{
    const Rates r = rates_of(a, b);
    json m = json::object();
    auto put = [&](const char* key, PointKind k) {
        PointParams p{r.gammaL, r.gammaR, r.kappa_int};
        try {
            m[key] = rad_to_ghz(operating_point(k, p).eps);
        } catch (const Error&) {
        }
    };
    if (r.gammaR == 0.0) {
        put("eps_gcc_ghz", PointKind::GCC);
        put("eps_bs_minus_ghz", PointKind::bs50_minus);
        put("eps_bs_plus_ghz", PointKind::bs50_plus);
        put("eps_uc_ghz", PointKind::undercoupled_peak);
    } else {
        put("eps_bs_R_ghz", PointKind::bs_R_2wg);
        const double disc = r.gammaL * r.gammaL - std::pow(r.gammaR + r.kappa_int, 2);
        if (disc >= 0.0)
            m["eps_gcc_2wg_ghz"] = rad_to_ghz(std::sqrt(disc));
    }
    if (a.n == 4 && r.gammaR == 0.0)
        put("eps_4bs_ghz", PointKind::four_way);
    return m;
}

std::vector<double> eps_samples(const Options& o, const DeviceFile& d, double default_max)
{
    double lo = d.sweep ? d.sweep->eps_min_ghz : 0.0;
    double hi = d.sweep ? d.sweep->eps_max_ghz : default_max;
    int n = d.sweep ? d.sweep->samples : 101;
    if (o.eps_min)
        lo = *o.eps_min;
    if (o.eps_max)
        hi = *o.eps_max;
    if (o.samples)
        n = *o.samples;
    if (n < 1 || lo < 0.0 || hi < lo)
        throw Error(Errc::SchemaError, "need samples >= 1 and 0 <= eps-min <= eps-max");
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k)
        e[k] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
    return e;
}

double min_gap(const Eigen::VectorXd& w)
{
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k < w.size(); ++k)
        g = std::min(g, w(k) - w(k - 1));
    return g;
}

const char* kPlotStub = R"PY(# Plot |Xi_ij|^2 against eps from the sweep CSV and its sidecar JSON.
import json, sys
import pandas as pd
import matplotlib.pyplot as plt

csv = sys.argv[1] if len(sys.argv) > 1 else "%CSV%"
side = json.load(open(csv + ".json"))
df = pd.read_csv(csv)
labels = {p["index"]: p["label"] for p in side["ports"]}
for (pi, po), g in df.groupby(["port_in", "port_out"]):
    plt.plot(g.eps_ghz, g.abs2, label=f"{labels[po]} <- {labels[pi]}")
for name, x in side["markers"].items():
    plt.axvline(x, ls=":", c="k")
    plt.text(x, 1.02, name.replace("_ghz", ""), rotation=90, va="bottom", fontsize=7)
plt.xlabel("eps / 2pi (GHz)")
plt.ylabel("|Xi|^2")
plt.legend(fontsize=7)
plt.savefig(csv + ".png", dpi=150)
)PY";

int cmd_sweep(const Options& o)
{
    DeviceFile d = load(o);
    const ResonatorArray a = to_array(d);
    const ModulationSpec mod = to_modulation(d);
    const auto carriers = to_carriers(d);
    const NormalModeBasis b = normal_modes(a);
    const double default_max = b.size() > 1 ? 0.5 * rad_to_ghz(min_gap(b.frequencies)) : 1.0;
    const auto eps = eps_samples(o, d, default_max);

    std::vector<TransferMatrix> rows(eps.size());
    parallel_for(eps.size(), [&](size_t k) { rows[k] = generic_transfer(a, mod, ghz_to_rad(eps[k]), carriers); });

    std::ostringstream os;
    os.precision(12);
    if (o.format == "csv") {
        os << "eps_ghz,port_in,port_out,re,im,abs2\n";
        for (size_t k = 0; k < eps.size(); ++k)
            for (Eigen::Index c = 0; c < rows[k].size(); ++c)
                for (Eigen::Index r = 0; r < rows[k].size(); ++r) {
                    auto x = rows[k].m(r, c);
                    os << eps[k] << ',' << c << ',' << r << ',' << x.real() << ',' << x.imag() << ',' << std::norm(x)
                       << '\n';
                }
    } else if (o.format == "json") {
        json arr = json::array();
        for (size_t k = 0; k < eps.size(); ++k)
            arr.push_back(transfer_json(rows[k]));
        os << arr.dump(1) << '\n';
    } else {
        throw Error(Errc::SchemaError, "--format must be csv or json");
    }
    write_text(o.out, os.str());

    if (!o.out.empty() && o.out != "-") {
        std::set<std::string> warn;
        for (const auto& r : rows)
            warn.insert(r.warnings.begin(), r.warnings.end());
        json side = {{"device", d.name},
                     {"ports", rows.empty() ? json::array() : ports_json(rows.front().ports)},
                     {"markers", markers(a, b)},
                     {"warnings", std::vector<std::string>(warn.begin(), warn.end())},
                     {"schema", "eps_ghz,port_in,port_out,re,im,abs2"}};
        write_text(o.out + ".json", side.dump(2) + "\n");
        std::string stub = kPlotStub;
        stub.replace(stub.find("%CSV%"), 5, o.out);
        write_text(o.out + ".plot.py", stub);
    }
    return 0;
}

int cmd_point(const Options& o)
{
    DeviceFile d = load(o);
    const ResonatorArray a = to_array(d);
    const NormalModeBasis b = normal_modes(a);
    const Rates r = rates_of(a, b);
    if (o.kind.empty())
        throw Error(Errc::SchemaError, "--kind is required");
    const PointKind kind = parse_point_kind(o.kind);
    PointParams p{r.gammaL, r.gammaR, r.kappa_int, o.ratio, o.branch};
    const OperatingPoint op = operating_point(kind, p);

    json j = {{"kind", point_kind_name(kind)},
              {"eps_ghz", rad_to_ghz(op.eps)},
              {"K", maybe(op.K)},
              {"loss", op.loss},
              {"ratio", maybe(op.R)},
              {"I_L", maybe(op.I_L)},
              {"I_R", maybe(op.I_R)},
              {"alpha_L", r.kappa_int > 0 ? json(r.GammaL / r.kappa_int) : json(nullptr)},
              {"alpha_R", r.kappa_int > 0 ? json(r.GammaR / r.kappa_int) : json(nullptr)}};
    if (!d.tones.empty()) {
        const ModulationSpec mod = to_modulation(d);
        TransferMatrix t = generic_transfer(a, mod, op.eps, to_carriers(d));
        j["transfer"] = transfer_json(t);
        const double col = t.m.col(0).squaredNorm();
        j["loss_from_transfer"] = 1.0 - col;
    }
    write_text(o.out, j.dump(2) + "\n");
    return 0;
}

TransferMatrix stage_transfer(const DeviceFile& s)
{
    const ResonatorArray a = to_array(s);
    const ModulationSpec mod = to_modulation(s);
    auto sys = effective_system(a, normal_modes(a), mod, to_carriers(s));
    return effective_transfer(sys);
}

int cmd_compose(const Options& o)
{
    DeviceFile d = load(o);
    if (d.stages.empty())
        throw Error(Errc::SchemaError, "field '/stages': compose needs a stage list");
    const std::string kind = o.kind.empty() ? "cascade" : o.kind;
    json j;
    if (kind == "cascade") {
        std::vector<TransferMatrix> st;
        for (const auto& s : d.stages)
            st.push_back(stage_transfer(s));
        j = transfer_json(cascade(st));
    } else if (kind == "phase_shifter" || kind == "mach_zehnder") {
        if (d.stages.size() != 2)
            throw Error(Errc::SchemaError, "field '/stages': " + kind + " needs exactly two stages");
        RingStage rs[2];
        for (int k = 0; k < 2; ++k) {
            const ResonatorArray a = to_array(d.stages[k]);
            const Rates r = rates_of(a, normal_modes(a));
            rs[k].gamma = r.gammaL;
            rs[k].kappa_int = r.kappa_int;
            rs[k].branch = o.branch;
            if (!d.stages[k].tones.empty())
                rs[k].eps = ghz_to_rad(d.stages[k].tones.front().eps_ghz);
        }
        if (kind == "phase_shifter") {
            auto ps = phase_shifter(o.mu, rs[0], rs[1]);
            j = transfer_json(ps.xi);
            j["K_PS"] = ps.K_PS;
            j["loss"] = ps.loss;
            j["relative_phase"] = ps.relative_phase;
        } else {
            auto mz = mach_zehnder(o.phi, rs[0], rs[1]);
            j = transfer_json(mz.xi);
            j["K_MZ"] = mz.K_MZ;
            j["p_same"] = mz.p_same;
            j["p_swap"] = mz.p_swap;
        }
    } else {
        throw Error(Errc::SchemaError, "--kind for compose must be cascade, phase_shifter or mach_zehnder");
    }
    write_text(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_feasibility(const Options& o)
{
    DeviceFile d = load(o);
    const ResonatorArray a = to_array(d);
    const HarborthForm form = o.harborth == "shifted" ? HarborthForm::shifted : HarborthForm::standard;
    const FeasibilityReport r = classify_and_verdict(a, form);
    json j = {{"n", r.n},
              {"simple", r.penny.simple},
              {"connected", r.penny.connected},
              {"planar", r.penny.planar},
              {"edges", r.penny.edges},
              {"penny_bound", r.penny.penny_bound},
              {"penny_bound_ok", r.penny.penny_bound_ok},
              {"girth", r.penny.girth},
              {"triangle_free_bound", r.penny.triangle_free_bound},
              {"triangle_free_bound_ok", r.penny.triangle_free_bound_ok},
              {"n_mod4_ok", r.n_mod4_ok},
              {"regular", r.regular},
              {"degree", r.degree},
              {"laplacian_even_integers", r.laplacian_even_integers},
              {"hadamard_searched", r.hadamard_searched},
              {"hadamard_diagonalizable", r.hadamard_diagonalizable},
              {"property1", {{"pass", r.property1.pass}, {"deviation", r.property1.deviation}}},
              {"property2", {{"pass", r.property2.pass}, {"deviation", maybe(r.property2.deviation)}}},
              {"size_excluded", r.size_excluded},
              {"candidate_class", r.candidate_class},
              {"conjecture_flag", r.conjecture_flag},
              {"verdict", verdict_name(r.verdict)},
              {"reasons", r.reasons},
              {"notes", r.notes}};
    if (r.witness) {
        json w = json::array();
        for (Eigen::Index i = 0; i < r.witness->rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < r.witness->cols(); ++k)
                row.push_back((*r.witness)(i, k));
            w.push_back(row);
        }
        j["witness"] = w;
    }
    write_text(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_robustness(const Options& o)
{
    DeviceFile d = load(o);
    const ResonatorArray a = to_array(d);
    const ModulationSpec mod = to_modulation(d);
    const auto model = parse_perturbation_kind(o.model);
    std::vector<int> signs = mod.signs;
    if (!o.lattice.empty()) {
        int L = 0, M = 0;
        char x = 0;
        std::istringstream in(o.lattice);
        if (!(in >> L >> x >> M) || x != 'x' || L < 1 || M < 1)
            throw Error(Errc::SchemaError, "--lattice expects LxM, e.g. 2x3");
        if (L * M != a.n)
            throw Error(Errc::LengthMismatch, "--lattice " + o.lattice + " does not match " + std::to_string(a.n) +
                                                  " rings");
        signs = rectangular_pattern_signs(L, M, parse_rect_pattern(o.kind));
    }
    if (signs.empty())
        throw Error(Errc::SchemaError, "device has no modulation signs; give --kind P1|P2|P3 with --lattice");
    const auto r = robustness_report(a, signs, model, o.kind);
    json terms = json::array();
    for (const auto& t : r.induced_terms)
        terms.push_back({{"type", t.type}, {"i", t.i}, {"j", t.j}, {"coefficient", t.coefficient}});
    json j = {{"pattern", r.pattern},
              {"signs", signs},
              {"model", o.model},
              {"first_order_robust", r.first_order_robust},
              {"slope", maybe(r.slope)},
              {"scales", r.scales},
              {"residuals", r.residuals},
              {"induced_terms", terms}};
    write_text(o.out, j.dump(2) + "\n");
    return 0;
}

int cmd_validate(const Options& o)
{
    DeviceFile d = load(o);
    const ResonatorArray a = to_array(d);
    const ModulationSpec mod = to_modulation(d);
    const auto carriers = to_carriers(d);
    const NormalModeBasis b = normal_modes(a);
    if (b.size() < 2)
        throw Error(Errc::SchemaError, "validate needs at least two modes");
    const double gap = min_gap(b.frequencies);
    Options oo = o;
    if (!d.sweep && !o.eps_min && !o.eps_max) {
        oo.eps_min = 0.01 * rad_to_ghz(gap);
        oo.eps_max = 0.2 * rad_to_ghz(gap);
    }
    oo.samples = o.eps_grid;
    const auto eps = eps_samples(oo, d, 0.2 * rad_to_ghz(gap));

    json pts = json::array();
    bool all = true;
    std::vector<double> x, y;
    for (double e : eps) {
        const ModulationSpec m = with_amplitude(mod, ghz_to_rad(e));
        auto eff = effective_transfer(effective_system(a, b, m, carriers));
        eff.eps = ghz_to_rad(e);
        auto emp = steady_state_transfer(a, m, eff.ports);
        auto rep = compare(eff, emp, o.tol, gap);
        all = all && rep.pass;
        x.push_back(rep.eps_over_delta);
        y.push_back(rep.max_deviation);
        pts.push_back({{"eps_ghz", e},
                       {"eps_over_delta", rep.eps_over_delta},
                       {"max_deviation", rep.max_deviation},
                       {"pass", rep.pass},
                       {"power_balance", emp.power_balance}});
    }
    json j = {{"tol", o.tol}, {"points", pts}, {"all_pass", all}};
    if (x.size() >= 2)
        j["spearman"] = maybe(spearman(x, y));
    write_text(o.out, j.dump(2) + "\n");
    if (!all)
        throw GuardFailure{"at least one oracle comparison exceeded the tolerance"};
    return 0;
}

int cmd_optimize(const Options& o)
{
    DeviceFile d = load(o);
    Graph g{d.n, {}};
    for (const auto& e : d.edges)
        g.edges.push_back({e.i, e.j});
    std::vector<int> cls = d.free_classes;
    if (cls.empty()) {
        // smallest coupling value is the fixed reference; every other distinct value is a free class
        std::map<double, int> ids;
        for (const auto& e : d.edges)
            ids.emplace(e.u_ghz, 0);
        int next = -1;
        for (auto& [u, id] : ids)
            id = next++;
        for (const auto& e : d.edges)
            cls.push_back(ids[e.u_ghz]);
    }
    const SpacingResult r = optimize_spacings(g, cls);
    json j = {{"weights_relative", r.weights},
              {"residual", r.residual},
              {"converged", r.converged},
              {"evaluations", r.evaluations},
              {"classes", cls}};
    write_text(o.out, j.dump(2) + "\n");
    if (!r.converged)
        throw Error(Errc::NoConvergence, "best residual " + std::to_string(r.residual) + " is above 1e-10");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rbskit: frequency-domain beam splitters from modulated coupled resonators"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--device", o.device, "device JSON file")->required();
        c->add_option("--out", o.out, "output path (stdout if omitted)");
        c->add_option("--emit-normalized", o.emit_normalized, "also write the normalized device JSON here");
    };
    auto eps_range = [&](CLI::App* c) {
        c->add_option("--eps-min", o.eps_min, "smallest eps / 2pi in GHz");
        c->add_option("--eps-max", o.eps_max, "largest eps / 2pi in GHz");
    };

    auto* sweep = app.add_subcommand("sweep", "|Xi_ij|^2 against eps as CSV, with a sidecar of markers");
    common(sweep);
    eps_range(sweep);
    sweep->add_option("--samples", o.samples, "number of eps samples");
    sweep->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* point = app.add_subcommand("point", "operating point of a two- or four-ring device");
    common(point);
    point->add_option("--kind", o.kind, "gcc, bs50_minus, bs50_plus, bs_R_2wg, undercoupled_peak, four_way, ratio");
    point->add_option("--ratio", o.ratio, "transfer fraction for --kind ratio");
    point->add_option("--branch", o.branch, "-1 or +1 for --kind ratio");

    auto* compose = app.add_subcommand("compose", "cascade the stages of a device file");
    common(compose);
    compose->add_option("--kind", o.kind, "cascade, phase_shifter or mach_zehnder");
    compose->add_option("--mu", o.mu, "phase-shifter phase");
    compose->add_option("--phi", o.phi, "Mach-Zehnder phase on the second stage");
    compose->add_option("--branch", o.branch, "50-50 branch for mach_zehnder");

    auto* feas = app.add_subcommand("feasibility", "equal-spacing and uniform-support feasibility report");
    common(feas);
    feas->add_option("--harborth", o.harborth, "standard or shifted")->check(CLI::IsMember({"standard", "shifted"}));

    auto* rob = app.add_subcommand("robustness", "first-order robustness of the device's modulation pattern");
    common(rob);
    rob->add_option("--model", o.model, "edge or diagonal")->check(CLI::IsMember({"edge", "diagonal"}));
    rob->add_option("--kind", o.kind, "pattern label; with --lattice, P1, P2 or P3 selects the signs");
    rob->add_option("--lattice", o.lattice, "LxM: rings are a rectangular lattice in row-major order");

    auto* val = app.add_subcommand("validate", "compare the effective model with time-domain integration");
    common(val);
    eps_range(val);
    val->add_option("--eps-grid", o.eps_grid, "number of eps points");
    val->add_option("--tol", o.tol, "tolerance on |Xi_ij|^2");

    auto* opt = app.add_subcommand("optimize", "coupling ratios for equally spaced frequencies");
    common(opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep)
            return cmd_sweep(o);
        if (*point)
            return cmd_point(o);
        if (*compose)
            return cmd_compose(o);
        if (*feas)
            return cmd_feasibility(o);
        if (*rob)
            return cmd_robustness(o);
        if (*val)
            return cmd_validate(o);
        if (*opt)
            return cmd_optimize(o);
    } catch (const Error& e) {
        std::cerr << json{{"error", errc_name(e.code())}, {"message", e.what()}}.dump() << '\n';
        return is_validity_guard(e.code()) ? 3 : 2;
    } catch (const GuardFailure& g) {
        std::cerr << json{{"error", "ValidationFailed"}, {"message", g.what}}.dump() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    }
    return 2;
}
