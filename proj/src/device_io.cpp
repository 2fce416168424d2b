#include "rbskit/device_io.hpp"
#include "rbskit/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace rbskit {

using nlohmann::json;

bool operator==(const EdgeSpec& a, const EdgeSpec& b) { return a.i == b.i && a.j == b.j && a.u_ghz == b.u_ghz; }
bool operator==(const WaveguideSpec& a, const WaveguideSpec& b)
{
    return a.node == b.node && a.gamma_ghz == b.gamma_ghz && a.side == b.side;
}
bool operator==(const ToneSpec& a, const ToneSpec& b)
{
    return a.eps_ghz == b.eps_ghz && a.omega_d_ghz == b.omega_d_ghz && a.phi == b.phi;
}
bool operator==(const SweepSpec& a, const SweepSpec& b)
{
    return a.eps_min_ghz == b.eps_min_ghz && a.eps_max_ghz == b.eps_max_ghz && a.samples == b.samples;
}

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg)
{
    throw Error(Errc::SchemaError, "field '" + (ptr.empty() ? std::string("/") : ptr) + "': " + msg);
}

double number(const json& j, const std::string& ptr)
{
    if (!j.is_number())
        fail(ptr, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& ptr)
{
    if (!j.is_number_integer())
        fail(ptr, "expected an integer");
    return j.get<int>();
}

const json& array_of(const json& j, const std::string& ptr)
{
    if (!j.is_array())
        fail(ptr, "expected an array");
    return j;
}

void check_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        fail(ptr, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key()))
            fail(ptr + "/" + it.key(), "unknown field");
}

DeviceFile parse_doc(const json& j, const std::string& base)
{
    check_keys(j, base,
               {"name", "n", "omega0_ghz", "edges", "waveguides", "kappa_int_ghz", "signs", "tones", "input", "sweep",
                "free_classes", "stages"});
    DeviceFile d;
    if (j.contains("name")) {
        if (!j["name"].is_string())
            fail(base + "/name", "expected a string");
        d.name = j["name"].get<std::string>();
    }
    if (j.contains("stages")) {
        const auto& st = array_of(j["stages"], base + "/stages");
        for (size_t k = 0; k < st.size(); ++k)
            d.stages.push_back(parse_doc(st[k], base + "/stages/" + std::to_string(k)));
        if (!j.contains("n"))
            return d;
    }
    if (!j.contains("n"))
        fail(base + "/n", "required");
    d.n = integer(j["n"], base + "/n");
    if (j.contains("omega0_ghz"))
        d.omega0_ghz = number(j["omega0_ghz"], base + "/omega0_ghz");
    if (j.contains("kappa_int_ghz"))
        d.kappa_int_ghz = number(j["kappa_int_ghz"], base + "/kappa_int_ghz");
    if (j.contains("edges")) {
        const auto& e = array_of(j["edges"], base + "/edges");
        for (size_t k = 0; k < e.size(); ++k) {
            const std::string p = base + "/edges/" + std::to_string(k);
            if (!e[k].is_array() || e[k].size() != 3)
                fail(p, "expected [i, j, u_ghz]");
            d.edges.push_back({integer(e[k][0], p + "/0"), integer(e[k][1], p + "/1"), number(e[k][2], p + "/2")});
        }
    }
    if (j.contains("waveguides")) {
        const auto& w = array_of(j["waveguides"], base + "/waveguides");
        for (size_t k = 0; k < w.size(); ++k) {
            const std::string p = base + "/waveguides/" + std::to_string(k);
            check_keys(w[k], p, {"node", "gamma_ghz", "side"});
            if (!w[k].contains("node") || !w[k].contains("gamma_ghz"))
                fail(p, "needs node and gamma_ghz");
            WaveguideSpec s{integer(w[k]["node"], p + "/node"), number(w[k]["gamma_ghz"], p + "/gamma_ghz"), Side::L};
            if (w[k].contains("side")) {
                const auto& sd = w[k]["side"];
                if (sd == "L")
                    s.side = Side::L;
                else if (sd == "R")
                    s.side = Side::R;
                else
                    fail(p + "/side", "expected \"L\" or \"R\"");
            }
            d.waveguides.push_back(s);
        }
    }
    if (j.contains("signs")) {
        const auto& s = array_of(j["signs"], base + "/signs");
        for (size_t k = 0; k < s.size(); ++k)
            d.signs.push_back(integer(s[k], base + "/signs/" + std::to_string(k)));
    }
    if (j.contains("tones")) {
        const auto& t = array_of(j["tones"], base + "/tones");
        for (size_t k = 0; k < t.size(); ++k) {
            const std::string p = base + "/tones/" + std::to_string(k);
            check_keys(t[k], p, {"eps_ghz", "omega_d_ghz", "phi"});
            if (!t[k].contains("omega_d_ghz"))
                fail(p + "/omega_d_ghz", "required");
            ToneSpec ts;
            ts.omega_d_ghz = number(t[k]["omega_d_ghz"], p + "/omega_d_ghz");
            if (t[k].contains("eps_ghz"))
                ts.eps_ghz = number(t[k]["eps_ghz"], p + "/eps_ghz");
            if (t[k].contains("phi"))
                ts.phi = number(t[k]["phi"], p + "/phi");
            d.tones.push_back(ts);
        }
    }
    if (j.contains("input")) {
        const std::string p = base + "/input";
        check_keys(j["input"], p, {"carriers_ghz"});
        if (j["input"].contains("carriers_ghz")) {
            const auto& c = array_of(j["input"]["carriers_ghz"], p + "/carriers_ghz");
            for (size_t k = 0; k < c.size(); ++k)
                d.carriers_ghz.push_back(number(c[k], p + "/carriers_ghz/" + std::to_string(k)));
        }
    }
    if (j.contains("sweep")) {
        const std::string p = base + "/sweep";
        const auto& s = j["sweep"];
        check_keys(s, p, {"eps_min_ghz", "eps_max_ghz", "samples"});
        for (const char* k : {"eps_min_ghz", "eps_max_ghz", "samples"})
            if (!s.contains(k))
                fail(p + "/" + k, "required");
        SweepSpec sw{number(s["eps_min_ghz"], p + "/eps_min_ghz"), number(s["eps_max_ghz"], p + "/eps_max_ghz"),
                     integer(s["samples"], p + "/samples")};
        if (sw.samples < 1)
            fail(p + "/samples", "must be at least 1");
        if (sw.eps_min_ghz < 0 || sw.eps_max_ghz < sw.eps_min_ghz)
            fail(p, "need 0 <= eps_min_ghz <= eps_max_ghz");
        d.sweep = sw;
    }
    if (j.contains("free_classes")) {
        const auto& c = array_of(j["free_classes"], base + "/free_classes");
        for (size_t k = 0; k < c.size(); ++k)
            d.free_classes.push_back(integer(c[k], base + "/free_classes/" + std::to_string(k)));
        if (d.free_classes.size() != d.edges.size())
            fail(base + "/free_classes", "needs one entry per edge");
    }
    return d;
}

json emit_doc(const DeviceFile& d)
{
    json j = json::object();
    if (!d.name.empty())
        j["name"] = d.name;
    if (!d.stages.empty()) {
        j["stages"] = json::array();
        for (const auto& s : d.stages)
            j["stages"].push_back(emit_doc(s));
        if (d.n == 0)
            return j;
    }
    j["n"] = d.n;
    j["omega0_ghz"] = d.omega0_ghz;
    j["edges"] = json::array();
    for (const auto& e : d.edges)
        j["edges"].push_back({e.i, e.j, e.u_ghz});
    j["waveguides"] = json::array();
    for (const auto& w : d.waveguides)
        j["waveguides"].push_back({{"node", w.node}, {"gamma_ghz", w.gamma_ghz}, {"side", std::string(1, side_char(w.side))}});
    j["kappa_int_ghz"] = d.kappa_int_ghz;
    j["signs"] = d.signs;
    j["tones"] = json::array();
    for (const auto& t : d.tones)
        j["tones"].push_back({{"eps_ghz", t.eps_ghz}, {"omega_d_ghz", t.omega_d_ghz}, {"phi", t.phi}});
    if (!d.carriers_ghz.empty())
        j["input"] = {{"carriers_ghz", d.carriers_ghz}};
    if (d.sweep)
        j["sweep"] = {{"eps_min_ghz", d.sweep->eps_min_ghz}, {"eps_max_ghz", d.sweep->eps_max_ghz}, {"samples", d.sweep->samples}};
    if (!d.free_classes.empty())
        j["free_classes"] = d.free_classes;
    return j;
}

} // namespace

DeviceFile parse_device_json(const std::string& text, const std::string& source)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // locate the byte offset as line:column
        size_t line = 1, col = 1;
        for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream m;
        m << source << ":" << line << ":" << col << ": " << e.what();
        throw Error(Errc::SchemaError, m.str());
    }
    return parse_doc(j, "");
}

DeviceFile load_device_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::SchemaError, "cannot open device file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_device_json(ss.str(), path);
}

std::string dump_device_json(const DeviceFile& d, int indent) { return emit_doc(d).dump(indent) + "\n"; }

ResonatorArray to_array(const DeviceFile& d)
{
    std::vector<Coupling> c;
    for (const auto& e : d.edges)
        c.push_back({e.i, e.j, ghz_to_rad(e.u_ghz)});
    std::vector<Waveguide> w;
    for (const auto& s : d.waveguides)
        w.push_back({s.node, ghz_to_rad(s.gamma_ghz), s.side});
    return build_array(d.n, ghz_to_rad(d.omega0_ghz), std::move(c), std::move(w), ghz_to_rad(d.kappa_int_ghz));
}

ModulationSpec to_modulation(const DeviceFile& d)
{
    ModulationSpec m;
    m.signs = d.signs.empty() ? std::vector<int>(d.n, 0) : d.signs;
    for (const auto& t : d.tones)
        m.tones.push_back({ghz_to_rad(t.eps_ghz), ghz_to_rad(t.omega_d_ghz), t.phi});
    validate(m, d.n);
    return m;
}

std::vector<double> to_carriers(const DeviceFile& d)
{
    std::vector<double> c;
    for (double g : d.carriers_ghz)
        c.push_back(ghz_to_rad(g));
    return c;
}

} // namespace rbskit
