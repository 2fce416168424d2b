#pragma once

#include "rbskit/graph.hpp"
#include "rbskit/modulation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rbskit {

// Frequencies at this boundary are in GHz (value / 2 pi); internally rad/s.
constexpr double kGHz = 2.0 * 3.14159265358979323846 * 1e9;

inline double ghz_to_rad(double ghz) { return ghz * kGHz; }
inline double rad_to_ghz(double rad) { return rad / kGHz; }

struct EdgeSpec {
    int i = 0, j = 0;
    double u_ghz = 0.0;
};

struct WaveguideSpec {
    int node = 0;
    double gamma_ghz = 0.0;
    Side side = Side::L;
};

struct ToneSpec {
    double eps_ghz = 0.0;
    double omega_d_ghz = 0.0;
    double phi = 0.0;
};

struct SweepSpec {
    double eps_min_ghz = 0.0;
    double eps_max_ghz = 0.0;
    int samples = 0;
};

// One device document. Values are kept exactly as read so a normalized dump
// re-parses to the same numbers.
struct DeviceFile {
    std::string name;
    int n = 0;
    double omega0_ghz = 0.0;
    std::vector<EdgeSpec> edges;
    std::vector<WaveguideSpec> waveguides;
    double kappa_int_ghz = 0.0;
    std::vector<int> signs;
    std::vector<ToneSpec> tones;
    std::vector<double> carriers_ghz;
    std::optional<SweepSpec> sweep;
    std::vector<int> free_classes; // per edge, for optimize; -1 fixes the edge
    std::vector<DeviceFile> stages;

    bool operator==(const DeviceFile&) const = default;
};

bool operator==(const EdgeSpec& a, const EdgeSpec& b);
bool operator==(const WaveguideSpec& a, const WaveguideSpec& b);
bool operator==(const ToneSpec& a, const ToneSpec& b);
bool operator==(const SweepSpec& a, const SweepSpec& b);

// Throws SchemaError naming the offending field (JSON pointer) or parse position.
DeviceFile parse_device_json(const std::string& text, const std::string& source = "<string>");
DeviceFile load_device_file(const std::string& path);
std::string dump_device_json(const DeviceFile& d, int indent = 2);

ResonatorArray to_array(const DeviceFile& d);
ModulationSpec to_modulation(const DeviceFile& d);
std::vector<double> to_carriers(const DeviceFile& d);

} // namespace rbskit
