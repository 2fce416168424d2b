#pragma once

#include <limits>
#include <string>
#include <utility>

namespace rbskit {

enum class PointKind { ratio_R, GCC, bs50_minus, bs50_plus, bs_R_2wg, undercoupled_peak, four_way };
PointKind parse_point_kind(const std::string& s);
const char* point_kind_name(PointKind k);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// gamma values are per normal mode (Gamma/2 for two rings, Gamma/4 for four).
struct PointParams {
    double gammaL = 0.0;
    double gammaR = 0.0;
    double kappa_int = 0.0;
    double R = 0.5;  // transfer fraction, used by ratio_R
    int branch = -1; // -1 or +1, used by ratio_R
};

struct OperatingPoint {
    PointKind kind = PointKind::GCC;
    double eps = 0.0;
    double K = kNaN;     // transmission amplitude parameter (NaN for bs_R_2wg)
    double loss = 0.0;
    double R = kNaN;     // fraction sent to the other frequency
    double I_L = kNaN, I_R = kNaN; // two-waveguide output intensities
};

// (eps_R^-, eps_R^+), both nonnegative and ordered.
std::pair<double, double> epsilon_for_ratio(double R, double gamma, double kappa_int);

// K_pm for ratio R in rate form; equals the cooperativity form with alpha = 2 gamma / kappa_int.
double transmission_K(double R, double gamma, double kappa_int, int branch);

OperatingPoint operating_point(PointKind kind, const PointParams& p);

enum class LossKind {
    gcc_2ring,
    bs_2ring_minus,
    bs_2ring_plus,
    bs_R_2ring_2wg,
    gcc_4ring,
    bs_4ring_minus,
    bs_4ring_plus,
    bs_R_4ring_2wg,
    four_way,
    undercoupled,
};
LossKind parse_loss_kind(const std::string& s);

struct LossReport {
    double loss = 0.0;
    double I_L = kNaN, I_R = kNaN;
};

// Loss in terms of cooperativities alpha = Gamma / kappa_int.
LossReport device_loss(LossKind kind, double alphaL, double alphaR = kNaN);

struct NoShifterReport {
    double eps_gcc = kNaN;      // where Xi11 = 0 on the first waveguide (NaN if unreachable)
    double xi21_at_gcc = kNaN;  // |Xi21| there; equals sqrt(gammaR / gammaL)
    double min_xi21 = kNaN;     // min |Xi21| over the grid where |Xi41| > 0.01
    bool shifter_found = false; // some eps with Xi21 = 0 and Xi41 != 0
    bool reduced_to_single_waveguide = false;
    int grid = 0;
};

NoShifterReport no_shifter_with_second_waveguide(double gammaL, double gammaR, double kappa_int,
                                                 int grid = 4000);

} // namespace rbskit
