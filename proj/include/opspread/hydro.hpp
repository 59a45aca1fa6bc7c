#pragma once

#include <array>
#include <string>
#include <vector>

#include "opspread/common.hpp"
#include "opspread/lattice.hpp"

namespace opspread {

struct ModelParams {
    double epsilon = 0;
    double g = 0, h = 0, s = 0, u = 0;
    double v0 = 0, d0 = 0;
};

// g = (cos 4e - 1)/4, h = sin 4e / 4, s = sin^2 cos^2, u = sin^2, v0 = -g, d0 = v0(1 - v0)/2.
ModelParams coupling_functions(double epsilon);
// Maps epsilon into [0, pi/4] using the period pi/2 and the reflection e -> -e.
double reduce_epsilon(double epsilon);

struct XiDecay {
    cplx xi;
    double gamma;
};

// xi = (1 + g)^2 - 2 i h g, gamma = -ln|xi|.
XiDecay xi_and_decay(double epsilon);

// Partial sum of -(4h^2/q^2) Re xi^{T-1} over T = 1..t_max.
double d44_series(double epsilon, int q, int t_max);
// Geometric-series value; continuous at s = 0 where it equals -1/q^2.
double d44_series_infinite(double epsilon, int q);
// -(1/q^2)(1 + 5s - 4s^2)/(1 - s - 3s^2).
double d44_printed(double epsilon, int q);

struct NuRoutes {
    double closed;    // [4(1-2s)(1 - s(1-2s))]^{-1}
    double transfer;  // -g / (1 - <M|M>)
};

NuRoutes nu(double epsilon);

using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec5 = Eigen::Matrix<double, 5, 1>;

// Basis order (1, 4, S_{1,1b}, S_{1,2b}, S_{1,2}).
struct TransferEngine {
    double epsilon = 0;
    Mat5 U, Tminus, Tplus, T;
    Vec5 M, Mplus, Mminus;
    std::array<double, 5> eig_abs{};  // ascending |lambda| of T, computed at 50 digits

    double norm_M_coefficients() const { return M.squaredNorm(); }
};

TransferEngine build_transfer(double epsilon);
// 1 - 8s(1-2s)(1 - s(1-2s)).
double norm_M_closed(double s);

struct ChainSum {
    double value = 0;
    int terms = 0;
    bool converged = false;
};

// Sum over n of C+-(n)/(1 - C(n+1)) + C+(n)C-(n)/((1 - C(n))(1 - C(n+1))).
ChainSum f_chain_sum(double epsilon, double tol = 1e-14, int max_terms = 10000);
// (1/7) s (1-4s)^2 (1 + 6.8 s + 16.1 s^2).
double f_fit(double epsilon);

struct DecayRates {
    double chain;  // -ln |lambda_max(T)|
    double touch;  // -ln <M|M>
};

DecayRates decay_rates(double epsilon);

struct HydroPrediction {
    double epsilon = 0;
    int q = 0;
    ScramblerMode mode = ScramblerMode::FloquetFixed;
    double v0 = 0, d0 = 0;
    double delta_v_S = 0;         // printed rational form
    double delta_v_S_series = 0;  // -d44_series_infinite
    double delta_v_F = 0;
    double v_total = 0;
    double gamma = 0;
    bool include_S = true, include_F = true;
};

// Channel content by mode: floquet-fixed keeps both corrections, time-random only the
// spatial one, space-random only the Floquet one, fully-random neither.
HydroPrediction velocity_corrections(double epsilon, int q,
                                     ScramblerMode mode = ScramblerMode::FloquetFixed);

struct KykResult {
    double value = 0;            // -2h^2/q^2 <0|(1 - KYK)^{-1}|0> + c.c.
    double spectral_radius = 0;
    bool divergent = false;
    double small_eps = 0;        // -8 e^2 / (1 + 8 q^2 e^2)
};

Eigen::Matrix2cd kyk_matrix(double epsilon, int q);
KykResult kyk_resummation(double epsilon, int q);

struct HydroRow {
    double epsilon = 0;
    int q = 0;
    double g = 0, h = 0, s = 0, v0 = 0, d0 = 0;
    double xi_re = 0, xi_im = 0, gamma = 0;
    double nu = 0, f_chain = 0, f_fit = 0;
    double dv_S_printed = 0, dv_S_series = 0, dv_F = 0, v_total = 0;
};

// Evaluated at reduce_epsilon(epsilon); the epsilon column keeps the input value.
HydroRow hydro_row(double epsilon, int q);
extern const std::vector<std::string> kHydroColumns;
std::vector<double> hydro_row_values(const HydroRow& r);

}  // namespace opspread
