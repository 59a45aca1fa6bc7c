#include "opspread/hydro.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Eigenvalues>

namespace opspread {

namespace {

using mp = boost::multiprecision::cpp_bin_float_50;

template <class S>
S reduce_generic(S e, S pi) {
    S half = pi / 2;
    e = e - half * floor(e / half);
    if (e > pi / 4) e = half - e;
    return e;
}

template <class S>
struct TransferMats {
    Eigen::Matrix<S, 5, 5> U, Tm, Tp;
    Eigen::Matrix<S, 5, 1> M, Mp, Mm;
};

template <class S>
TransferMats<S> transfer_mats(S u, S g) {
    using std::sqrt;
    using boost::multiprecision::sqrt;
    TransferMats<S> t;
    S r2 = sqrt(S(2));
    S a = (1 - u) * (1 - u), b = u * u, c = -g / r2, d = g + 1;
    S z = 0;
    t.U.setZero();
    t.U(0, 0) = a;
    t.U(1, 1) = b;
    t.U(2, 2) = -g / 2;
    t.U(3, 3) = -g / 2;
    t.U(4, 4) = g / 2;
    t.Tm << a, b, c, z, z,
            b, a, c, z, z,
            c, c, d, z, z,
            z, z, z, d, -g,
            z, z, z, -g, d;
    t.Tp << a, b, z, c, z,
            b, a, z, c, z,
            z, z, d, z, -g,
            c, c, z, d, z,
            z, z, -g, z, d;
    S u4 = b * b, w4 = a * a;
    S gg = g * (1 + g) / r2;
    t.M << u4 + w4, 2 * b * a, -gg, -gg, g * g / r2;
    S hg = g * g / 2;
    // |M+> = -g(1+g)/sqrt2 (S12 - S12b) + g^2/2 (sqrt2 S12b - 1 - 4), |M-> with 1b in place of 2b.
    t.Mp << -hg, -hg, z, gg + hg * r2, -gg;
    t.Mm << -hg, -hg, gg + hg * r2, z, -gg;
    return t;
}

double hp_pi() { return 3.14159265358979323846; }

}  // namespace

double reduce_epsilon(double epsilon) { return reduce_generic<double>(epsilon, hp_pi()); }

ModelParams coupling_functions(double epsilon) {
    ModelParams p;
    p.epsilon = epsilon;
    double c4 = std::cos(4 * epsilon);
    p.g = (c4 - 1) / 4;
    p.h = std::sin(4 * epsilon) / 4;
    double sn = std::sin(epsilon), cs = std::cos(epsilon);
    p.u = sn * sn;
    p.s = p.u * cs * cs;
    p.v0 = (1 - c4) / 4;
    p.d0 = p.v0 * (1 - p.v0) / 2;
    return p;
}

XiDecay xi_and_decay(double epsilon) {
    ModelParams p = coupling_functions(epsilon);
    XiDecay r;
    r.xi = cplx((1 + p.g) * (1 + p.g), -2 * p.h * p.g);
    r.gamma = -std::log(std::abs(r.xi));
    return r;
}

double d44_series(double epsilon, int q, int t_max) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "q must be positive");
    if (t_max < 0) throw Error(ErrorKind::OutOfRange, "t_max must be non-negative");
    ModelParams p = coupling_functions(epsilon);
    cplx xi = xi_and_decay(epsilon).xi;
    double pref = -4 * p.h * p.h / (double(q) * q);
    cplx pw = 1.0;
    double sum = 0;
    for (int T = 1; T <= t_max; ++T) {
        sum += pref * pw.real();
        pw *= xi;
    }
    return sum;
}

double d44_series_infinite(double epsilon, int q) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "q must be positive");
    ModelParams p = coupling_functions(reduce_epsilon(epsilon));
    if (p.s > 0 && std::abs(xi_and_decay(epsilon).xi) >= 1.0)
        throw Error(ErrorKind::DivergentSeries, "|xi| >= 1");
    // -(4h^2) Re 1/(1 - xi) with the common factor g cancelled.
    double a = 2 + p.g;
    double val = -2 * (1 + 2 * p.g) * a / (a * a + 4 * p.h * p.h);
    return val / (double(q) * q);
}

double d44_printed(double epsilon, int q) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "q must be positive");
    double s = coupling_functions(reduce_epsilon(epsilon)).s;
    double den = 1 - s - 3 * s * s;
    if (den == 0) throw Error(ErrorKind::SingularResolvent, "pole of the rational form");
    return -(1 + 5 * s - 4 * s * s) / den / (double(q) * q);
}

double norm_M_closed(double s) {
    double t = s * (1 - 2 * s);
    return 1 - 8 * t * (1 - t);
}

NuRoutes nu(double epsilon) {
    ModelParams p = coupling_functions(reduce_epsilon(epsilon));
    double s = p.s;
    NuRoutes r;
    r.closed = 1.0 / (4 * (1 - 2 * s) * (1 - s * (1 - 2 * s)));
    if (s == 0) {
        r.transfer = r.closed;
    } else {
        double mm = build_transfer(epsilon).norm_M_coefficients();
        r.transfer = -p.g / (1 - mm);
    }
    return r;
}

TransferEngine build_transfer(double epsilon) {
    mp pi = boost::math::constants::pi<mp>();
    mp e = reduce_generic<mp>(mp(epsilon), pi);
    mp sn = sin(e);
    mp u = sn * sn;
    mp g = (cos(4 * e) - 1) / 4;
    TransferMats<mp> hp = transfer_mats<mp>(u, g);
    Eigen::Matrix<mp, 5, 5> Thp = hp.Tm * hp.U * hp.Tp;

    TransferEngine te;
    te.epsilon = epsilon;
    te.U = hp.U.cast<double>();
    te.Tminus = hp.Tm.cast<double>();
    te.Tplus = hp.Tp.cast<double>();
    te.T = Thp.cast<double>();
    te.M = hp.M.cast<double>();
    te.Mplus = hp.Mp.cast<double>();
    te.Mminus = hp.Mm.cast<double>();

    Eigen::EigenSolver<Eigen::Matrix<mp, 5, 5>> es(Thp, false);
    for (int i = 0; i < 5; ++i) te.eig_abs[i] = double(abs(es.eigenvalues()(i)));
    std::sort(te.eig_abs.begin(), te.eig_abs.end());
    return te;
}

ChainSum f_chain_sum(double epsilon, double tol, int max_terms) {
    if (!(tol > 0)) throw Error(ErrorKind::OutOfRange, "tol must be positive");
    TransferEngine te = build_transfer(epsilon);
    ChainSum out;
    if (te.eig_abs[4] >= 1.0) {
        out.converged = false;
        return out;
    }
    Vec5 x = te.M, y = te.Mminus;
    double C_n = te.M.dot(x);
    int quiet = 0;
    for (int n = 0; n < max_terms; ++n) {
        double Cp = te.Mplus.dot(x);
        double Cm = te.M.dot(y);
        double Cpm = te.Mplus.dot(y);
        Vec5 xn = te.T * x;
        double C_next = te.M.dot(xn);
        double term = Cpm / (1 - C_next) + Cp * Cm / ((1 - C_n) * (1 - C_next));
        out.value += term;
        out.terms = n + 1;
        quiet = (std::abs(term) < tol * std::abs(out.value) || term == 0) ? quiet + 1 : 0;
        if (quiet >= 3) {
            out.converged = true;
            return out;
        }
        x = xn;
        y = te.T * y;
        C_n = C_next;
    }
    return out;
}

double f_fit(double epsilon) {
    double s = coupling_functions(reduce_epsilon(epsilon)).s;
    double w = 1 - 4 * s;
    return s * w * w * (1 + 6.8 * s + 16.1 * s * s) / 7;
}

DecayRates decay_rates(double epsilon) {
    TransferEngine te = build_transfer(epsilon);
    return {-std::log(te.eig_abs[4]), -std::log(te.norm_M_coefficients())};
}

HydroPrediction velocity_corrections(double epsilon, int q, ScramblerMode mode) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "q must be positive");
    double e = reduce_epsilon(epsilon);
    ModelParams p = coupling_functions(e);
    HydroPrediction hp;
    hp.epsilon = epsilon;
    hp.q = q;
    hp.mode = mode;
    hp.v0 = p.v0;
    hp.d0 = p.d0;
    hp.delta_v_S = -d44_printed(e, q);
    hp.delta_v_S_series = -d44_series_infinite(e, q);
    double f = p.s > 0 ? f_chain_sum(e).value : 0.0;
    hp.delta_v_F = 2 * p.g * p.g / (double(q) * q) * (nu(e).closed - f);
    hp.gamma = xi_and_decay(e).gamma;
    hp.include_S = mode == ScramblerMode::FloquetFixed || mode == ScramblerMode::TimeRandom;
    hp.include_F = mode == ScramblerMode::FloquetFixed || mode == ScramblerMode::SpaceRandom;
    hp.v_total = hp.v0 + (hp.include_F ? hp.delta_v_F : 0.0) + (hp.include_S ? hp.delta_v_S : 0.0);
    return hp;
}

Eigen::Matrix2cd kyk_matrix(double epsilon, int q) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "q must be positive");
    ModelParams p = coupling_functions(epsilon);
    cplx xi = xi_and_decay(epsilon).xi;
    Eigen::Matrix2cd ones, flip, sz;
    ones << 1, 1, 1, 1;
    flip << 1, -1, -1, 1;
    sz << 1, 0, 0, -1;
    return xi / 2.0 * ones + (1 + p.g) / 2.0 * flip + cplx(1 + p.g, p.h) / double(q) * sz;
}

KykResult kyk_resummation(double epsilon, int q) {
    ModelParams p = coupling_functions(epsilon);
    Eigen::Matrix2cd K = kyk_matrix(epsilon, q);
    KykResult r;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(K, false);
    r.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    r.divergent = r.spectral_radius >= 1.0;
    // Wiring |0> = |+> - |->/q in the (S, A) basis.
    Eigen::Vector2cd zero(1 - 1.0 / q, 1 + 1.0 / q);
    zero /= std::sqrt(2.0);
    Eigen::Matrix2cd R = (Eigen::Matrix2cd::Identity() - K).inverse();
    cplx amp = zero.dot(R * zero) / (double(q) * q);
    r.value = -4 * p.h * p.h * amp.real();
    double e2 = epsilon * epsilon;
    r.small_eps = -8 * e2 / (1 + 8.0 * q * q * e2);
    return r;
}

const std::vector<std::string> kHydroColumns = {
    "epsilon", "q", "g", "h", "s", "v0", "d0", "xi_re", "xi_im", "gamma", "nu",
    "f_chain", "f_fit", "dv_S_printed", "dv_S_series", "dv_F", "v_total"};

HydroRow hydro_row(double epsilon, int q) {
    HydroRow r;
    r.epsilon = epsilon;
    epsilon = reduce_epsilon(epsilon);
    ModelParams p = coupling_functions(epsilon);
    XiDecay xd = xi_and_decay(epsilon);
    HydroPrediction hp = velocity_corrections(epsilon, q);
    r.q = q;
    r.g = p.g;
    r.h = p.h;
    r.s = p.s;
    r.v0 = p.v0;
    r.d0 = p.d0;
    r.xi_re = xd.xi.real();
    r.xi_im = xd.xi.imag();
    r.gamma = xd.gamma;
    r.nu = nu(epsilon).closed;
    r.f_chain = p.s > 0 ? f_chain_sum(epsilon).value : 0.0;
    r.f_fit = f_fit(epsilon);
    r.dv_S_printed = hp.delta_v_S;
    r.dv_S_series = hp.delta_v_S_series;
    r.dv_F = hp.delta_v_F;
    r.v_total = hp.v_total;
    return r;
}

std::vector<double> hydro_row_values(const HydroRow& r) {
    return {r.epsilon, double(r.q), r.g, r.h, r.s, r.v0, r.d0, r.xi_re, r.xi_im, r.gamma,
            r.nu, r.f_chain, r.f_fit, r.dv_S_printed, r.dv_S_series, r.dv_F, r.v_total};
}

}  // namespace opspread
