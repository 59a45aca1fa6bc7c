#include "opspread/replica.hpp"

#include <array>
#include <cmath>

namespace opspread {

namespace {

// Per-site replica state: parities (pa, pb) of the two ket indices, encoded 2*pa + pb.
inline int pa_of(int s) { return s >> 1; }
inline int pb_of(int s) { return s & 1; }
inline double zval(int parity) { return parity ? -1.0 : 1.0; }

}  // namespace

ReplicaAverage::ReplicaAverage(const LatticeSpec& spec, double epsilon)
    : spec_(spec), epsilon_(epsilon) {
    if (spec.q < 2 || spec.N < 2) throw Error(ErrorKind::InvalidDimension, "q, N must be >= 2");
    if (spec.N > 12) throw Error(ErrorKind::BudgetExceeded, "replica kernel limited to N <= 12");
    const int N = spec.N;
    const int q = spec.q;
    const std::array<double, 2> mult{double((q + 1) / 2), double(q / 2)};
    const int nconf = 1 << N;
    K_.resize(nconf, nconf);

    auto bit = [](int mask, int j) { return (mask >> j) & 1; };
    for (int tau = 0; tau < nconf; ++tau) {
        // Bond phase exp(i eps [za za' + zb zb' - zat zat' - zbt zbt']) between
        // site j (state s) and site j' (state s2), where zat is the parity after the
        // tau-swap on that site.
        auto bond = [&](int j, int s, int j2, int s2) {
            int a1 = pa_of(s), b1 = pb_of(s), a2 = pa_of(s2), b2 = pb_of(s2);
            int at1 = bit(tau, j) ? b1 : a1, bt1 = bit(tau, j) ? a1 : b1;
            int at2 = bit(tau, j2) ? b2 : a2, bt2 = bit(tau, j2) ? a2 : b2;
            double e = zval(a1) * zval(a2) + zval(b1) * zval(b2) - zval(at1) * zval(at2) -
                       zval(bt1) * zval(bt2);
            return std::polar(1.0, epsilon_ * e);
        };
        for (int sigma = 0; sigma < nconf; ++sigma) {
            const int tied = tau ^ sigma;
            auto weight = [&](int j, int s) {
                int a = pa_of(s), b = pb_of(s);
                if (bit(tied, j)) return a == b ? mult[a] : 0.0;
                return mult[a] * mult[b];
            };
            cplx total = 0;
            const int starts = spec.boundary == Boundary::Periodic ? 4 : 1;
            for (int s0 = 0; s0 < starts; ++s0) {
                std::array<cplx, 4> v{};
                for (int s = 0; s < 4; ++s) {
                    if (starts == 4 && s != s0) continue;
                    v[s] = weight(0, s);
                }
                for (int j = 1; j < N; ++j) {
                    std::array<cplx, 4> w{};
                    for (int s2 = 0; s2 < 4; ++s2) {
                        double wt = weight(j, s2);
                        if (wt == 0) continue;
                        cplx acc = 0;
                        for (int s = 0; s < 4; ++s)
                            if (v[s] != cplx(0)) acc += v[s] * bond(j - 1, s, j, s2);
                        w[s2] = acc * wt;
                    }
                    v = w;
                }
                if (starts == 4) {
                    for (int s = 0; s < 4; ++s) total += v[s] * bond(N - 1, s, 0, s0);
                } else {
                    for (int s = 0; s < 4; ++s) total += v[s];
                }
            }
            K_(tau, sigma) = total.real();
        }
    }
}

void ReplicaAverage::apply_gram(RVec& v) const {
    const double q = spec_.q;
    for (int j = 0; j < spec_.N; ++j) {
        const int b = 1 << j;
        for (int m = 0; m < v.size(); ++m) {
            if (m & b) continue;
            double u = v(m), w = v(m | b);
            v(m) = q * q * u + q * w;
            v(m | b) = q * u + q * q * w;
        }
    }
}

void ReplicaAverage::apply_gram_inverse(RVec& v) const {
    const double q = spec_.q;
    const double den = q * q - 1.0;
    for (int j = 0; j < spec_.N; ++j) {
        const int b = 1 << j;
        for (int m = 0; m < v.size(); ++m) {
            if (m & b) continue;
            double u = v(m), w = v(m | b);
            v(m) = (u - w / q) / den;
            v(m | b) = (w - u / q) / den;
        }
    }
}

std::vector<std::vector<double>> ReplicaAverage::right_density(int t_max) const {
    const int N = spec_.N;
    const double q = spec_.q;
    const int nconf = 1 << N;
    // Pauli-averaged initial state: (q SWAP - 1)/(q^2 - 1) on site 0, identity elsewhere.
    RVec c = RVec::Zero(nconf);
    c(1) = q / (q * q - 1.0);
    c(0) = -1.0 / (q * q - 1.0);
    RVec m = c;
    apply_gram(m);

    const double dH = std::pow(q, N);
    std::vector<std::vector<double>> rho;
    auto record = [&]() {
        std::vector<double> r(N);
        double prev = 0;
        for (int x = 0; x < N; ++x) {
            int tau = (1 << (x + 1)) - 1;
            double R = m(tau) / (dH * std::pow(q, N - 1 - x));
            r[x] = R - prev;
            prev = R;
        }
        rho.push_back(std::move(r));
    };
    record();
    for (int t = 0; t < t_max; ++t) {
        RVec coeff = m;
        apply_gram_inverse(coeff);
        m = K_ * coeff;
        record();
    }
    return rho;
}

ProfileSeries fully_random_exact(const LatticeSpec& spec, double epsilon, int t_max) {
    ReplicaAverage avg(spec, epsilon);
    RealizationFn fn = [&](std::uint64_t) { return avg.right_density(t_max); };
    return average_realizations(spec.N, t_max, 1, 1, fn);
}

}  // namespace opspread
