#pragma once

#include <cstdint>
#include <vector>

#include "opspread/common.hpp"

namespace opspread {

// Times of scrambled Z operators, Z(t) = V^t Z V^{-t}; t = 0 is the bare Z.
using TimeString = std::vector<int>;

// Deletes adjacent equal times until none remain (operator words).
TimeString linear_reduce(const TimeString& ts);
// As linear_reduce, then also strips equal first/last pairs (words under a trace).
TimeString minimal_form(const TimeString& ts);
// 1 iff the two operator products are identical for every V.
int delta_constraint(const TimeString& a, const TimeString& b);
// Number of rotations fixing the minimal form; the empty word gives 1.
int symmetry_factor(const TimeString& ts);
// Sum over global time shifts tau of [Min(a + tau) equals Min(b) up to rotation].
int shift_match_count(const TimeString& a, const TimeString& b);
// S(a)/q^2 * shift_match_count(a, b).
double two_correlator_prediction(const TimeString& a, const TimeString& b, int q);

// On-site Z used for the correlators: the traceless (for even q) involution diag((-1)^k).
CMat correlator_z(int q);
// (1/q) Tr prod_i Z(t_i).
cplx ato_eval(const CMat& V, const TimeString& ts);

struct MomentEstimate {
    cplx mean;
    double stderr = 0;
    long n_samples = 0;
    int q = 0;
};

struct CorrelatorFactor {
    TimeString times;
    bool conjugate = false;
};

// Monte Carlo estimate of the Haar average of prod_j <Z(t^j)>^(*). Samples are drawn
// in fixed blocks keyed by (seed, block), so the result is independent of `threads`.
MomentEstimate mc_moment(const std::vector<CorrelatorFactor>& factors, int q, long n_samples,
                         std::uint64_t seed, int threads = 1);

struct Decoration {
    std::vector<int> s1, s1bar, s2, s2bar;  // each of length T - 1
    int T() const { return int(s1.size()) + 1; }
};

// Gamma = Z(1)^{s_1} ... Z(T-1)^{s_{T-1}} as a time word.
TimeString gamma_word(const std::vector<int>& s);
TimeString adjoint_word(const TimeString& w);
// Z Gamma_1 Z(T) Gamma_1bar^dag Z Gamma_2 Z(T) Gamma_2bar^dag.
TimeString otoc_string(const Decoration& dec);
// Gamma_1 Gamma_2bar^dag Gamma_2 Gamma_1bar^dag.
TimeString otoc_delta_word(const Decoration& dec);

// (1/q^2)(delta[X = 1] - delta[G1 = G2bar] delta[G2 = G1bar] - delta[G1 = G1bar] delta[G2 = G2bar]).
double otoc_leading(const Decoration& dec, int q);

// Projector-insertion expansion of delta[X = 1]: entry m-1 (m = 1..T-1) is the
// term with the domain wall at layer m, the last entry is the all-minus term.
std::vector<int> otoc_delta_expansion(const Decoration& dec);

}  // namespace opspread
