#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "opspread/common.hpp"
#include "opspread/rng.hpp"

namespace opspread {

enum class Boundary { Open, Periodic };

// Default guard on dense q^N x q^N allocations (complex entries).
inline constexpr std::uint64_t kDefaultDenseBudget = std::uint64_t(1) << 27;

struct LatticeSpec {
    int q = 2;
    int N = 2;
    Boundary boundary = Boundary::Open;

    std::uint64_t dim() const { return ipow(q, N); }
    // Sites are 0..N-1; site 0 is the most significant tensor factor.
    std::uint64_t d_gt(int x) const { return ipow(q, N - 1 - x); }
    std::uint64_t d_le(int x) const { return ipow(q, x + 1); }
    std::uint64_t d_lt(int x) const { return ipow(q, x); }
    // Throws invalid-dimension or budget-exceeded.
    void validate(std::uint64_t budget_entries = kDefaultDenseBudget) const;
};

enum class ScramblerMode { FloquetFixed, TimeRandom, SpaceRandom, FullyRandom };

std::string to_string(ScramblerMode m);
ScramblerMode parse_scrambler_mode(const std::string& s);
std::string to_string(Boundary b);
Boundary parse_boundary(const std::string& s);

struct ScramblerPlan {
    ScramblerMode mode = ScramblerMode::FloquetFixed;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
};

struct ClockShift {
    CMat X;
    CMat Z;
};

ClockShift build_clock_shift(int q);

// Non-identity generalized Paulis X^a Z^b, ordered by (a, b); q^2 - 1 of them.
std::vector<CMat> generalized_paulis(int q);

// Diagonal of the on-site involution entering the coupling gates: (-1)^k.
RVec coupling_diagonal(int q);

CMat sample_haar_unitary(int q, Rng& rng);

// Scramblers for one circuit realization, drawn lazily layer by layer.
class ScramblerSource {
public:
    ScramblerSource(const LatticeSpec& spec, const ScramblerPlan& plan, std::uint64_t realization);
    // Same V on every site and layer.
    static ScramblerSource fixed(const LatticeSpec& spec, const CMat& V);

    // Per-site scramblers for layer t (t counts from 0). Layers must not be skipped
    // for reproducibility; earlier layers are cached.
    const std::vector<CMat>& layer(int t);
    ScramblerMode mode() const { return mode_; }

private:
    ScramblerSource() = default;
    LatticeSpec spec_;
    ScramblerMode mode_ = ScramblerMode::FloquetFixed;
    Rng rng_;
    std::vector<std::vector<CMat>> layers_;
    std::vector<CMat> shared_;
};

struct HeisenbergState {
    CMat op;
    int time = 0;
    LatticeSpec spec;
    // Sites outside [lo, hi] carry the identity; used to skip trivial work.
    int lo = 0;
    int hi = 0;

    double hs_norm2() const { return op.squaredNorm(); }
};

HeisenbergState make_state(const LatticeSpec& spec, const CMat& op);
HeisenbergState make_local_state(const LatticeSpec& spec, const CMat& site_op, int site);

// theta(a) = sum over bonds of z(a_j) z(a_{j+1}); the coupling layer is exp(-i eps theta).
RVec coupling_energies(const LatticeSpec& spec);
CVec coupling_phases(const LatticeSpec& spec, double epsilon);

// O <- (A at site) O and O <- O (B at site).
void apply_site_left(CMat& op, const LatticeSpec& spec, int site, const CMat& A);
void apply_site_right(CMat& op, const LatticeSpec& spec, int site, const CMat& B);

class FloquetCircuit {
public:
    FloquetCircuit(const LatticeSpec& spec, const ScramblerPlan& plan, std::uint64_t realization);
    FloquetCircuit(const LatticeSpec& spec, double epsilon, ScramblerSource source);

    // O <- U^dag O U with U = (prod_x V_x) C for the layer at state.time.
    void step(HeisenbergState& state);
    // Dense single-step unitary for layer t (small chains only).
    CMat unitary(int t);
    const LatticeSpec& spec() const { return spec_; }

private:
    LatticeSpec spec_;
    double epsilon_;
    ScramblerSource source_;
    CVec phases_;
};

void apply_floquet_step(HeisenbergState& state, FloquetCircuit& circuit);
// O <- U^dag O U for an arbitrary dense unitary.
void apply_unitary_step(HeisenbergState& state, const CMat& U);

struct RightWeightProfile {
    std::vector<double> R;
    std::vector<double> rho;
    int time = 0;
};

double right_weight(const HeisenbergState& state, int x);
RightWeightProfile right_density_profile(const HeisenbergState& state);
// Left density in mirrored coordinates: entry j refers to site N-1-j, so a
// front leaving site N-1 moves towards larger j.
RightWeightProfile left_density_profile(const HeisenbergState& state);
// Integrated right weight by expanding in generalized Pauli strings; tiny sizes only.
double right_weight_by_expansion(const HeisenbergState& state, int x);
// Largest violation of the profile invariants (monotone R, R(N-1)=1, sum rho=1, rho>=0).
double profile_violation(const RightWeightProfile& p);

enum class InitialOperatorPolicy { RightFront, LeftFront };

struct ProfileSeries {
    int N = 0;
    int t_max = 0;
    int n_samples = 0;
    std::vector<RightWeightProfile> mean;         // t = 0..t_max
    std::vector<std::vector<double>> rho_stderr;  // [t][x]
    std::vector<std::vector<double>> first_moment;   // [realization][t], sum x rho
    std::vector<std::vector<double>> second_moment;  // [realization][t], sum x^2 rho
};

using RealizationFn = std::function<std::vector<std::vector<double>>(std::uint64_t)>;

// Runs fn(r) for r < n_samples on up to `threads` workers; fn returns rho[t][x].
// Merging is in realization order, so the result does not depend on `threads`.
ProfileSeries average_realizations(int N, int t_max, int n_samples, int threads,
                                   const RealizationFn& fn);

ProfileSeries averaged_profile(const LatticeSpec& spec, const ScramblerPlan& plan,
                               InitialOperatorPolicy policy, int t_max, int n_samples,
                               int threads = 1);

struct FitWindowPolicy {
    double margin = 2.0;
    int t_min = 0;
    int t_max = -1;  // -1: up to the last profile
};

struct FrontFit {
    double v = 0, D = 0;
    double stderr_v = 0, stderr_D = 0;
    int window_lo = 0, window_hi = 0;
    int points = 0;
};

FrontFit fit_front(const ProfileSeries& series, const FitWindowPolicy& policy = {});

// q = 2 chain H = -J sum Y_i Z_{i+1} - h sum X_i (open), stepped by exp(-i dt H).
CMat trotter_hamiltonian(int N, double J, double h);
ProfileSeries trotter_profiles(int N, double J, double h, double dt, int t_max,
                               InitialOperatorPolicy policy);

}  // namespace opspread
