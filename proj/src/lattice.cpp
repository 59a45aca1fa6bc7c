#include "opspread/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

namespace opspread {

void LatticeSpec::validate(std::uint64_t budget_entries) const {
    if (q < 2) throw Error(ErrorKind::InvalidDimension, "q must be >= 2");
    if (N < 2) throw Error(ErrorKind::InvalidDimension, "N must be >= 2");
    std::uint64_t d = ipow(q, N);
    if (d > (std::uint64_t(1) << 31) || d * d > budget_entries)
        throw Error(ErrorKind::BudgetExceeded,
                    "q^(2N) = " + std::to_string(d) + "^2 exceeds dense budget " +
                        std::to_string(budget_entries));
}

std::string to_string(ScramblerMode m) {
    switch (m) {
        case ScramblerMode::FloquetFixed: return "floquet-fixed";
        case ScramblerMode::TimeRandom: return "time-random";
        case ScramblerMode::SpaceRandom: return "space-random";
        case ScramblerMode::FullyRandom: return "fully-random";
    }
    return "?";
}

ScramblerMode parse_scrambler_mode(const std::string& s) {
    if (s == "floquet-fixed") return ScramblerMode::FloquetFixed;
    if (s == "time-random") return ScramblerMode::TimeRandom;
    if (s == "space-random") return ScramblerMode::SpaceRandom;
    if (s == "fully-random") return ScramblerMode::FullyRandom;
    throw Error(ErrorKind::InvalidConfig, "unknown scrambler mode '" + s + "'");
}

std::string to_string(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

Boundary parse_boundary(const std::string& s) {
    if (s == "open") return Boundary::Open;
    if (s == "periodic") return Boundary::Periodic;
    throw Error(ErrorKind::InvalidConfig, "unknown boundary '" + s + "'");
}

ClockShift build_clock_shift(int q) {
    if (q < 2) throw Error(ErrorKind::InvalidDimension, "q must be >= 2");
    ClockShift cs;
    cs.X = CMat::Zero(q, q);
    cs.Z = CMat::Zero(q, q);
    for (int k = 0; k < q; ++k) {
        cs.X((k + 1) % q, k) = 1.0;
        cs.Z(k, k) = std::polar(1.0, 2.0 * kPi * k / q);
    }
    return cs;
}

std::vector<CMat> generalized_paulis(int q) {
    auto cs = build_clock_shift(q);
    std::vector<CMat> out;
    CMat Xa = CMat::Identity(q, q);
    for (int a = 0; a < q; ++a) {
        CMat P = Xa;
        for (int b = 0; b < q; ++b) {
            if (a != 0 || b != 0) out.push_back(P);
            P = P * cs.Z;
        }
        Xa = cs.X * Xa;
    }
    return out;
}

RVec coupling_diagonal(int q) {
    RVec z(q);
    for (int k = 0; k < q; ++k) z(k) = (k % 2 == 0) ? 1.0 : -1.0;
    return z;
}

CMat sample_haar_unitary(int q, Rng& rng) {
    if (q < 1) throw Error(ErrorKind::InvalidDimension, "unitary dimension must be >= 1");
    CMat G(q, q);
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < q; ++i) G(i, j) = complex_gaussian(rng);
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ() * CMat::Identity(q, q);
    const CMat& R = qr.matrixQR();
    for (int j = 0; j < q; ++j) {
        cplx r = R(j, j);
        double a = std::abs(r);
        Q.col(j) *= (a > 0) ? r / a : cplx(1.0);
    }
    return Q;
}

ScramblerSource::ScramblerSource(const LatticeSpec& spec, const ScramblerPlan& plan,
                                 std::uint64_t realization)
    : spec_(spec), mode_(plan.mode), rng_(substream(plan.seed, realization)) {
    if (mode_ == ScramblerMode::FloquetFixed) {
        shared_.push_back(sample_haar_unitary(spec.q, rng_));
    } else if (mode_ == ScramblerMode::SpaceRandom) {
        for (int x = 0; x < spec.N; ++x) shared_.push_back(sample_haar_unitary(spec.q, rng_));
    }
}

ScramblerSource ScramblerSource::fixed(const LatticeSpec& spec, const CMat& V) {
    if (V.rows() != spec.q || V.cols() != spec.q)
        throw Error(ErrorKind::DimensionMismatch, "scrambler is not q x q");
    ScramblerSource s;
    s.spec_ = spec;
    s.mode_ = ScramblerMode::FloquetFixed;
    s.shared_.push_back(V);
    return s;
}

const std::vector<CMat>& ScramblerSource::layer(int t) {
    while (int(layers_.size()) <= t) {
        std::vector<CMat> L;
        switch (mode_) {
            case ScramblerMode::FloquetFixed:
                L.assign(spec_.N, shared_[0]);
                break;
            case ScramblerMode::TimeRandom:
                L.assign(spec_.N, sample_haar_unitary(spec_.q, rng_));
                break;
            case ScramblerMode::SpaceRandom:
                L = shared_;
                break;
            case ScramblerMode::FullyRandom:
                for (int x = 0; x < spec_.N; ++x) L.push_back(sample_haar_unitary(spec_.q, rng_));
                break;
        }
        layers_.push_back(std::move(L));
    }
    return layers_[t];
}

HeisenbergState make_state(const LatticeSpec& spec, const CMat& op) {
    spec.validate();
    auto d = Eigen::Index(spec.dim());
    if (op.rows() != d || op.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "operator is not d_H x d_H");
    return HeisenbergState{op, 0, spec, 0, spec.N - 1};
}

HeisenbergState make_local_state(const LatticeSpec& spec, const CMat& site_op, int site) {
    spec.validate();
    if (site < 0 || site >= spec.N) throw Error(ErrorKind::OutOfRange, "site out of range");
    if (site_op.rows() != spec.q || site_op.cols() != spec.q)
        throw Error(ErrorKind::DimensionMismatch, "site operator is not q x q");
    auto d = Eigen::Index(spec.dim());
    CMat op = CMat::Identity(d, d);
    apply_site_left(op, spec, site, site_op);
    return HeisenbergState{std::move(op), 0, spec, site, site};
}

RVec coupling_energies(const LatticeSpec& spec) {
    const int q = spec.q, N = spec.N;
    RVec zdiag = coupling_diagonal(q);
    auto d = Eigen::Index(spec.dim());
    RVec theta(d);
    std::vector<int> digits(N);
    for (Eigen::Index a = 0; a < d; ++a) {
        Eigen::Index r = a;
        for (int j = N - 1; j >= 0; --j) {
            digits[j] = int(r % q);
            r /= q;
        }
        double e = 0;
        for (int j = 0; j + 1 < N; ++j) e += zdiag(digits[j]) * zdiag(digits[j + 1]);
        if (spec.boundary == Boundary::Periodic) e += zdiag(digits[N - 1]) * zdiag(digits[0]);
        theta(a) = e;
    }
    return theta;
}

CVec coupling_phases(const LatticeSpec& spec, double epsilon) {
    RVec theta = coupling_energies(spec);
    CVec ph(theta.size());
    for (Eigen::Index a = 0; a < theta.size(); ++a) ph(a) = std::polar(1.0, -epsilon * theta(a));
    return ph;
}

namespace {

// v_k <- sum_l M(k, l) v_l for the q vectors v_k = base[k * stride + i], i < len.
template <int Q>
void mix_fixed(cplx* base, Eigen::Index stride, Eigen::Index len, const CMat& M) {
    cplx m[Q][Q];
    for (int k = 0; k < Q; ++k)
        for (int l = 0; l < Q; ++l) m[k][l] = M(k, l);
    for (Eigen::Index i = 0; i < len; ++i) {
        cplx in[Q];
        for (int l = 0; l < Q; ++l) in[l] = base[l * stride + i];
        for (int k = 0; k < Q; ++k) {
            cplx acc = m[k][0] * in[0];
            for (int l = 1; l < Q; ++l) acc += m[k][l] * in[l];
            base[k * stride + i] = acc;
        }
    }
}

void mix_dynamic(cplx* base, Eigen::Index stride, Eigen::Index len, const CMat& M) {
    const int q = int(M.rows());
    std::vector<cplx> in(q);
    for (Eigen::Index i = 0; i < len; ++i) {
        for (int l = 0; l < q; ++l) in[l] = base[l * stride + i];
        for (int k = 0; k < q; ++k) {
            cplx acc = 0;
            for (int l = 0; l < q; ++l) acc += M(k, l) * in[l];
            base[k * stride + i] = acc;
        }
    }
}

void mix(cplx* base, Eigen::Index stride, Eigen::Index len, const CMat& M) {
    switch (M.rows()) {
        case 2: mix_fixed<2>(base, stride, len, M); break;
        case 3: mix_fixed<3>(base, stride, len, M); break;
        case 4: mix_fixed<4>(base, stride, len, M); break;
        default: mix_dynamic(base, stride, len, M); break;
    }
}

void check_site(const CMat& op, const LatticeSpec& spec, int site, const CMat& A) {
    if (site < 0 || site >= spec.N) throw Error(ErrorKind::OutOfRange, "site out of range");
    if (A.rows() != spec.q || A.cols() != spec.q)
        throw Error(ErrorKind::DimensionMismatch, "site matrix is not q x q");
    if (std::uint64_t(op.rows()) != spec.dim() || op.rows() != op.cols())
        throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from spec");
}

}  // namespace

void apply_site_left(CMat& op, const LatticeSpec& spec, int site, const CMat& A) {
    check_site(op, spec, site, A);
    const Eigen::Index d = op.rows();
    const Eigen::Index s = Eigen::Index(ipow(spec.q, spec.N - 1 - site));
    const Eigen::Index block = s * spec.q;
    for (Eigen::Index c = 0; c < op.cols(); ++c) {
        cplx* col = op.data() + c * d;
        for (Eigen::Index hb = 0; hb < d; hb += block) mix(col + hb, s, s, A);
    }
}

void apply_site_right(CMat& op, const LatticeSpec& spec, int site, const CMat& B) {
    check_site(op, spec, site, B);
    const Eigen::Index d = op.rows();
    const Eigen::Index s = Eigen::Index(ipow(spec.q, spec.N - 1 - site));
    const Eigen::Index block = s * spec.q;
    const CMat Bt = B.transpose();
    // Columns hb + k s + lo for fixed k form a contiguous run of s*d entries.
    for (Eigen::Index hb = 0; hb < op.cols(); hb += block) mix(op.data() + hb * d, s * d, s * d, Bt);
}

FloquetCircuit::FloquetCircuit(const LatticeSpec& spec, const ScramblerPlan& plan,
                               std::uint64_t realization)
    : spec_(spec), epsilon_(plan.epsilon), source_(spec, plan, realization),
      phases_(coupling_phases(spec, plan.epsilon)) {}

FloquetCircuit::FloquetCircuit(const LatticeSpec& spec, double epsilon, ScramblerSource source)
    : spec_(spec), epsilon_(epsilon), source_(std::move(source)),
      phases_(coupling_phases(spec, epsilon)) {}

namespace {

void conjugate_phases(CMat& op, const CVec& ph) {
    const Eigen::Index d = op.rows();
    for (Eigen::Index b = 0; b < d; ++b) {
        cplx pb = ph(b);
        cplx* col = op.data() + b * d;
        for (Eigen::Index a = 0; a < d; ++a) col[a] *= std::conj(ph(a)) * pb;
    }
}

}  // namespace

void FloquetCircuit::step(HeisenbergState& state) {
    if (state.spec.q != spec_.q || state.spec.N != spec_.N)
        throw Error(ErrorKind::DimensionMismatch, "state and circuit specs differ");
    const auto& L = source_.layer(state.time);
    for (int x = state.lo; x <= state.hi; ++x) {
        apply_site_left(state.op, spec_, x, L[x].adjoint());
        apply_site_right(state.op, spec_, x, L[x]);
    }
    conjugate_phases(state.op, phases_);
    if (spec_.boundary == Boundary::Periodic) {
        state.lo = 0;
        state.hi = spec_.N - 1;
    } else {
        state.lo = std::max(0, state.lo - 1);
        state.hi = std::min(spec_.N - 1, state.hi + 1);
    }
    ++state.time;
}

CMat FloquetCircuit::unitary(int t) {
    const auto& L = source_.layer(t);
    auto d = Eigen::Index(spec_.dim());
    CMat U = CMat::Identity(d, d);
    for (int x = 0; x < spec_.N; ++x) apply_site_left(U, spec_, x, L[x]);
    return U * phases_.asDiagonal();
}

void apply_floquet_step(HeisenbergState& state, FloquetCircuit& circuit) { circuit.step(state); }

void apply_unitary_step(HeisenbergState& state, const CMat& U) {
    if (U.rows() != state.op.rows() || U.cols() != state.op.cols())
        throw Error(ErrorKind::DimensionMismatch, "unitary dimension differs from state");
    CMat tmp = state.op * U;
    state.op.noalias() = U.adjoint() * tmp;
    state.lo = 0;
    state.hi = state.spec.N - 1;
    ++state.time;
}

namespace {

// Squared HS norms of Tr_{>x} O for x = N-1 down to 0.
std::vector<double> right_trace_norms(const CMat& op, int q, int N) {
    std::vector<double> out(N);
    CMat P = op;
    for (int x = N - 1; x >= 0; --x) {
        out[x] = P.squaredNorm();
        if (x == 0) break;
        Eigen::Index D = P.rows() / q;
        CMat next = CMat::Zero(D, D);
        for (Eigen::Index j = 0; j < D; ++j)
            for (Eigen::Index i = 0; i < D; ++i) {
                cplx acc = 0;
                for (int k = 0; k < q; ++k) acc += P(i * q + k, j * q + k);
                next(i, j) = acc;
            }
        P = std::move(next);
    }
    return out;
}

// Squared HS norms of Tr_{<x} O for x = 0..N-1.
std::vector<double> left_trace_norms(const CMat& op, int q, int N) {
    std::vector<double> out(N);
    CMat P = op;
    for (int x = 0; x < N; ++x) {
        out[x] = P.squaredNorm();
        if (x == N - 1) break;
        Eigen::Index D = P.rows() / q;
        CMat next = CMat::Zero(D, D);
        for (int k = 0; k < q; ++k) next += P.block(k * D, k * D, D, D);
        P = std::move(next);
    }
    return out;
}

RightWeightProfile from_integrated(std::vector<double> R, int time) {
    RightWeightProfile p;
    p.rho.resize(R.size());
    double prev = 0;
    for (size_t x = 0; x < R.size(); ++x) {
        p.rho[x] = R[x] - prev;
        prev = R[x];
    }
    p.R = std::move(R);
    p.time = time;
    return p;
}

RightWeightProfile right_profile_raw(const CMat& op, int q, int N, int time) {
    auto norms = right_trace_norms(op, q, N);
    double dH = double(ipow(q, N));
    std::vector<double> R(N);
    for (int x = 0; x < N; ++x) R[x] = norms[x] / (dH * double(ipow(q, N - 1 - x)));
    return from_integrated(std::move(R), time);
}

RightWeightProfile left_profile_raw(const CMat& op, int q, int N, int time) {
    auto norms = left_trace_norms(op, q, N);
    double dH = double(ipow(q, N));
    std::vector<double> R(N);
    for (int x = 0; x < N; ++x) R[N - 1 - x] = norms[x] / (dH * double(ipow(q, x)));
    return from_integrated(std::move(R), time);
}

}  // namespace

double right_weight(const HeisenbergState& state, int x) {
    if (x < 0 || x >= state.spec.N) throw Error(ErrorKind::OutOfRange, "site out of range");
    return right_density_profile(state).R[x];
}

RightWeightProfile right_density_profile(const HeisenbergState& state) {
    return right_profile_raw(state.op, state.spec.q, state.spec.N, state.time);
}

RightWeightProfile left_density_profile(const HeisenbergState& state) {
    return left_profile_raw(state.op, state.spec.q, state.spec.N, state.time);
}

double right_weight_by_expansion(const HeisenbergState& state, int x) {
    const int q = state.spec.q, N = state.spec.N;
    if (x < 0 || x >= N) throw Error(ErrorKind::OutOfRange, "site out of range");
    std::vector<CMat> basis;
    basis.push_back(CMat::Identity(q, q));
    for (auto& P : generalized_paulis(q)) basis.push_back(P);
    const int nb = q * q;
    const std::uint64_t nstrings = ipow(nb, N);
    const double dH = double(state.spec.dim());
    double total = 0;
    std::vector<int> idx(N);
    for (std::uint64_t s = 0; s < nstrings; ++s) {
        std::uint64_t r = s;
        int rhs = -1;
        for (int j = N - 1; j >= 0; --j) {
            idx[j] = int(r % nb);
            r /= nb;
        }
        for (int j = 0; j < N; ++j)
            if (idx[j] != 0) rhs = j;
        if (rhs > x) continue;
        CMat P = basis[idx[0]];
        for (int j = 1; j < N; ++j) {
            CMat K = Eigen::kroneckerProduct(P, basis[idx[j]]);
            P = std::move(K);
        }
        cplx c = (P.adjoint() * state.op).trace() / dH;
        total += std::norm(c);
    }
    return total;
}

double profile_violation(const RightWeightProfile& p) {
    double worst = 0;
    double sum = 0;
    for (size_t x = 0; x < p.rho.size(); ++x) {
        sum += p.rho[x];
        worst = std::max(worst, -p.rho[x]);
        if (x > 0) worst = std::max(worst, p.R[x - 1] - p.R[x]);
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    if (!p.R.empty()) worst = std::max(worst, std::abs(p.R.back() - 1.0));
    return worst;
}

ProfileSeries average_realizations(int N, int t_max, int n_samples, int threads,
                                   const RealizationFn& fn) {
    if (n_samples < 1) throw Error(ErrorKind::InvalidConfig, "n_samples must be >= 1");
    if (t_max < 0) throw Error(ErrorKind::InvalidConfig, "t_max must be >= 0");
    std::vector<std::vector<std::vector<double>>> per(n_samples);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&]() {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= n_samples) return;
            try {
                per[r] = fn(std::uint64_t(r));
            } catch (...) {
                std::lock_guard<std::mutex> lk(failure_mu);
                if (!failure) failure = std::current_exception();
                next = n_samples;
                return;
            }
        }
    };
    int nt = std::max(1, std::min(threads, n_samples));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    ProfileSeries out;
    out.N = N;
    out.t_max = t_max;
    out.n_samples = n_samples;
    out.first_moment.assign(n_samples, std::vector<double>(t_max + 1));
    out.second_moment.assign(n_samples, std::vector<double>(t_max + 1));
    std::vector<std::vector<double>> sum(t_max + 1, std::vector<double>(N, 0.0));
    std::vector<std::vector<double>> sum2 = sum;
    for (int r = 0; r < n_samples; ++r) {
        const auto& rho = per[r];
        if (int(rho.size()) != t_max + 1)
            throw Error(ErrorKind::DimensionMismatch, "realization returned wrong time count");
        for (int t = 0; t <= t_max; ++t) {
            double m1 = 0, m2 = 0;
            for (int x = 0; x < N; ++x) {
                double v = rho[t][x];
                sum[t][x] += v;
                sum2[t][x] += v * v;
                m1 += x * v;
                m2 += double(x) * x * v;
            }
            out.first_moment[r][t] = m1;
            out.second_moment[r][t] = m2;
        }
    }
    out.rho_stderr.assign(t_max + 1, std::vector<double>(N, 0.0));
    for (int t = 0; t <= t_max; ++t) {
        std::vector<double> mean(N);
        for (int x = 0; x < N; ++x) {
            mean[x] = sum[t][x] / n_samples;
            if (n_samples > 1) {
                double var = (sum2[t][x] - n_samples * mean[x] * mean[x]) / (n_samples - 1);
                out.rho_stderr[t][x] = std::sqrt(std::max(0.0, var) / n_samples);
            }
        }
        RightWeightProfile p;
        p.rho = mean;
        p.R.resize(N);
        double acc = 0;
        for (int x = 0; x < N; ++x) {
            acc += mean[x];
            p.R[x] = acc;
        }
        p.time = t;
        out.mean.push_back(std::move(p));
    }
    return out;
}

namespace {

// Evolves a single-site operator on the smallest open sub-chain containing its
// support, growing the sub-chain by one site per step. Returns rho[t][x] in the
// coordinates of the requested density (mirrored for the left front).
std::vector<std::vector<double>> evolve_compact(const LatticeSpec& spec, ScramblerSource& source,
                                                double epsilon, const CMat& site_op,
                                                InitialOperatorPolicy policy, int t_max,
                                                std::vector<CVec>& phase_cache) {
    const int q = spec.q, N = spec.N;
    const bool right = policy == InitialOperatorPolicy::RightFront;
    int lo = right ? 0 : N - 1;
    int hi = lo;
    CMat op = site_op;
    std::vector<std::vector<double>> rho(t_max + 1, std::vector<double>(N, 0.0));
    auto record = [&](int t) {
        int n = hi - lo + 1;
        auto p = right ? right_profile_raw(op, q, n, t) : left_profile_raw(op, q, n, t);
        for (int j = 0; j < n; ++j) rho[t][j] = p.rho[j];
    };
    record(0);
    for (int t = 0; t < t_max; ++t) {
        const auto& L = source.layer(t);
        int n = hi - lo + 1;
        LatticeSpec sub{q, n, Boundary::Open};
        for (int j = 0; j < n; ++j) {
            apply_site_left(op, sub, j, L[lo + j].adjoint());
            apply_site_right(op, sub, j, L[lo + j]);
        }
        if (n < N) {
            CMat id = CMat::Identity(q, q);
            CMat grown = right ? CMat(Eigen::kroneckerProduct(op, id))
                               : CMat(Eigen::kroneckerProduct(id, op));
            op = std::move(grown);
            if (right) ++hi; else --lo;
            ++n;
        }
        if (int(phase_cache.size()) <= n) phase_cache.resize(n + 1);
        if (phase_cache[n].size() == 0)
            phase_cache[n] = coupling_phases(LatticeSpec{q, n, Boundary::Open}, epsilon);
        conjugate_phases(op, phase_cache[n]);
        record(t + 1);
    }
    return rho;
}

}  // namespace

ProfileSeries averaged_profile(const LatticeSpec& spec, const ScramblerPlan& plan,
                               InitialOperatorPolicy policy, int t_max, int n_samples,
                               int threads) {
    spec.validate();
    if (t_max < 1) throw Error(ErrorKind::InvalidConfig, "t_max must be >= 1");
    const auto paulis = generalized_paulis(spec.q);
    const bool right = policy == InitialOperatorPolicy::RightFront;
    RealizationFn fn = [&](std::uint64_t r) {
        std::vector<std::vector<double>> acc(t_max + 1, std::vector<double>(spec.N, 0.0));
        ScramblerSource source(spec, plan, r);
        for (int t = 0; t < t_max; ++t) source.layer(t);
        std::vector<CVec> cache;
        for (const auto& P : paulis) {
            std::vector<std::vector<double>> rho;
            if (spec.boundary == Boundary::Open) {
                rho = evolve_compact(spec, source, plan.epsilon, P, policy, t_max, cache);
            } else {
                FloquetCircuit circuit(spec, plan.epsilon, source);
                auto st = make_local_state(spec, P, right ? 0 : spec.N - 1);
                rho.push_back(right ? right_density_profile(st).rho : left_density_profile(st).rho);
                for (int t = 0; t < t_max; ++t) {
                    circuit.step(st);
                    rho.push_back(right ? right_density_profile(st).rho
                                        : left_density_profile(st).rho);
                }
            }
            for (int t = 0; t <= t_max; ++t)
                for (int x = 0; x < spec.N; ++x) acc[t][x] += rho[t][x];
        }
        for (auto& row : acc)
            for (auto& v : row) v /= double(paulis.size());
        return acc;
    };
    return average_realizations(spec.N, t_max, n_samples, threads, fn);
}

namespace {

struct LineFit {
    double slope = 0, se = 0;
};

LineFit ols(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t n = t.size();
    double tm = 0, ym = 0;
    for (size_t i = 0; i < n; ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= n;
    ym /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (t[i] - tm) * (t[i] - tm);
        sxy += (t[i] - tm) * (y[i] - ym);
    }
    LineFit f;
    f.slope = sxy / sxx;
    double ssr = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - ym - f.slope * (t[i] - tm);
        ssr += r * r;
    }
    f.se = n > 2 ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;
    return f;
}

}  // namespace

FrontFit fit_front(const ProfileSeries& series, const FitWindowPolicy& policy) {
    const int N = series.N;
    const int tlast = policy.t_max < 0 ? series.t_max : std::min(policy.t_max, series.t_max);
    std::vector<int> times;
    std::vector<double> m(series.t_max + 1), s2(series.t_max + 1);
    for (int t = 0; t <= series.t_max; ++t) {
        double a = 0, b = 0;
        for (int x = 0; x < N; ++x) {
            a += x * series.mean[t].rho[x];
            b += double(x) * x * series.mean[t].rho[x];
        }
        m[t] = a;
        s2[t] = b - a * a;
    }
    for (int t = std::max(0, policy.t_min); t <= tlast; ++t) {
        if (m[t] < policy.margin || m[t] > N - 1 - policy.margin) continue;
        times.push_back(t);
    }
    if (times.size() < 3)
        throw Error(ErrorKind::InsufficientWindow,
                    std::to_string(times.size()) + " usable time points after boundary exclusion");
    std::vector<double> tv(times.begin(), times.end()), mv, sv;
    for (int t : times) {
        mv.push_back(m[t]);
        sv.push_back(s2[t]);
    }
    auto fm = ols(tv, mv);
    auto fs = ols(tv, sv);
    FrontFit out;
    out.v = fm.slope;
    out.D = fs.slope / 2.0;
    out.window_lo = times.front();
    out.window_hi = times.back();
    out.points = int(times.size());

    double jack_v = 0, jack_D = 0;
    const int n = series.n_samples;
    if (n > 1 && int(series.first_moment.size()) == n) {
        std::vector<double> S1(times.size(), 0.0), S2(times.size(), 0.0);
        for (int r = 0; r < n; ++r)
            for (size_t i = 0; i < times.size(); ++i) {
                S1[i] += series.first_moment[r][times[i]];
                S2[i] += series.second_moment[r][times[i]];
            }
        std::vector<double> vs(n), Ds(n);
        std::vector<double> a(times.size()), b(times.size());
        for (int r = 0; r < n; ++r) {
            for (size_t i = 0; i < times.size(); ++i) {
                double m1 = (S1[i] - series.first_moment[r][times[i]]) / (n - 1);
                double m2 = (S2[i] - series.second_moment[r][times[i]]) / (n - 1);
                a[i] = m1;
                b[i] = m2 - m1 * m1;
            }
            vs[r] = ols(tv, a).slope;
            Ds[r] = ols(tv, b).slope / 2.0;
        }
        double vbar = 0, Dbar = 0;
        for (int r = 0; r < n; ++r) {
            vbar += vs[r];
            Dbar += Ds[r];
        }
        vbar /= n;
        Dbar /= n;
        for (int r = 0; r < n; ++r) {
            jack_v += (vs[r] - vbar) * (vs[r] - vbar);
            jack_D += (Ds[r] - Dbar) * (Ds[r] - Dbar);
        }
        jack_v *= double(n - 1) / n;
        jack_D *= double(n - 1) / n;
    }
    out.stderr_v = std::sqrt(fm.se * fm.se + jack_v);
    out.stderr_D = std::sqrt(fs.se * fs.se / 4.0 + jack_D);
    return out;
}

CMat trotter_hamiltonian(int N, double J, double h) {
    LatticeSpec spec{2, N, Boundary::Open};
    spec.validate();
    auto d = Eigen::Index(spec.dim());
    CMat X(2, 2), Y(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, cplx(0, -1), cplx(0, 1), 0;
    Z << 1, 0, 0, -1;
    CMat H = CMat::Zero(d, d);
    for (int i = 0; i + 1 < N; ++i) {
        CMat term = CMat::Identity(d, d);
        apply_site_left(term, spec, i, Y);
        apply_site_left(term, spec, i + 1, Z);
        H -= J * term;
    }
    for (int i = 0; i < N; ++i) {
        CMat term = CMat::Identity(d, d);
        apply_site_left(term, spec, i, X);
        H -= h * term;
    }
    return H;
}

ProfileSeries trotter_profiles(int N, double J, double h, double dt, int t_max,
                               InitialOperatorPolicy policy) {
    LatticeSpec spec{2, N, Boundary::Open};
    CMat H = trotter_hamiltonian(N, J, h);
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    CVec ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::polar(1.0, -dt * es.eigenvalues()(i));
    CMat U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    const bool right = policy == InitialOperatorPolicy::RightFront;
    RealizationFn fn = [&](std::uint64_t) {
        const auto paulis = generalized_paulis(2);
        std::vector<std::vector<double>> acc(t_max + 1, std::vector<double>(N, 0.0));
        for (const auto& P : paulis) {
            auto st = make_local_state(spec, P, right ? 0 : N - 1);
            for (int t = 0; t <= t_max; ++t) {
                if (t > 0) apply_unitary_step(st, U);
                auto p = right ? right_density_profile(st) : left_density_profile(st);
                for (int x = 0; x < N; ++x) acc[t][x] += p.rho[x] / double(paulis.size());
            }
        }
        return acc;
    };
    return average_realizations(N, t_max, 1, 1, fn);
}

}  // namespace opspread
