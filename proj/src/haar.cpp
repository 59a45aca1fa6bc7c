#include "opspread/haar.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "opspread/lattice.hpp"
#include "opspread/rng.hpp"

namespace opspread {

TimeString linear_reduce(const TimeString& ts) {
    TimeString out;
    out.reserve(ts.size());
    for (int t : ts) {
        if (!out.empty() && out.back() == t)
            out.pop_back();
        else
            out.push_back(t);
    }
    return out;
}

TimeString minimal_form(const TimeString& ts) {
    TimeString w = linear_reduce(ts);
    std::size_t lo = 0, hi = w.size();
    while (hi - lo >= 2 && w[lo] == w[hi - 1]) {
        ++lo;
        --hi;
    }
    return TimeString(w.begin() + lo, w.begin() + hi);
}

int delta_constraint(const TimeString& a, const TimeString& b) {
    // a = b as operators iff a b^dag reduces to the empty word.
    TimeString w = a;
    w.insert(w.end(), b.rbegin(), b.rend());
    return linear_reduce(w).empty() ? 1 : 0;
}

namespace {

bool rotation_equal(const TimeString& a, const TimeString& b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    std::size_t n = a.size();
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = a[(i + r) % n] == b[i];
        if (ok) return true;
    }
    return false;
}

}  // namespace

int symmetry_factor(const TimeString& ts) {
    TimeString w = minimal_form(ts);
    if (w.empty()) return 1;
    std::size_t n = w.size();
    int count = 0;
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = w[(i + r) % n] == w[i];
        count += ok;
    }
    return count;
}

int shift_match_count(const TimeString& a, const TimeString& b) {
    TimeString ma = minimal_form(a), mb = minimal_form(b);
    if (ma.empty() || mb.empty())
        throw Error(ErrorKind::InvalidConfig, "shift_match_count needs non-trivial strings");
    if (ma.size() != mb.size()) return 0;
    // A matching shift must carry the earliest time of one onto the other.
    int tau = *std::min_element(mb.begin(), mb.end()) - *std::min_element(ma.begin(), ma.end());
    for (int& t : ma) t += tau;
    return rotation_equal(ma, mb) ? 1 : 0;
}

double two_correlator_prediction(const TimeString& a, const TimeString& b, int q) {
    return double(symmetry_factor(a)) / (double(q) * q) * shift_match_count(a, b);
}

CMat correlator_z(int q) {
    CMat Z = CMat::Zero(q, q);
    for (int k = 0; k < q; ++k) Z(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return Z;
}

namespace {

class PowerCache {
public:
    explicit PowerCache(const CMat& V) : V_(V), Vd_(V.adjoint()) {}

    const CMat& get(int k) {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        CMat P;
        if (k == 0)
            P = CMat::Identity(V_.rows(), V_.cols());
        else if (k > 0)
            P = get(k - 1) * V_;
        else
            P = get(k + 1) * Vd_;
        return cache_.emplace(k, std::move(P)).first->second;
    }

private:
    CMat V_, Vd_;
    std::map<int, CMat> cache_;
};

// Tr prod Z(t_i) = Tr prod_i (Z V^{t_{i+1} - t_i}) with cyclic indices.
cplx trace_word(PowerCache& pc, const TimeString& raw, int q) {
    TimeString w = minimal_form(raw);
    if (w.empty()) return cplx(1.0);
    std::size_t n = w.size();
    CMat M;
    for (std::size_t i = 0; i < n; ++i) {
        CMat F = pc.get(w[(i + 1) % n] - w[i]);
        for (int r = 1; r < q; r += 2) F.row(r) *= -1.0;
        if (i == 0)
            M = std::move(F);
        else
            M = M * F;
    }
    return M.trace() / double(q);
}

}  // namespace

cplx ato_eval(const CMat& V, const TimeString& ts) {
    if (V.rows() != V.cols() || V.rows() < 1)
        throw Error(ErrorKind::DimensionMismatch, "scrambler must be square");
    PowerCache pc(V);
    return trace_word(pc, ts, int(V.rows()));
}

MomentEstimate mc_moment(const std::vector<CorrelatorFactor>& factors, int q, long n_samples,
                         std::uint64_t seed, int threads) {
    if (q < 2) throw Error(ErrorKind::InvalidDimension, "q must be >= 2");
    if (n_samples < 2) throw Error(ErrorKind::InvalidConfig, "need at least two samples");
    if (factors.empty()) throw Error(ErrorKind::InvalidConfig, "empty correlator product");
    for (const auto& f : factors)
        if (minimal_form(f.times).empty())
            throw Error(ErrorKind::InvalidConfig, "correlator string reduces to the identity");

    constexpr long kBlock = 1024;
    long n_blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<cplx> block_sum(n_blocks);
    std::vector<double> block_sq(n_blocks);
    std::atomic<long> next{0};

    auto worker = [&]() {
        for (long b = next++; b < n_blocks; b = next++) {
            Rng rng = substream(seed, std::uint64_t(b));
            long lo = b * kBlock, hi = std::min(n_samples, lo + kBlock);
            cplx s = 0;
            double s2 = 0;
            for (long i = lo; i < hi; ++i) {
                CMat V = sample_haar_unitary(q, rng);
                PowerCache pc(V);
                cplx x = 1.0;
                for (const auto& f : factors) {
                    cplx c = trace_word(pc, f.times, q);
                    x *= f.conjugate ? std::conj(c) : c;
                }
                s += x;
                s2 += std::norm(x);
            }
            block_sum[b] = s;
            block_sq[b] = s2;
        }
    };

    int nt = std::max(1, std::min<int>(threads, int(n_blocks)));
    std::vector<std::thread> pool;
    for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    cplx sum = 0;
    double sq = 0;
    for (long b = 0; b < n_blocks; ++b) {
        sum += block_sum[b];
        sq += block_sq[b];
    }
    double n = double(n_samples);
    MomentEstimate est;
    est.mean = sum / n;
    double var = std::max(0.0, (sq - n * std::norm(est.mean)) / (n - 1));
    est.stderr = std::sqrt(var / n);
    est.n_samples = n_samples;
    est.q = q;
    return est;
}

TimeString gamma_word(const std::vector<int>& s) {
    TimeString w;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != 0 && s[i] != 1) throw Error(ErrorKind::InvalidConfig, "decoration bits must be 0 or 1");
        if (s[i]) w.push_back(int(i) + 1);
    }
    return w;
}

TimeString adjoint_word(const TimeString& w) { return TimeString(w.rbegin(), w.rend()); }

namespace {

void check_decoration(const Decoration& dec) {
    std::size_t n = dec.s1.size();
    if (dec.s1bar.size() != n || dec.s2.size() != n || dec.s2bar.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "decoration strings differ in length");
}

void append(TimeString& a, const TimeString& b) { a.insert(a.end(), b.begin(), b.end()); }

}  // namespace

TimeString otoc_string(const Decoration& dec) {
    check_decoration(dec);
    int T = dec.T();
    TimeString w{0};
    append(w, gamma_word(dec.s1));
    w.push_back(T);
    append(w, adjoint_word(gamma_word(dec.s1bar)));
    w.push_back(0);
    append(w, gamma_word(dec.s2));
    w.push_back(T);
    append(w, adjoint_word(gamma_word(dec.s2bar)));
    return w;
}

TimeString otoc_delta_word(const Decoration& dec) {
    check_decoration(dec);
    TimeString w = gamma_word(dec.s1);
    append(w, adjoint_word(gamma_word(dec.s2bar)));
    append(w, gamma_word(dec.s2));
    append(w, adjoint_word(gamma_word(dec.s1bar)));
    return w;
}

double otoc_leading(const Decoration& dec, int q) {
    TimeString g1 = gamma_word(dec.s1), g1b = gamma_word(dec.s1bar);
    TimeString g2 = gamma_word(dec.s2), g2b = gamma_word(dec.s2bar);
    int dx = linear_reduce(otoc_delta_word(dec)).empty() ? 1 : 0;
    int cross = delta_constraint(g1, g2b) * delta_constraint(g2, g1b);
    int direct = delta_constraint(g1, g1b) * delta_constraint(g2, g2b);
    return (dx - cross - direct) / (double(q) * q);
}

std::vector<int> otoc_delta_expansion(const Decoration& dec) {
    check_decoration(dec);
    std::size_t n = dec.s1.size();
    std::vector<int> minus(n), plus(n), zero(n);
    for (std::size_t t = 0; t < n; ++t) {
        int a = dec.s1[t], ab = dec.s1bar[t], b = dec.s2[t], bb = dec.s2bar[t];
        minus[t] = (a == ab && b == bb);
        plus[t] = (a == bb && b == ab);
        zero[t] = int((a ^ ab ^ b ^ bb) == 0) - minus[t];
    }
    std::vector<int> terms(n + 1, 0);
    for (std::size_t m = 0; m < n; ++m) {
        int v = zero[m];
        for (std::size_t t = 0; t < m && v; ++t) v *= minus[t];
        for (std::size_t t = m + 1; t < n && v; ++t) v *= plus[t];
        terms[m] = v;
    }
    int all_minus = 1;
    for (std::size_t t = 0; t < n; ++t) all_minus *= minus[t];
    terms[n] = all_minus;
    return terms;
}

}  // namespace opspread
