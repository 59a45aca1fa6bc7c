#include <doctest.h>

#include <cmath>

#include "opspread/haar.hpp"
#include "opspread/lattice.hpp"

using namespace opspread;

namespace {

TimeString random_word(Rng& rng, int max_len, int max_t) {
    std::uniform_int_distribution<int> len(0, max_len), t(1, max_t);
    TimeString w(len(rng));
    for (int& x : w) x = t(rng);
    return w;
}

Decoration random_decoration(Rng& rng, int T) {
    std::bernoulli_distribution bit(0.5);
    Decoration d;
    for (auto* s : {&d.s1, &d.s1bar, &d.s2, &d.s2bar}) {
        s->resize(T - 1);
        for (int& b : *s) b = bit(rng);
    }
    return d;
}

// delta[X = 1] from the operator word alone.
int delta_direct(const Decoration& d) { return linear_reduce(otoc_delta_word(d)).empty() ? 1 : 0; }

}  // namespace

TEST_CASE("minimal forms") {
    CHECK(minimal_form({1, 1}).empty());
    CHECK(minimal_form({1, 2, 2, 1, 3}) == TimeString{3});
    CHECK(minimal_form({1, 2, 3}) == TimeString{1, 2, 3});
    CHECK(minimal_form({2, 1, 3, 2}) == TimeString{1, 3});
    CHECK(linear_reduce({2, 1, 3, 2}) == TimeString{2, 1, 3, 2});
    CHECK(minimal_form({4, 4, 4, 4}).empty());

    Rng rng = substream(1, 0);
    for (int i = 0; i < 1000; ++i) {
        auto w = random_word(rng, 10, 3);
        auto m = minimal_form(w);
        CHECK(minimal_form(m) == m);
        CHECK(linear_reduce(linear_reduce(w)) == linear_reduce(w));
        for (size_t j = 0; j + 1 < m.size(); ++j) CHECK(m[j] != m[j + 1]);
        if (m.size() > 1) CHECK(m.front() != m.back());
    }
}

TEST_CASE("minimal form preserves the trace") {
    Rng rng = substream(2, 0);
    const TimeString w{1, 2, 2, 1, 3};
    for (int i = 0; i < 1000; ++i) {
        CMat V = sample_haar_unitary(4, rng);
        CHECK(std::abs(ato_eval(V, w) - ato_eval(V, minimal_form(w))) < 1e-10);
    }
}

TEST_CASE("delta constraint") {
    CHECK(delta_constraint({1, 2}, {1, 2}) == 1);
    CHECK(delta_constraint({1, 1, 2}, {2}) == 1);
    CHECK(delta_constraint({1, 2}, {2, 1}) == 0);

    Rng v = substream(3, 0);
    CMat V = sample_haar_unitary(4, v);
    CHECK(std::abs(ato_eval(V, {1, 2, 0}) - ato_eval(V, {2, 1, 0})) > 1e-3);
}

TEST_CASE("delta constraint is sound") {
    Rng rng = substream(4, 0);
    int hits = 0;
    for (int i = 0; i < 4000 && hits < 100; ++i) {
        auto a = random_word(rng, 6, 3), b = random_word(rng, 6, 3);
        if (!delta_constraint(a, b)) continue;
        ++hits;
        for (int q : {2, 3, 4}) {
            CMat V = sample_haar_unitary(q, rng);
            CHECK(std::abs(ato_eval(V, a) - ato_eval(V, b)) < 1e-10);
        }
    }
    CHECK(hits == 100);
}

TEST_CASE("symmetry factors and shift matches") {
    CHECK(symmetry_factor({1, 2, 1, 2}) == 2);
    CHECK(symmetry_factor({1, 2, 3}) == 1);
    CHECK(symmetry_factor({3, 3, 3}) == 1);
    CHECK(symmetry_factor({1, 2, 1, 2, 1, 2}) == 3);
    CHECK(shift_match_count({1, 2}, {1, 2}) == 1);
    CHECK(shift_match_count({1, 2}, {2, 3}) == 1);
    CHECK(shift_match_count({1, 2}, {1, 3}) == 0);
    CHECK(shift_match_count({1, 3, 2}, {4, 3, 5}) == 1);
    CHECK(two_correlator_prediction({1, 2}, {1, 2}, 16) == doctest::Approx(1.0 / 256));
    CHECK(two_correlator_prediction({1, 2, 1, 2}, {2, 3, 2, 3}, 4) == doctest::Approx(2.0 / 16));
    CHECK_THROWS_AS(shift_match_count({1, 1}, {2}), Error);
}

TEST_CASE("correlator evaluation") {
    Rng rng = substream(5, 0);
    for (int q : {2, 3, 4}) {
        CMat V = sample_haar_unitary(q, rng);
        CHECK(std::abs(ato_eval(V, {}) - 1.0) < 1e-14);
        double tr = correlator_z(q).trace().real() / q;
        CHECK(std::abs(ato_eval(V, {1}) - tr) < 1e-12);
        CHECK(std::abs(ato_eval(V, {3, 3}) - 1.0) < 1e-12);
    }
}

TEST_CASE("Monte Carlo moments: reproducible and thread independent") {
    std::vector<CorrelatorFactor> f{{{1, 2}, false}, {{1, 2}, true}};
    auto a = mc_moment(f, 4, 3000, 9, 1);
    auto b = mc_moment(f, 4, 3000, 9, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr == b.stderr);
    CHECK(a.n_samples == 3000);
    CHECK_THROWS_AS(mc_moment({{{1, 1}, false}}, 4, 100, 1), Error);
    CHECK_THROWS_AS(mc_moment(f, 4, 1, 1), Error);
}

TEST_CASE("single correlator is suppressed") {
    // The traceless involution gives a vanishing mean; only the bound is testable.
    for (int q : {4, 8, 16}) {
        auto m = mc_moment({{{1, 2}, false}}, q, 20000, 21, 4);
        CHECK(std::abs(m.mean) <= 3 * m.stderr + 1.0 / (q * q));
    }
}

TEST_CASE("two-correlator averages at q = 16") {
    const std::pair<TimeString, TimeString> pairs[] = {{{1, 2}, {1, 2}}, {{1, 2}, {2, 3}}};
    for (const auto& [a, b] : pairs) {
        auto m = mc_moment({{a, false}, {b, true}}, 16, 100000, 31, 4);
        CHECK(std::abs(m.mean.real() - two_correlator_prediction(a, b, 16)) <= 3 * m.stderr);
    }
}

TEST_CASE("OTOC leading order: symbolic examples") {
    Decoration zero{{0}, {0}, {0}, {0}};
    CHECK(otoc_leading(zero, 8) == doctest::Approx(-1.0 / 64));
    Decoration one{{1}, {0}, {0}, {0}};
    CHECK(otoc_leading(one, 8) == 0.0);
    CHECK(otoc_string(Decoration{{0, 0}, {0, 0}, {0, 0}, {0, 0}}) == TimeString{0, 3, 0, 3});
}

TEST_CASE("OTOC expansion equals the direct delta") {
    Rng rng = substream(6, 0);
    for (int i = 0; i < 1000; ++i) {
        std::uniform_int_distribution<int> T(2, 5);
        auto d = random_decoration(rng, T(rng));
        auto terms = otoc_delta_expansion(d);
        CHECK(int(terms.size()) == d.T());
        int sum = 0;
        for (int t : terms) sum += t;
        CHECK((sum == 0 || sum == 1));
        CHECK(sum == delta_direct(d));
    }
}

TEST_CASE("OTOC averages at q = 16 follow the leading order") {
    Rng rng = substream(7, 0);
    std::vector<Decoration> decs{{{0, 0}, {0, 0}, {0, 0}, {0, 0}}, {{1}, {1}, {0}, {0}}, {{1}, {0}, {1}, {0}}};
    while (decs.size() < 10) {
        std::uniform_int_distribution<int> T(2, 4);
        decs.push_back(random_decoration(rng, T(rng)));
    }
    const int q = 16;
    for (size_t i = 0; i < decs.size(); ++i) {
        auto m = mc_moment({{otoc_string(decs[i]), false}}, q, 30000, 100 + i, 4);
        double scaled = q * q * m.mean.real();
        CHECK(std::abs(scaled - q * q * otoc_leading(decs[i], q)) <= 3 * q * q * m.stderr + 0.2);
    }
}
