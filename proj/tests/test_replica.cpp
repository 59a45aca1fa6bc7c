#include <doctest.h>

#include <cmath>

#include "opspread/replica.hpp"

using namespace opspread;

TEST_CASE("exact replica average: trivial coupling") {
    ReplicaAverage avg({3, 4, Boundary::Open}, 0.0);
    auto rho = avg.right_density(3);
    for (const auto& row : rho) {
        CHECK(row[0] == doctest::Approx(1.0));
        for (int x = 1; x < 4; ++x) CHECK(std::abs(row[x]) < 1e-12);
    }
}

TEST_CASE("exact replica average: conservation and light cone") {
    for (int q : {2, 3, 4}) {
        LatticeSpec spec{q, 6, Boundary::Open};
        auto s = fully_random_exact(spec, 0.37, 8);
        for (int t = 0; t <= 8; ++t) {
            CHECK(profile_violation(s.mean[t]) < 1e-9);
            for (int x = t + 1; x < 6; ++x) CHECK(std::abs(s.mean[t].rho[x]) < 1e-12);
        }
    }
}

TEST_CASE("exact replica average is symmetric under e -> -e and e -> e + pi/2") {
    LatticeSpec spec{3, 5, Boundary::Open};
    const double e = 0.29;
    auto a = ReplicaAverage(spec, e).right_density(6);
    auto b = ReplicaAverage(spec, -e).right_density(6);
    auto c = ReplicaAverage(spec, e + kPi / 2).right_density(6);
    for (int t = 0; t <= 6; ++t)
        for (int x = 0; x < 5; ++x) {
            CHECK(std::abs(a[t][x] - b[t][x]) < 1e-12);
            CHECK(std::abs(a[t][x] - c[t][x]) < 1e-12);
        }
}

TEST_CASE("exact replica average agrees with Monte Carlo sampling") {
    LatticeSpec spec{2, 4, Boundary::Open};
    const double e = kPi / 5;
    auto exact = ReplicaAverage(spec, e).right_density(4);
    auto mc = averaged_profile(spec, {ScramblerMode::FullyRandom, 123, e}, InitialOperatorPolicy::RightFront, 4, 4000, 4);
    for (int t = 1; t <= 4; ++t)
        for (int x = 0; x < 4; ++x) CHECK(std::abs(exact[t][x] - mc.mean[t].rho[x]) <= 4 * mc.rho_stderr[t][x] + 1e-12);
}

TEST_CASE("exact first step at e = pi/4") {
    // Odd q: (q^2 - 1)/(2 q^2). The q = 2 involution is traceless and hops more often.
    const std::pair<int, double> cases[] = {{2, 2.0 / 3}, {3, 4.0 / 9}, {5, 12.0 / 25}};
    for (auto [q, expect] : cases) {
        auto rho = ReplicaAverage({q, 4, Boundary::Open}, kPi / 4).right_density(1);
        CHECK(rho[1][1] == doctest::Approx(expect).epsilon(1e-12));
    }
}
