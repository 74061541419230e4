#include <cmath>
#include <random>

#include "doctest.h"
#include "sfqlab/physics.hpp"
#include "sfqlab/rng.hpp"

using namespace sfq;
using namespace sfq::phys;

namespace {
JunctionParams ref_junction(double ic_uA = 20.0, double tc = 8.5) {
    JunctionParams j;
    j.ic_ref = ic_uA * 1e-6;
    j.t_ref = 4.2;
    j.rn = 140.0;
    j.r_shunt = 12.0;
    j.cap = 120e-15;
    j.material.tc = tc;
    return j;
}
}  // namespace

TEST_CASE("gap_ratio limits and point values") {
    CHECK(gap_ratio(0.0, 8.5) == 1.0);
    CHECK(gap_ratio(8.5, 8.5) == 0.0);
    CHECK(gap_ratio(9.0, 8.5) == 0.0);
    // tanh(1.74*sqrt(2-1)), 50-digit evaluation
    CHECK(gap_ratio(4.25, 8.5) == doctest::Approx(0.9402266403927275).epsilon(1e-12));
    CHECK_THROWS_AS(gap_ratio(-0.1, 8.5), std::domain_error);
    CHECK_THROWS_AS(gap_ratio(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gap_ratio(1.0, -2.0), std::domain_error);
}

TEST_CASE("ic_ratio point values") {
    CHECK(ic_ratio(4.2, 8.5) == doctest::Approx(0.879).epsilon(0.005 / 0.879));
    CHECK(ic_ratio(4.2, 8.5) == doctest::Approx(0.8791237203364582).epsilon(1e-12));
    CHECK(ic_ratio(0.1, 8.5) == doctest::Approx(1.000).epsilon(1e-3));
    CHECK(ic_ratio(2.5, 8.5) == doctest::Approx(0.9856720103143967).epsilon(1e-12));
    CHECK(ic_ratio(0.0, 8.5) == 1.0);
    CHECK(ic_ratio(8.5, 8.5) == 0.0);
}

TEST_CASE("ic_ratio is monotone non-increasing on [0, Tc]") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 8.5);
    for (int i = 0; i < 2000; ++i) {
        double t1 = u(gen), t2 = u(gen);
        if (t1 > t2) std::swap(t1, t2);
        CHECK(ic_ratio(t1, 8.5) >= ic_ratio(t2, 8.5));
    }
}

TEST_CASE("ic_ratio is flat below 2.5 K") {
    double base = ic_ratio(0.1, 8.5);
    for (double t = 0.1; t <= 2.5 + 1e-12; t += 0.05) {
        CHECK(1.0 - ic_ratio(t, 8.5) / base < 0.015);
    }
}

TEST_CASE("ic_at rescales from the reference point") {
    JunctionParams j = ref_junction();
    CHECK(ic_at(4.2, j) == doctest::Approx(20e-6).epsilon(1e-12));
    CHECK(ic_at(0.1, j) == doctest::Approx(22.75e-6).epsilon(0.15 / 22.75));
    JunctionParams ja = anneal(j, 0.85);
    CHECK(ic_at(0.1, ja) == doctest::Approx(19.337437503669315e-6).epsilon(1e-9));
}

TEST_CASE("ambegaokar-baratoff point values and composition") {
    MaterialParams m;
    m.tc = 8.5;
    CHECK(ab_critical_current(0.0, 100.0, m) == doctest::Approx(20.25e-6).epsilon(1e-4));
    CHECK(ab_critical_current(8.5, 100.0, m) == 0.0);
    double ratio = ab_critical_current(4.2, 100.0, m) / ab_critical_current(0.0, 100.0, m);
    CHECK(ratio == doctest::Approx(0.879).epsilon(0.005 / 0.879));
    // Composing the AB formula with the gap interpolation reproduces the
    // closed-form critical-current ratio to 1e-9 relative, across (0, Tc).
    for (double t = 0.05; t < 8.5; t += 0.05) {
        double lhs = ab_critical_current(t, 100.0, m) / ab_critical_current(0.0, 100.0, m);
        double rhs = ic_ratio(t, 8.5);
        if (rhs > 0.0) CHECK(std::abs(lhs / rhs - 1.0) < 1e-9);
    }
}

TEST_CASE("johnson_sigma values and scaling laws") {
    CHECK(johnson_sigma(2.0, 0.0, 1e-13) == 0.0);
    CHECK(johnson_sigma(2.0, 4.2, 1e-13) == doctest::Approx(34.0e-6).epsilon(0.1 / 34.0));
    CHECK(johnson_sigma(2.0, 16.8, 1e-13) ==
          doctest::Approx(2.0 * johnson_sigma(2.0, 4.2, 1e-13)).epsilon(1e-12));
    // exact sqrt scaling in t, 1/r and 1/dt
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        double r = u(gen), t = u(gen), dt = u(gen) * 1e-13, c = u(gen);
        CHECK(johnson_sigma(r, c * t, dt) ==
              doctest::Approx(std::sqrt(c) * johnson_sigma(r, t, dt)).epsilon(1e-12));
        CHECK(johnson_sigma(c * r, t, dt) ==
              doctest::Approx(johnson_sigma(r, t, dt) / std::sqrt(c)).epsilon(1e-12));
        CHECK(johnson_sigma(r, t, c * dt) ==
              doctest::Approx(johnson_sigma(r, t, dt) / std::sqrt(c)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(johnson_sigma(0.0, 4.2, 1e-13), std::domain_error);
    CHECK_THROWS_AS(johnson_sigma(2.0, -1.0, 1e-13), std::domain_error);
    CHECK_THROWS_AS(johnson_sigma(2.0, 4.2, 0.0), std::domain_error);
}

TEST_CASE("escape barrier values") {
    CHECK(escape_barrier_over_kt(1.0, 10e-6, 4.2) == 0.0);
    CHECK(escape_barrier_over_kt(1.5, 10e-6, 4.2) == 0.0);  // past critical: barrier gone
    CHECK(escape_barrier_over_kt(0.0, 10e-6, 4.2) == doctest::Approx(113.5).epsilon(0.5 / 113.5));
    CHECK(escape_barrier_over_kt(0.9, 10e-6, 4.2) == doctest::Approx(3.41).epsilon(0.05 / 3.41));
    // zero-bias identity: barrier*kB*t == 2*phi0*ic/(2*pi)
    for (double ic : {5e-6, 10e-6, 40e-6}) {
        for (double t : {0.01, 1.0, 4.2}) {
            double lhs = escape_barrier_over_kt(0.0, ic, t) * PhysicalConstants::kB * t;
            double rhs = 2.0 * PhysicalConstants::phi0 * ic / (2.0 * 3.14159265358979323846);
            CHECK(std::abs(lhs / rhs - 1.0) < 1e-12);
        }
    }
    // monotone decreasing in bias
    double prev = escape_barrier_over_kt(0.0, 10e-6, 4.2);
    for (double i = 0.05; i <= 1.0; i += 0.05) {
        double cur = escape_barrier_over_kt(i, 10e-6, 4.2);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS_AS(escape_barrier_over_kt(-0.1, 10e-6, 4.2), std::domain_error);
}

TEST_CASE("anneal composes multiplicatively and only touches ic") {
    JunctionParams j = ref_junction();
    JunctionParams same = anneal(j, 1.0);
    CHECK(same.anneal_factor == 1.0);
    CHECK(ic_at(4.2, same) == ic_at(4.2, j));

    JunctionParams a = anneal(j, 0.85);
    CHECK(ic_at(4.2, a) == doctest::Approx(17e-6).epsilon(1e-12));
    CHECK(a.rn == j.rn);
    CHECK(a.r_shunt == j.r_shunt);
    CHECK(a.cap == j.cap);

    JunctionParams twice = anneal(anneal(j, 0.9), 0.9);
    CHECK(twice.anneal_factor == doctest::Approx(0.81).epsilon(1e-12));

    CHECK_THROWS_AS(anneal(j, 0.0), std::domain_error);
    CHECK_THROWS_AS(anneal(j, 1.2), std::domain_error);
    CHECK_THROWS_AS(anneal(j, -0.5), std::domain_error);
}

TEST_CASE("junction params invariants") {
    JunctionParams j = ref_junction();
    CHECK_NOTHROW(j.validate());
    j.ic_ref = 0.0;
    CHECK_THROWS_AS(j.validate(), std::domain_error);
    j = ref_junction();
    j.t_ref = 9.0;
    CHECK_THROWS_AS(j.validate(), std::domain_error);
    j = ref_junction();
    j.r_shunt = -1.0;
    CHECK_THROWS_AS(j.validate(), std::domain_error);
}

TEST_CASE("counter rng is a pure function of its key") {
    CounterRng a(42, 3), b(42, 3), c(43, 3);
    for (std::uint64_t k = 0; k < 64; ++k) {
        CHECK(a.bits(k) == b.bits(k));
        CHECK(a.bits(k) != c.bits(k));
        double u = a.uniform(k);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    // normal draws have sane first moments
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        double x = a.normal(static_cast<std::uint64_t>(k));
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}
