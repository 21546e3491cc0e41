#include "degenflux/error.hpp"
#include "degenflux/stability.hpp"
#include "series_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace degenflux;

namespace {

ProblemConfig scan_setup() {
    ProblemConfig c;
    c.exponent = DegeneracyExponent(1.3);
    c.a = 0.4;
    c.alpha = 1.0;
    c.beta = 0.5;
    c.initial = InitialData::constant(0.0, 1.0);
    return c;
}

// Central difference of the x = 1 (or x = 0) flux in a.
ComponentPair fd_in_a(ProblemConfig c, Boundary side, double t, double h = 1e-5) {
    ProblemConfig lo = c, hi = c;
    lo.a -= h;
    hi.a += h;
    const auto fl = flux(lo, side, t);
    const auto fh = flux(hi, side, t);
    return {(fh.u - fl.u) / (2 * h), (fh.v - fl.v) / (2 * h)};
}

}  // namespace

TEST(Sensitivity, ZeroData) {
    ProblemConfig c = scan_setup();
    c.initial = InitialData::constant(0.0, 0.0);
    EXPECT_EQ(flux_sensitivity(c, 1.0), 0.0);
}

TEST(Sensitivity, IndependentOfBeta) {
    ProblemConfig c = scan_setup();
    const double d0 = flux_sensitivity(c, 1.5);
    for (double beta : {0.0, 1.0, -3.0, 10.0}) {
        c.beta = beta;
        EXPECT_NEAR(flux_sensitivity(c, 1.5), d0, 1e-12 * d0) << beta;
    }
}

TEST(Sensitivity, MatchesFiniteDifference) {
    const ProblemConfig c = scan_setup();
    const auto fd = fd_in_a(c, Boundary::Right, 1.5);
    EXPECT_NEAR(flux_sensitivity(c, 1.5) / std::hypot(fd.u, fd.v), 1.0, 1e-4);
}

TEST(Sensitivity, RandomSampleAgainstFiniteDifference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> A(0.15, 0.85), T(0.2, 3.0), TH(1.0, 1.9);
    std::vector<double> x, u, v;
    for (int i = 0; i <= 400; ++i) {
        const double xi = i / 400.0;
        x.push_back(xi);
        u.push_back(std::cos(2.0 * xi) + xi);
        v.push_back(std::exp(-xi));
    }
    const auto tab = InitialData::tabulated(x, u, v);
    for (int i = 0; i < 10; ++i) {
        ProblemConfig c = scan_setup();
        c.exponent = DegeneracyExponent(TH(rng));
        c.a = A(rng);
        const double t = T(rng);
        if (i % 2) c.initial = tab;
        const ForwardModel m(c);
        for (Boundary side : {Boundary::Right, Boundary::Left}) {
            const auto an = m.flux_derivative(side, t);
            const auto fd = fd_in_a(c, side, t, 1e-6);
            const double scale = std::hypot(fd.u, fd.v);
            EXPECT_LE(std::hypot(an.u - fd.u, an.v - fd.v), 1e-4 * scale)
                << i << " a=" << c.a << " t=" << t << " theta=" << c.exponent.theta();
        }
    }
}

TEST(Sensitivity, ScalesWithData) {
    ProblemConfig c = scan_setup();
    c.initial = InitialData::constant(0.3, 1.0);
    const double d1 = flux_sensitivity(c, 1.2);
    c.initial = InitialData::constant(0.3 * 2.5, 2.5);
    EXPECT_NEAR(flux_sensitivity(c, 1.2), 2.5 * d1, 1e-10 * d1);
}

TEST(Scan, LackOfStabilityAtEarlyTime) {
    const auto s = stability_scan(scan_setup(), 0.1, 0.8, 0.7, 141);
    ASSERT_EQ(s.points.size(), 141u);
    EXPECT_DOUBLE_EQ(s.points.front().a, 0.1);
    EXPECT_DOUBLE_EQ(s.points.back().a, 0.8);
    EXPECT_LE(s.min, 1e-2 * s.max);
    EXPECT_TRUE(s.vanishes(kVanishingRatio));
}

TEST(Scan, StableAtLaterTime) {
    const auto s = stability_scan(scan_setup(), 0.1, 0.8, 1.5, 141);
    EXPECT_GT(s.min, 0.0);
    EXPECT_GE(s.min, 1e-3 * s.max);
    EXPECT_FALSE(s.vanishes(kVanishingRatio));
    for (const auto& p : s.points) {
        EXPECT_TRUE(std::isfinite(p.d));
        EXPECT_GE(p.d, 0.0);
    }
}

TEST(Scan, ZeroDataAllZero) {
    ProblemConfig c = scan_setup();
    c.initial = InitialData::constant(0.0, 0.0);
    const auto s = stability_scan(c, 0.1, 0.8, 1.0, 11);
    for (const auto& p : s.points) EXPECT_EQ(p.d, 0.0);
    EXPECT_THROW(stability_scan(c, 0.8, 0.1, 1.0, 11), DomainError);
    EXPECT_THROW(stability_scan(c, 0.1, 0.8, 1.0, 1), DomainError);
}

TEST(Scan, CsvLayout) {
    ScanResult s;
    s.points = {{0.1, 2.0}, {0.2, 0.5}};
    std::ostringstream out;
    write_scan_csv(out, s);
    EXPECT_EQ(out.str(), "a,D\n0.10000000000000001,2\n0.20000000000000001,0.5\n");
}

TEST(WaitingTime, ConstantDataCollapse) {
    LipschitzData lip;
    lip.margin = 0.7;
    lip.delta = 0.3;
    const double j = static_cast<double>(oracle::bisect_zero(1.0L, 3.5L, 4.0L));
    const double k = 0.25;
    EXPECT_NEAR(waiting_time_bound(lip, 1.5), 0.7 / (std::sqrt(2.0) * k * k * k * j * j * 0.3), 1e-10);
    LipschitzData twice = lip;
    twice.margin = 1.4;
    EXPECT_NEAR(waiting_time_bound(twice, 1.5), 2.0 * waiting_time_bound(lip, 1.5), 1e-12);
}

TEST(WaitingTime, UnitSlopesAtThetaOne) {
    const long double jl = oracle::bisect_zero(0.0L, 2.0L, 3.0L);
    const double j = static_cast<double>(jl);
    const double jp = static_cast<double>(oracle::series_j_prime(0.0L, jl));
    const double expect = std::sqrt(1.0 + j * j * jp * jp * 2.0) / (std::sqrt(2.0) * 0.125 * j * j);
    LipschitzData lip;
    lip.m2 = lip.m4 = 1.0;
    EXPECT_NEAR(waiting_time_bound(lip, 1.0), expect, 1e-10);
    EXPECT_NEAR(waiting_time_bound(lip, 1.0), 1.98477, 1e-4);
}

TEST(WaitingTime, Validation) {
    LipschitzData lip;
    lip.delta = 0.0;
    EXPECT_THROW(waiting_time_bound(lip, 1.5), DomainError);
    EXPECT_THROW(lipschitz_data(InitialData::constant(1, 1), 1.0, 1.0, 0.6, 0.5), DomainError);
    const auto l = lipschitz_data(InitialData::tabulated({0.0, 1.0}, {0.0, 2.0}, {1.0, -1.0}), 1.0, 1.0, 0.1, 0.9);
    EXPECT_DOUBLE_EQ(l.m1, 2.0);
    EXPECT_DOUBLE_EQ(l.m2, 2.0);
    EXPECT_DOUBLE_EQ(l.m3, 1.0);
    EXPECT_DOUBLE_EQ(l.m4, 2.0);
}
