#include "crank_nicolson.hpp"
#include "degenflux/error.hpp"
#include "degenflux/forward.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace degenflux;

namespace {

ProblemConfig test1() {
    ProblemConfig c;
    c.exponent = DegeneracyExponent(1.5);
    c.a = 0.5;
    c.alpha = 1.0;
    c.beta = 1.0;
    c.initial = InitialData::constant(1.0, 1.0);
    return c;
}

double rel(ComponentPair got, std::complex<double> ref) {
    return std::hypot(got.u - ref.real(), got.v - ref.imag()) / std::abs(ref);
}

}  // namespace

TEST(Rotation, Examples) {
    const auto id = rotation(3.7, 0.0);
    EXPECT_EQ(id.m00, 1.0);
    EXPECT_EQ(id.m01, 0.0);
    EXPECT_EQ(id.m10, 0.0);
    EXPECT_EQ(id.m11, 1.0);

    const auto q = rotation(1.0, std::numbers::pi / 2);
    EXPECT_NEAR(q.m00, 0.0, 1e-14);
    EXPECT_NEAR(q.m01, -1.0, 1e-14);
    EXPECT_NEAR(q.m10, 1.0, 1e-14);
    EXPECT_NEAR(q.m11, 0.0, 1e-14);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double beta = U(rng), t = U(rng);
        const auto p = rotation(beta, t);
        const auto m = rotation(-beta, t);
        const ComponentPair e1 = m.apply(p.apply({1.0, 0.0}));
        const ComponentPair e2 = m.apply(p.apply({0.0, 1.0}));
        EXPECT_NEAR(e1.u, 1.0, 1e-14);
        EXPECT_NEAR(e1.v, 0.0, 1e-14);
        EXPECT_NEAR(e2.u, 0.0, 1e-14);
        EXPECT_NEAR(e2.v, 1.0, 1e-14);
    }
}

TEST(Forward, ZeroDataGivesZero) {
    ProblemConfig c = test1();
    c.initial = InitialData::constant(0.0, 0.0);
    const ForwardModel m(c);
    for (double t : {0.01, 1.0, 3.0}) {
        for (double x : {0.0, 0.2, 0.5, 0.9}) {
            EXPECT_EQ(m.state(x, t).u, 0.0);
            EXPECT_EQ(m.state(x, t).v, 0.0);
        }
        EXPECT_EQ(m.flux(Boundary::Right, t).u, 0.0);
        EXPECT_EQ(m.flux(Boundary::Left, t).v, 0.0);
    }
}

TEST(Forward, DirichletAtBothEnds) {
    for (double theta : {1.0, 1.3, 1.5, 1.9}) {
        ProblemConfig c = test1();
        c.exponent = DegeneracyExponent(theta);
        c.a = 0.4;
        const ForwardModel m(c);
        const auto r = m.state(1.0, 1.0);
        const auto l = m.state(0.0, 1.0);
        EXPECT_LE(std::hypot(r.u, r.v), 1e-8) << theta;
        EXPECT_LE(std::hypot(l.u, l.v), 1e-8) << theta;
    }
}

TEST(Forward, DecoupledHalves) {
    ProblemConfig c = test1();
    c.initial = InitialData::piecewise(0.0, 2.0, 0.0, 1.0);
    const ForwardModel m(c);
    for (double t : {0.001, 0.1, 1.0, 4.0}) {
        EXPECT_EQ(m.flux(Boundary::Left, t).u, 0.0);
        EXPECT_EQ(m.flux(Boundary::Left, t).v, 0.0);
        EXPECT_EQ(m.state(0.3, t).u, 0.0);
        EXPECT_NE(m.flux(Boundary::Right, t).u, 0.0);
    }
    // Left data only changes left quantities.
    ProblemConfig c2 = c;
    c2.initial = InitialData::piecewise(5.0, 2.0, -3.0, 1.0);
    const ForwardModel m2(c2);
    EXPECT_EQ(m2.flux(Boundary::Right, 1.3).u, m.flux(Boundary::Right, 1.3).u);
    EXPECT_EQ(m2.state(0.8, 1.3).v, m.state(0.8, 1.3).v);
}

TEST(Forward, StateMatchesCrankNicolsonTheta1) {
    ProblemConfig c;
    c.exponent = DegeneracyExponent(1.0);
    c.a = 0.5;
    c.initial = InitialData::constant(1.0, 0.0);
    oracle::CrankNicolson cn({.theta = 1.0, .a = 0.5, .initial = [](double) { return std::complex<double>(1.0); }});
    cn.advance_to(0.5);
    const auto ref = cn.value(0.75);
    const auto got = solve_state(c, 0.75, 0.5);
    EXPECT_LE(rel(got, ref), 1e-3) << got.u << " vs " << ref.real();
}

TEST(Forward, FluxMatchesCrankNicolsonTest1) {
    const auto c = test1();
    oracle::CrankNicolson cn({.theta = 1.5, .a = 0.5, .alpha = 1.0, .beta = 1.0,
                              .initial = [](double) { return std::complex<double>(1.0, 1.0); }});
    cn.advance_to(1.99);
    EXPECT_LE(rel(flux(c, Boundary::Right, 1.99), cn.flux_right()), 1e-3);
    EXPECT_LE(rel(flux(c, Boundary::Left, 1.99), cn.flux_left()), 1e-3);
}

TEST(Forward, FluxSignsAndMirror) {
    // Mirrored data about 1/2: flux at x=0 is minus the flux at x=1.
    ProblemConfig c = test1();
    const ForwardModel m(c);
    const auto r = m.flux(Boundary::Right, 0.8);
    const auto l = m.flux(Boundary::Left, 0.8);
    EXPECT_NEAR(r.u, -l.u, 1e-12);
    EXPECT_NEAR(r.v, -l.v, 1e-12);
}

TEST(Forward, RejectsOutOfRange) {
    const ForwardModel m(test1());
    EXPECT_THROW(m.state(0.5, 5e-4), DomainError);
    EXPECT_THROW(m.flux(Boundary::Right, 0.0), DomainError);
    EXPECT_THROW(m.state(1.1, 1.0), DomainError);
    EXPECT_THROW(m.state(-0.1, 1.0), DomainError);
    EXPECT_NO_THROW(m.state(0.5, kMinTime));
    ProblemConfig bad = test1();
    bad.a = 1.0;
    EXPECT_THROW(ForwardModel{bad}, DomainError);
    bad = test1();
    bad.modes = 0;
    EXPECT_THROW(ForwardModel{bad}, DomainError);
}

TEST(Forward, LateTimeSlopeIsFirstEigenvalue) {
    ProblemConfig c = test1();
    c.alpha = c.beta = 0.0;
    c.initial = InitialData::constant(1.0, 0.5);
    const ForwardModel m(c);
    // least-squares slope of log|flux| on [3, 5]
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (double t = 3.0; t <= 5.0 + 1e-12; t += 0.1, ++n) {
        const auto f = m.flux(Boundary::Right, t);
        const double y = std::log(std::hypot(f.u, f.v));
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    const double lambda1 = m.basis(Side::Right).eigenvalues()[0];
    EXPECT_NEAR(-slope / lambda1, 1.0, 1e-2);
}

TEST(Forward, RotationFactorisation) {
    ProblemConfig base = test1();
    base.alpha = 0.0;
    base.beta = 0.0;
    base.initial = InitialData::constant(0.7, -1.2);
    ProblemConfig rotated = base;
    rotated.beta = 2.3;
    const ForwardModel m0(base), m1(rotated);
    for (double t : {0.05, 0.5, 1.0, 2.5}) {
        for (Boundary side : {Boundary::Left, Boundary::Right}) {
            const auto expect = rotation(2.3, t).apply(m0.flux(side, t));
            const auto got = m1.flux(side, t);
            const double scale = std::hypot(expect.u, expect.v);
            EXPECT_NEAR(got.u, expect.u, 1e-12 * scale);
            EXPECT_NEAR(got.v, expect.v, 1e-12 * scale);
        }
    }
}

TEST(Forward, DecayFactorDecreasesInA) {
    for (double t : {0.1, 1.0, 3.0}) {
        ProblemConfig c1 = test1(), c2 = test1();
        c1.a = 0.3;
        c2.a = 0.6;
        const ForwardModel m1(c1), m2(c2);
        for (std::size_t n = 0; n < 10; ++n)
            EXPECT_LT(std::exp(-m2.basis(Side::Right).eigenvalues()[n] * t),
                      std::exp(-m1.basis(Side::Right).eigenvalues()[n] * t));
    }
}

TEST(Measure, ExactWithoutNoiseAndDeterministic) {
    const auto c = test1();
    const auto times = sample_times(0.0, 4.0, 200);
    const std::vector<Boundary> sides{Boundary::Left, Boundary::Right};
    const auto m = measure(c, times, sides, 0.0, 1);
    ASSERT_EQ(m.samples.size(), 2 * times.size());
    const ForwardModel model(c);
    for (const auto& s : m.samples) {
        const auto f = model.flux(s.side, s.t);
        EXPECT_EQ(s.du, f.u);
        EXPECT_EQ(s.dv, f.v);
    }
    const auto a = measure(c, times, sides, 1.0, 42);
    const auto b = measure(c, times, sides, 1.0, 42);
    const auto d = measure(c, times, sides, 1.0, 43);
    std::ostringstream sa, sb, sd;
    write_csv(sa, a);
    write_csv(sb, b);
    write_csv(sd, d);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_NE(sa.str(), sd.str());
}

TEST(Measure, NoiseHasRequestedSpread) {
    const auto c = test1();
    const auto times = sample_times(0.01, 4.0, 500);
    const std::vector<Boundary> sides{Boundary::Right};
    const auto clean = measure(c, times, sides, 0.0, 1);
    const auto noisy = measure(c, times, sides, 1.0, 1);
    // 500 times x 2 components = 1000 relative perturbations
    std::vector<double> r;
    for (std::size_t i = 0; i < clean.samples.size(); ++i) {
        r.push_back(noisy.samples[i].du / clean.samples[i].du - 1.0);
        r.push_back(noisy.samples[i].dv / clean.samples[i].dv - 1.0);
    }
    double mean = 0.0;
    for (double x : r) mean += x / r.size();
    double var = 0.0;
    for (double x : r) var += (x - mean) * (x - mean) / (r.size() - 1);
    EXPECT_GE(std::sqrt(var), 0.008);
    EXPECT_LE(std::sqrt(var), 0.012);
}

TEST(Measure, GaussianStream) {
    double s = 0, s2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double g = gaussian(9, i);
        s += g;
        s2 += g * g;
    }
    EXPECT_NEAR(s / n, 0.0, 0.02);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
    EXPECT_EQ(gaussian(5, 17), gaussian(5, 17));
    EXPECT_NE(gaussian(5, 17), gaussian(6, 17));
}

TEST(Measure, RejectsBadTimes) {
    const auto c = test1();
    const std::vector<Boundary> sides{Boundary::Right};
    const std::vector<double> early{5e-4, 1.0};
    const std::vector<double> unsorted{1.0, 0.5};
    EXPECT_THROW(measure(c, early, sides, 0.0, 1), DomainError);
    EXPECT_THROW(measure(c, unsorted, sides, 0.0, 1), DomainError);
    const std::vector<double> ok{1.0};
    EXPECT_THROW(measure(c, ok, sides, -1.0, 1), DomainError);
}

TEST(Measure, SampleTimesDropEarlyPoints) {
    const auto t = sample_times(0.0, 4.0, 200);
    EXPECT_EQ(t.size(), 199u);
    EXPECT_NEAR(t.front(), 4.0 / 199.0, 1e-15);
    EXPECT_DOUBLE_EQ(t.back(), 4.0);
    EXPECT_EQ(sample_times(1.99, 1.99, 1).size(), 1u);
}

TEST(Measure, CsvLayout) {
    Measurement m;
    m.samples = {{0.5, Boundary::Left, 1.0, -2.0}, {1.0 / 3.0, Boundary::Right, 0.1, 2.5e-20}};
    std::ostringstream out;
    write_csv(out, m);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,side,du,dv");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 6), "0.5,0,");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 21), "0.33333333333333331,1");
}
