#include "degenflux/bessel.hpp"
#include "degenflux/error.hpp"
#include "series_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace degenflux;
using bessel::BesselOrder;

namespace {

constexpr double kPi = std::numbers::pi;

double J(double nu, double z) { return bessel::j(BesselOrder(nu), z); }

}  // namespace

TEST(BesselJ, ValuesAtOrigin) {
    EXPECT_EQ(J(0.0, 0.0), 1.0);
    EXPECT_EQ(J(1.0, 0.0), 0.0);
    EXPECT_EQ(J(2.5, 0.0), 0.0);
}

TEST(BesselJ, HalfOrderVanishesAtPi) {
    // J_{1/2}(z) = sqrt(2/(pi z)) sin z
    EXPECT_LE(std::fabs(J(0.5, kPi)), 1e-12);
    for (double z : {0.3, 1.7, 5.5, 11.9, 12.1, 25.0, 47.3, 180.0})
        EXPECT_NEAR(J(0.5, z), std::sqrt(2.0 / (kPi * z)) * std::sin(z), 1e-14) << z;
}

TEST(BesselJ, FirstZeroOfJ0) {
    const double z = static_cast<double>(oracle::bisect_zero(0.0L, 2.0L, 3.0L));
    EXPECT_NEAR(z, 2.404825557695773, 1e-14);
    EXPECT_LE(std::fabs(J(0.0, 2.404825557695773)), 1e-10);
}

TEST(BesselJ, MatchesBoostUpToSixtiethZero) {
    for (double nu : {0.0, 0.25, 3.0 / 7.0, 0.5, 1.0, 1.5, 5.0 / 3.0, 3.0, 9.0}) {
        const double zmax = boost::math::cyl_bessel_j_zero(nu, 60);
        double worst = 0.0;
        for (double z = 0.0; z <= zmax; z += 0.0173) {
            const double ref = boost::math::cyl_bessel_j(nu, z);
            worst = std::max(worst, std::fabs(J(nu, z) - ref));
        }
        EXPECT_LE(worst, 1e-12) << "nu=" << nu;
    }
}

TEST(BesselJ, MatchesLongDoubleSeriesBelowTwenty) {
    for (double nu : {0.0, 0.5, 1.0, 2.0 / 3.0}) {
        for (double z = 0.05; z < 20.0; z += 0.37) {
            const double ref = static_cast<double>(oracle::series_j(nu, z));
            EXPECT_NEAR(J(nu, z), ref, 1e-12) << nu << ' ' << z;
        }
    }
}

TEST(BesselJ, RejectsBadArguments) {
    EXPECT_THROW(J(0.0, -1e-3), DomainError);
    EXPECT_THROW(BesselOrder(-0.5), DomainError);
    EXPECT_THROW(BesselOrder(std::nan("")), DomainError);
    EXPECT_THROW(J(0.0, 1e7), NumericalError);
}

TEST(BesselJPrime, SmallArgument) {
    const double d = bessel::j_prime(BesselOrder(0.0), 1e-6);
    EXPECT_GE(d, -5.1e-7);
    EXPECT_LE(d, -4.9e-7);
}

TEST(BesselJPrime, AtFirstZeros) {
    const long double h = 1e-6L;
    for (auto [nu, z] : {std::pair{0.0, 2.404825557695773}, std::pair{1.0, 3.831705970207512}}) {
        const long double fd =
            (oracle::series_j(nu, z + h) - oracle::series_j(nu, z - h)) / (2.0L * h);
        EXPECT_NEAR(bessel::j_prime(BesselOrder(nu), z), static_cast<double>(fd), 1e-9) << nu;
    }
    EXPECT_NEAR(bessel::j_prime(BesselOrder(0.0), 2.404825557695773), -0.519147, 1e-6);
    EXPECT_NEAR(bessel::j_prime(BesselOrder(1.0), 3.831705970207512), -0.402759, 1e-6);
}

TEST(BesselJPrime, AgreesWithCentralDifference) {
    for (double nu : {0.0, 0.5, 1.0, 1.5, 3.0}) {
        for (double z : {0.7, 4.4, 11.0, 13.0, 29.0, 55.0}) {
            const double h = 1e-5;
            const double fd = (J(nu, z + h) - J(nu, z - h)) / (2.0 * h);
            EXPECT_NEAR(bessel::j_prime(BesselOrder(nu), z), fd, 1e-8) << nu << ' ' << z;
        }
    }
}

TEST(BesselJPrime, Origin) {
    EXPECT_EQ(bessel::j_prime(BesselOrder(1.0), 0.0), 0.5);
    EXPECT_EQ(bessel::j_prime(BesselOrder(2.0), 0.0), 0.0);
    EXPECT_THROW(bessel::j_prime(BesselOrder(0.0), 0.0), DomainError);
    EXPECT_THROW(bessel::j_prime(BesselOrder(0.5), 0.0), DomainError);
}

TEST(BesselZeros, HalfOrderIsMultiplesOfPi) {
    const auto t = bessel::zeros(BesselOrder(0.5), 20);
    ASSERT_EQ(t.size(), 20u);
    for (std::size_t n = 0; n < 20; ++n) EXPECT_NEAR(t[n], (n + 1) * kPi, 1e-12) << n;
}

TEST(BesselZeros, FirstZerosAgainstBisection) {
    EXPECT_NEAR(bessel::zeros(BesselOrder(0.0), 1)[0],
                static_cast<double>(oracle::bisect_zero(0.0L, 2.0L, 3.0L)), 1e-10);
    EXPECT_NEAR(bessel::zeros(BesselOrder(1.0), 1)[0],
                static_cast<double>(oracle::bisect_zero(1.0L, 3.5L, 4.0L)), 1e-10);
    EXPECT_NEAR(bessel::zeros(BesselOrder(1.0), 1)[0], 3.831705970207512, 1e-10);
}

TEST(BesselZeros, MatchBoostAndVanish) {
    for (double nu : {0.0, 0.25, 0.5, 1.0, 5.0 / 3.0, 3.0, 9.0, 40.0}) {
        const auto t = bessel::zeros(BesselOrder(nu), 50);
        for (std::size_t n = 0; n < t.size(); ++n) {
            const double ref = boost::math::cyl_bessel_j_zero(nu, static_cast<int>(n + 1));
            EXPECT_NEAR(t[n], ref, 1e-12 * ref) << nu << ' ' << n;
            EXPECT_LE(std::fabs(J(nu, t[n])), 1e-12);
            if (n > 0) EXPECT_GT(t[n], t[n - 1]);
        }
    }
}

TEST(BesselZeros, InterlacingBounds) {
    for (double nu : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 5.0 / 3.0, 3.0, 9.0}) {
        const auto t = bessel::zeros(BesselOrder(nu), 50);
        for (std::size_t n = 1; n <= 50; ++n) {
            const double z = t[n - 1];
            const double slack = 1e-12 * z;  // bounds coincide at nu = 1/2
            EXPECT_GE(z, bessel::ZeroTable::lower_bound(nu, n) - slack) << nu << ' ' << n;
            EXPECT_LE(z, bessel::ZeroTable::upper_bound(nu, n) + slack) << nu << ' ' << n;
        }
    }
}

TEST(BesselZeros, CacheSharesTables) {
    const auto a = bessel::cached_zeros(1.0, 40);
    const auto b = bessel::cached_zeros(1.0, 40);
    EXPECT_EQ(a.get(), b.get());
    EXPECT_THROW(bessel::zeros(BesselOrder(1.0), 0), DomainError);
}

TEST(BesselProperties, ShiftedRecurrence) {
    // J_{m-1} + J_{m+1} = (2m/z) J_m with m = nu + 1 keeps every order >= 0.
    for (double nu : {0.0, 0.25, 0.5, 1.0, 1.5, 3.0}) {
        for (double z = 0.05; z <= 40.0; z += 0.05) {
            const double m = nu + 1.0;
            const double r = J(m - 1.0, z) + J(m + 1.0, z) - 2.0 * m / z * J(m, z);
            ASSERT_LE(std::fabs(r), 1e-10) << nu << ' ' << z;
        }
    }
    for (double nu : {1.0, 1.5, 3.0}) {
        for (double z = 0.05; z <= 40.0; z += 0.05) {
            const double r = J(nu - 1.0, z) + J(nu + 1.0, z) - 2.0 * nu / z * J(nu, z);
            ASSERT_LE(std::fabs(r), 1e-10) << nu << ' ' << z;
        }
    }
}

TEST(BesselProperties, Bounded) {
    for (double nu : {0.0, 0.3, 0.5, 1.0, 2.5, 7.0})
        for (double z = 0.0; z <= 200.0; z += 0.011) ASSERT_LE(std::fabs(J(nu, z)), 1.0 + 1e-12) << nu << ' ' << z;
}

TEST(BesselProperties, DerivativeOfPowerTimesJ) {
    // d/dz (z^nu J_nu) = z^nu J_{nu-1}
    for (double nu : {1.0, 1.5, 5.0 / 3.0, 3.0}) {
        for (double z = 0.5; z <= 40.0; z += 0.5) {
            const double h = 1e-5;
            auto f = [&](double s) { return std::pow(s, nu) * J(nu, s); };
            const double fd = (f(z + h) - f(z - h)) / (2.0 * h);
            const double exact = std::pow(z, nu) * J(nu - 1.0, z);
            ASSERT_LE(std::fabs(fd - exact), 1e-7 * std::max(1.0, std::pow(z, nu))) << nu << ' ' << z;
        }
    }
}

TEST(BesselProperties, WeightedIntegralIdentity) {
    using boost::math::quadrature::gauss_kronrod;
    for (double nu : {0.0, 0.5, 1.0, 5.0 / 3.0}) {
        const auto t = bessel::zeros(BesselOrder(nu), 10);
        for (std::size_t n = 0; n < 10; ++n) {
            const double jn = t[n];
            auto f = [&](double s) { return std::pow(s, nu + 1.0) * J(nu, s); };
            const double integral = gauss_kronrod<double, 61>::integrate(f, 0.0, jn, 15, 1e-12);
            const double closed = -std::pow(jn, nu + 1.0) * bessel::j_prime(BesselOrder(nu), jn);
            EXPECT_NEAR(integral / closed, 1.0, 1e-8) << nu << ' ' << n;
        }
    }
}

TEST(Gamma, KnownValues) {
    EXPECT_DOUBLE_EQ(bessel::gamma(1.0), 1.0);
    EXPECT_NEAR(bessel::gamma(0.5), std::sqrt(kPi), 1e-15);
    EXPECT_NEAR(bessel::gamma(5.0), 24.0, 1e-13);
    for (double x : {0.1, 0.9, 2.5, 17.3, 60.0, 79.9})
        EXPECT_NEAR(bessel::gamma(x) / boost::math::tgamma(x), 1.0, 1e-13) << x;
    for (double x : {0.2, 3.0, 120.0, 170.5, 250.0, 1e4})
        EXPECT_NEAR(bessel::log_gamma(x), boost::math::lgamma(x), 1e-12 * std::max(1.0, std::fabs(boost::math::lgamma(x))))
            << x;
    EXPECT_THROW(bessel::gamma(0.0), DomainError);
    EXPECT_THROW(bessel::gamma(200.0), NumericalError);
}
