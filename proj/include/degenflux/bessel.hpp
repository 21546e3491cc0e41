#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace degenflux::bessel {

/// Order of a Bessel function of the first kind. Finite and nonnegative.
class BesselOrder {
public:
    explicit BesselOrder(double nu);

    double value() const noexcept { return nu_; }

private:
    double nu_;
};

// Largest order and argument the evaluators accept.
inline constexpr double kMaxOrder = 150.0;
inline constexpr double kMaxArgument = 1.0e5;

/// Gamma function for real x in (0, 171].
double gamma(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// J_nu(z) for z >= 0.
///
/// Three regimes: ascending series (z <= 12), Miller backward recurrence
/// normalised by the Neumann-type sum (12 < z < asymptotic threshold), and
/// the Hankel large-argument expansion beyond max(30, nu^2/2).
double j(BesselOrder nu, double z);

/// J_nu and J_{nu+1} at the same argument, sharing one evaluation where the
/// regime allows it.
struct JPair {
    double j_nu;
    double j_nu1;
};
JPair j_pair(BesselOrder nu, double z);

/// J'_nu(z) = (nu/z) J_nu(z) - J_{nu+1}(z).
///
/// At z = 0 the value is J'_1(0) = 1/2 and 0 for nu > 1; any other nu < 1
/// is rejected.
double j_prime(BesselOrder nu, double z);

/// First N positive zeros of J_nu, strictly increasing.
class ZeroTable {
public:
    ZeroTable(double nu, std::vector<double> zeros);

    double nu() const noexcept { return nu_; }
    std::size_t size() const noexcept { return zeros_.size(); }
    double operator[](std::size_t i) const { return zeros_[i]; }
    std::span<const double> zeros() const noexcept { return zeros_; }

    /// Lower/upper bound on the n-th zero (1-based n) from the classical
    /// interlacing estimates; the pair switches at nu = 1/2.
    static double lower_bound(double nu, std::size_t n);
    static double upper_bound(double nu, std::size_t n);

private:
    double nu_;
    std::vector<double> zeros_;
};

/// Positive zeros of J_nu by safeguarded Newton iteration seeded with McMahon's
/// expansion. Each zero is bracketed by a forward sign-change scan from the
/// previous one, so no zero is skipped even when the bound intervals overlap
/// (large nu). Throws NumericalError if a bracket does not converge.
ZeroTable zeros(BesselOrder nu, std::size_t count);

/// Shared immutable table, computed once per (nu, count) and reused.
std::shared_ptr<const ZeroTable> cached_zeros(double nu, std::size_t count);

}  // namespace degenflux::bessel
