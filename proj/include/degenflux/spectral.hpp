#pragma once

#include "degenflux/bessel.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace degenflux {

/// Degeneracy exponent theta in [1, 2) together with the induced Bessel order
/// nu = (theta-1)/(2-theta) and scaling k = (2-theta)/2. 1/(2k) = nu + 1.
class DegeneracyExponent {
public:
    explicit DegeneracyExponent(double theta);

    double theta() const noexcept { return theta_; }
    double nu() const noexcept { return nu_; }
    double k() const noexcept { return k_; }

private:
    double theta_;
    double nu_;
    double k_;
};

/// Which sub-interval of (0,1) a basis lives on. The two sub-problems are
/// independent: the weighted flux |x-a|^theta u_x vanishes at x = a.
enum class Side { Left, Right };

/// Eigen-decomposition of -(|x-a|^theta phi')' on (0,a) or (a,1), Dirichlet at
/// the outer boundary. Mode index n is 0-based throughout (n = 0 is the
/// fundamental mode, zero j_{nu,1}).
///
/// Eigenfunctions are normalised in L2 of the sub-interval:
///   phi_n(x) = sqrt(2k / L) / |J'_nu(j_n)| * y^{(1-theta)/2} J_nu(j_n y^k),
/// y = |x-a| / L, L = 1-a (right) or a (left).
class SpectralBasis {
public:
    SpectralBasis(Side side, double a, DegeneracyExponent exponent,
                  std::shared_ptr<const bessel::ZeroTable> zeros);

    Side side() const noexcept { return side_; }
    double a() const noexcept { return a_; }
    const DegeneracyExponent& exponent() const noexcept { return exponent_; }
    std::size_t modes() const noexcept { return eigenvalues_.size(); }

    /// Sub-interval length L.
    double length() const noexcept { return side_ == Side::Right ? 1.0 - a_ : a_; }

    double zero(std::size_t n) const { return (*zeros_)[n]; }
    const bessel::ZeroTable& zero_table() const noexcept { return *zeros_; }

    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
    /// J'_nu(j_n)
    std::span<const double> jprime() const noexcept { return jprime_; }
    /// d_n = J'_nu(j_n) j_n^{1/(2k)}
    std::span<const double> d_consts() const noexcept { return d_; }
    /// h_n = J'_nu(j_n)^2 j_n^{1+1/(2k)}
    std::span<const double> h_consts() const noexcept { return h_; }

    bool contains(double x) const noexcept;

    /// y = |x-a|/L in [0,1] for x in the closed sub-interval.
    double mapped(double x) const noexcept;

    /// Unnormalised kernel G_n = y^{(1-theta)/2} J_nu(j_n y^k), extended
    /// continuously at y = 0 by (j_n/2)^nu / Gamma(nu+1).
    double kernel(std::size_t n, double y) const;

private:
    Side side_;
    double a_;
    DegeneracyExponent exponent_;
    std::shared_ptr<const bessel::ZeroTable> zeros_;
    std::vector<double> eigenvalues_;
    std::vector<double> jprime_;
    std::vector<double> d_;
    std::vector<double> h_;
};

inline constexpr std::size_t kDefaultModes = 40;

SpectralBasis build_basis(Side side, double a, double theta, std::size_t modes = kDefaultModes);

/// Normalised eigenfunction phi_n(x); x in the closed sub-interval. At x = a
/// the value is the one-sided limit.
double eigenfunction(const SpectralBasis& basis, std::size_t n, double x);

}  // namespace degenflux
