#pragma once

#include "degenflux/forward.hpp"

#include <iosfwd>
#include <vector>

namespace degenflux {

/// Inputs of the waiting-time bound: sup norms of the data and its slopes
/// (M1..M4), the lower bound delta on |(U1, V1)|, the target margin L, and the
/// compact interval [tau, gamma] the degeneracy point is confined to.
struct LipschitzData {
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    double delta = 1.0;
    double margin = 1.0;
    double tau = 0.1;
    double gamma = 0.9;

    void validate() const;
};

/// Sup norms of `data` with the given delta, margin and interval.
LipschitzData lipschitz_data(const InitialData& data, double delta, double margin, double tau, double gamma);

/// D(a, t) = |d/da flux at x = 1|.
double flux_sensitivity(const ProblemConfig& config, double t);

struct ScanPoint {
    double a;
    double d;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    double min = 0.0;
    double argmin = 0.0;
    double max = 0.0;

    /// min <= threshold * max with max > 0 counts as a near-vanishing point.
    bool vanishes(double threshold) const noexcept { return max > 0.0 ? min <= threshold * max : true; }
};

/// D on `grid` uniform points of [tau, gamma]; config.a is overwritten.
ScanResult stability_scan(const ProblemConfig& config, double tau, double gamma, double t, std::size_t grid);

/// Default near-vanishing threshold for scans.
inline constexpr double kVanishingRatio = 1e-2;

/// CSV `a,D`.
void write_scan_csv(std::ostream& out, const ScanResult& scan);

/// t-bar = sqrt(L^2 + j1^{2(nu+1)} J'(j1)^2 (M2^2 + M4^2)) / (sqrt(2) k^3 j1^2 delta).
double waiting_time_bound(const LipschitzData& lip, double theta);

}  // namespace degenflux
