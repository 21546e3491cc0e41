#include "degenflux/stability.hpp"

#include "degenflux/error.hpp"
#include "degenflux/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace degenflux {

void LipschitzData::validate() const {
    if (!(m1 >= 0.0 && m2 >= 0.0 && m3 >= 0.0 && m4 >= 0.0)) throw DomainError("sup norms must be >= 0");
    if (!(delta > 0.0)) throw DomainError("delta must be > 0");
    if (!(margin > 0.0)) throw DomainError("L must be > 0");
    if (!(tau >= 0.0 && tau < gamma && gamma < 1.0)) throw DomainError("need 0 <= tau < gamma < 1");
}

LipschitzData lipschitz_data(const InitialData& data, double delta, double margin, double tau, double gamma) {
    const ComponentPair v = data.sup_value();
    const ComponentPair s = data.sup_slope();
    LipschitzData lip{v.u, s.u, v.v, s.v, delta, margin, tau, gamma};
    lip.validate();
    return lip;
}

double flux_sensitivity(const ProblemConfig& config, double t) {
    const ComponentPair d = ForwardModel(config).flux_derivative(Boundary::Right, t);
    return std::hypot(d.u, d.v);
}

ScanResult stability_scan(const ProblemConfig& config, double tau, double gamma, double t, std::size_t grid) {
    if (grid < 2) throw DomainError("scan grid must have >= 2 points");
    if (!(tau > 0.0 && tau < gamma && gamma < 1.0)) throw DomainError("scan interval must satisfy 0 < tau < gamma < 1");

    ScanResult scan;
    scan.points.resize(grid);
    parallel_for(grid, [&](std::size_t i) {
        ProblemConfig c = config;
        c.a = tau + (gamma - tau) * static_cast<double>(i) / static_cast<double>(grid - 1);
        scan.points[i] = {c.a, flux_sensitivity(c, t)};
    });

    scan.min = std::numeric_limits<double>::infinity();
    for (const auto& p : scan.points) {
        if (!std::isfinite(p.d)) throw NumericalError("stability scan produced a non-finite sensitivity");
        if (p.d < scan.min) {
            scan.min = p.d;
            scan.argmin = p.a;
        }
        scan.max = std::max(scan.max, p.d);
    }
    return scan;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    out << "a,D\n" << std::setprecision(17);
    for (const auto& p : scan.points) out << p.a << ',' << p.d << '\n';
}

double waiting_time_bound(const LipschitzData& lip, double theta) {
    lip.validate();
    const DegeneracyExponent e(theta);
    const double nu = e.nu();
    const double k = e.k();
    const double j1 = bessel::cached_zeros(nu, 1)->operator[](0);
    const double jp = bessel::j_prime(bessel::BesselOrder(nu), j1);
    const double slope2 = lip.m2 * lip.m2 + lip.m4 * lip.m4;
    const double root = std::sqrt(lip.margin * lip.margin + std::pow(j1, 2.0 * (nu + 1.0)) * jp * jp * slope2);
    return root / (std::sqrt(2.0) * k * k * k * j1 * j1 * lip.delta);
}

}  // namespace degenflux
