#pragma once

#include "degenflux/forward.hpp"
#include "degenflux/inverse.hpp"
#include "degenflux/stability.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace degenflux::app {

/// Everything one experiment needs, read from an INI document.
///
/// [problem]      theta, a, alpha, beta
/// [initial]      kind = constant | piecewise | tabulated
///                u, v | u_left, u_right, v_left, v_right | file (CSV x,u,v)
/// [series]       modes, tol, quadrature
/// [measurement]  sides (0, 1 or 0,1), t_star or t1/t2/samples,
///                noise_percent, seed, target (CSV t,side,du,dv)
/// [inverse]      kind (J I G H M K), init, lower, upper, margin,
///                optimizer (nelder-mead | bfgs), restarts, max_evaluations, xtol
/// [scan]         tau, gamma, times, grid, threshold
/// [forward]      nx, times
/// [noise]        percents, seeds
/// [output]       dir
/// Lists are comma separated. Unknown sections or keys are rejected. Data
/// files resolve against the config's directory, output.dir against the
/// working directory.
struct ExperimentConfig {
    ProblemConfig problem;

    struct MeasurementSection {
        std::vector<Boundary> sides{Boundary::Right};
        std::optional<double> t_star;
        double t1 = 0.0;
        double t2 = 4.0;
        std::size_t samples = 200;
        double noise_percent = 0.0;
        std::uint64_t seed = 1;
        std::optional<std::filesystem::path> target;
    } measurement;

    struct InverseSection {
        ObjectiveKind kind = ObjectiveKind::PointJ;
        std::vector<double> init;
        AdmissibleBox box;
        ReconstructOptions options;
    } inverse;

    struct ScanSection {
        double tau = 0.1;
        double gamma = 0.8;
        std::vector<double> times{0.7, 1.5};
        std::size_t grid = 141;
        double threshold = kVanishingRatio;
    } scan;

    struct ForwardSection {
        std::size_t nx = 51;
        std::vector<double> times{1.0};
    } forward;

    struct NoiseSection {
        std::vector<double> percents{1.0, 0.1, 0.01, 0.0};
        std::vector<std::uint64_t> seeds{1};
    } noise;

    std::filesystem::path output_dir = ".";

    /// t_star alone, or the uniform grid on [t1, t2] without t < t_min.
    std::vector<double> times() const;
};

/// Throws DomainError with the offending key on any validation failure.
/// Relative file paths resolve against `base`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Reads CSV `t,side,du,dv`.
Measurement read_measurement(const std::filesystem::path& path);

/// Target of a reconstruction: the configured CSV, or a fresh measurement of
/// the configured problem on the sides the objective observes.
ObjectiveSpec objective_spec(const ExperimentConfig& config);

// Commands write into config.output_dir and return an exit code.
int cmd_forward(const ExperimentConfig& config, std::ostream& log);
int cmd_measure(const ExperimentConfig& config, std::ostream& log);
int cmd_scan_stability(const ExperimentConfig& config, std::ostream& log);
int cmd_reconstruct(const ExperimentConfig& config, std::ostream& log);
int cmd_noise_study(const ExperimentConfig& config, std::ostream& log);

enum class Fault { None, ZeroTable };
int cmd_selftest(Fault fault, std::ostream& log);

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Full command line: verb plus --config, --out, --seed, --threads.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace degenflux::app
