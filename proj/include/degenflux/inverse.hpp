#pragma once

#include "degenflux/forward.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace degenflux {

/// Least-squares functionals. Parameter layouts:
///   J, I   [a]
///   G      [a, u0, v0]          constant data
///   H, M   [a, u01, u02]        u0 = u01 on (0,a), u02 on (a,1)
///   K      [a, u02]             u01 held at the fixed config's value
/// J uses one sample time, the others integrate over the sample grid. I fits
/// only du at x = 1; H fits both components on both sides; the rest fit both
/// components at x = 1.
enum class ObjectiveKind { PointJ, DistributedI, DistributedG, TwoSidedH, OneSidedM, FixedLeftK };

std::string_view kind_name(ObjectiveKind kind) noexcept;  // "J", "I", ...
ObjectiveKind parse_kind(std::string_view name);

std::size_t parameter_count(ObjectiveKind kind) noexcept;
std::vector<Boundary> observed_sides(ObjectiveKind kind);

/// Candidate problem: `fixed` with the parameters substituted. Data kinds
/// that carry v keep the v values of `fixed` on each side.
ProblemConfig apply_parameters(ObjectiveKind kind, const ProblemConfig& fixed, std::span<const double> params);

/// Inverse of apply_parameters for configs of the matching shape.
std::vector<double> extract_parameters(ObjectiveKind kind, const ProblemConfig& config);

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::PointJ;
    Measurement target;
    ProblemConfig fixed;
};

/// 1/2 sum over channels of the squared misfit, trapezoid-weighted in t.
double objective_eval(const ObjectiveSpec& spec, std::span<const double> params);

/// Default margin keeping a away from the end points.
inline constexpr double kBoxMargin = 0.02;

struct AdmissibleBox {
    std::vector<double> lower;
    std::vector<double> upper;

    void validate(std::size_t dimension) const;
    bool contains(std::span<const double> x) const;
    double width(std::size_t i) const { return upper[i] - lower[i]; }
};

/// a in [margin, 1-margin], data parameters in [data_lo, data_hi].
AdmissibleBox default_box(ObjectiveKind kind, double margin = kBoxMargin, double data_lo = -10.0,
                          double data_hi = 10.0);

enum class Optimizer { NelderMead, ProjectedBfgs };

struct ReconstructOptions {
    Optimizer optimizer = Optimizer::NelderMead;
    int restarts = 3;
    std::size_t max_evaluations = 400;  // per run
    double xtol = 1e-12;
    double flat_fraction = 0.1;
};

enum class Status { Converged, IterationCap, FlatDirection };

struct TraceEntry {
    std::size_t iteration;
    std::vector<double> params;
    double cost;
};

struct ReconstructionResult {
    std::vector<double> params;
    double cost = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    std::vector<TraceEntry> trace;
    Status status = Status::Converged;
    std::vector<std::size_t> flat;  // indices, set with FlatDirection
    /// Confidence half-width per coordinate from the closing quadratic fit.
    std::vector<double> half_width;
};

std::string status_name(const ReconstructionResult& r);

/// Box-constrained minimisation of objective_eval from `init`. Throws
/// DomainError when init is outside the box; optimizer trouble is reported
/// through the status only.
ReconstructionResult reconstruct(const ObjectiveSpec& spec, const AdmissibleBox& box, std::span<const double> init,
                                 const ReconstructOptions& options = {});

/// {kind, params, cost, iterations, status, flat, trace?}
void write_result_json(std::ostream& out, ObjectiveKind kind, const ReconstructionResult& r, bool with_trace);

/// CSV `iteration,cost,p0,p1,...`.
void write_trace_csv(std::ostream& out, const ReconstructionResult& r);

struct NoiseRow {
    double percent;
    std::uint64_t seed;
    double cost;
    std::size_t iterations;
    double a_c;
};

/// For every (percent, seed): measure `truth` at `times` on the sides the
/// kind observes, then reconstruct from `init`.
std::vector<NoiseRow> noise_study(ObjectiveKind kind, const ProblemConfig& truth, std::span<const double> times,
                                  const AdmissibleBox& box, std::span<const double> init,
                                  std::span<const double> percents, std::span<const std::uint64_t> seeds,
                                  const ReconstructOptions& options = {});

/// CSV `percent,cost,iterations,a_c` (a `seed` column is appended when more
/// than one seed was run).
void write_noise_csv(std::ostream& out, std::span<const NoiseRow> rows);

}  // namespace degenflux
