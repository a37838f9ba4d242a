// analysis.hpp - evaluation of full protocol points through the analytic and
// brute-force paths, distillation-threshold and optimal-squeezing searches,
// and the deterministic parameter sweeps behind the figure datasets.

#pragma once

#include "psdist/params.hpp"
#include "psdist/table_io.hpp"

#include <limits>

namespace psdist::analysis {

enum class Path { Analytic, Oracle, Both };

Path parse_path(const std::string& s);
const char* path_name(Path p);

struct EvalOptions {
    FockCutoff cutoff{30};         // n_max = 0 picks the smallest adequate cutoff
    double eps_k = 1e-12;          // block-family tail rule
    int k_cap = 200;
    SeriesTolerance series{};
    double max_deficit = 1e-6;     // largest tolerated truncation tail
    double prob_floor = 1e-300;    // below this the heralding branch is empty
};

// n_max actually used for a given squeezing (resolves the n_max = 0 request)
int resolve_cutoff(const EvalOptions& opt, double lambda);

// error classification for exit codes: domain errors are bad requests,
// convergence errors are truncation/series failures
enum class PointError { None, Domain, Convergence };

// one evaluated grid point; NaN marks values the path does not produce
struct PointResult {
    ProtocolParams params;
    std::optional<DetectorModel> det;
    std::string path;  // what actually ran: "analytic", "oracle", or "both"
    double en_before = std::numeric_limits<double>::quiet_NaN();
    double en_after = std::numeric_limits<double>::quiet_NaN();
    double p_succ = std::numeric_limits<double>::quiet_NaN();
    double fidelity = std::numeric_limits<double>::quiet_NaN();
    // second-path values when both paths run
    double en_after_alt = std::numeric_limits<double>::quiet_NaN();
    double p_succ_alt = std::numeric_limits<double>::quiet_NaN();
    double fidelity_alt = std::numeric_limits<double>::quiet_NaN();
    double max_path_diff = std::numeric_limits<double>::quiet_NaN();
    long long k_used = -1;      // largest K of the block family, -1 if none built
    double tail_mass = std::numeric_limits<double>::quiet_NaN();
    long long cutoff = -1;      // oracle n_max, -1 when the oracle did not run
    double norm_deficit = std::numeric_limits<double>::quiet_NaN();
    std::string error;          // empty on success
    PointError error_kind = PointError::None;
};

// Evaluate one grid point. Threshold detectors and detector efficiency < 1
// have no analytic path and are routed to the oracle; the path field records
// what ran. Never throws: failures land in error/error_kind.
PointResult evaluate_point(const ProtocolParams& p, const std::optional<DetectorModel>& det,
                           Path path, const EvalOptions& opt = {});

struct BoundResult {
    double tl = std::numeric_limits<double>::quiet_NaN();
    std::string method;     // "closed-form" or "bisection"
    double bracket_lo = std::numeric_limits<double>::quiet_NaN();
    double bracket_hi = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    bool found = false;
    std::string note;       // "no distillation window", monotonicity warnings
};

// smallest tap transmittance at which subtraction still beats the input
// entanglement: verified bracket on a coarse grid, then bisection
BoundResult find_tl(double lambda, double eta, const DetectorModel& det,
                    const EvalOptions& opt = {});

struct LambdaOptResult {
    double lambda_opt = std::numeric_limits<double>::quiet_NaN();
    double en_max = std::numeric_limits<double>::quiet_NaN();
    bool plateau = false;   // objective flat over the coarse grid
    double plateau_lo = std::numeric_limits<double>::quiet_NaN();
    double plateau_hi = std::numeric_limits<double>::quiet_NaN();
};

// squeezing that maximizes the distilled entanglement at fixed eta, t:
// 64-point coarse grid, then golden-section to 1e-5 (ties toward smaller
// lambda)
LambdaOptResult find_lambda_opt(double eta, double t, const DetectorModel& det,
                                const EvalOptions& opt = {});

struct SweepSpec {
    std::vector<double> lambdas;
    std::vector<double> etas;
    std::vector<double> ts;
    // nullopt = no subtraction (the "before" state)
    std::vector<std::optional<DetectorModel>> detectors;
    Path path = Path::Analytic;
    EvalOptions options{};

    void validate() const;
};

// all grid points in a fixed order (detector, eta, t, lambda, innermost
// last); rows evaluate in parallel but assembly is ordered, so output bytes
// never depend on scheduling
std::vector<PointResult> sweep(const SweepSpec& spec);

// frozen column set shared by before/distill/fidelity/sweep tables
io::Table points_table(const std::vector<PointResult>& points);

// figure datasets; name is one of fig2, fig3, fig4, fig5, fig6, fig8
io::Table figure_table(const std::string& name, const EvalOptions& opt = {});

}  // namespace psdist::analysis
