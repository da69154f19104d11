#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "spc/fr_spc.hpp"
#include "spc/smoothness.hpp"
#include "spc/tensor.hpp"

namespace spc {

/// The switching criterion is written with a strict "<" in one place and "<="
/// in another in common usage; Strict is the default.
enum class SwitchComparison { Strict, OrEqual };

enum class SpcStopReason { FitReached, MaxRank, MaxIterations };

const char* to_string(SpcStopReason reason);

struct SpcConfig {
    int p = 2;  // 1 = TV smoothing, 2 = QV smoothing
    std::vector<double> rho;
    std::vector<SmoothnessOperator> operators;
    double sdr_db = 25.0;        // target signal-to-distortion ratio for the fit bound
    double nu = 0.01;            // switching threshold on the convergence speed
    SwitchComparison comparison = SwitchComparison::Strict;
    int max_rank = 3000;
    long max_iterations = 100000;
    std::uint64_t seed = 0;
    SphereStepPolicy step;
    // Used only by spc_solve_simple, which restarts a full fixed-rank solve per rank.
    double fr_sweep_tol = 1e-6;
    int fr_max_sweeps = 500;
    std::function<void(const FrSpcState&)> on_iteration;  // called after every outer iteration
};

struct SpcIterationRecord {
    long iter = 0;
    double mu = 0.0;  // ||residual||^2 restricted to observed entries
    int rank = 0;
    bool switched = false;
};

struct SpcTrace {
    std::vector<SpcIterationRecord> records;
    int final_rank = 0;
    SpcStopReason reason = SpcStopReason::FitReached;
    double error_bound = 0.0;
    std::size_t zero_contraction_events = 0;
};

struct SpcResult {
    DenseTensor x;
    DenseTensor z;
    FactorModel model;
    SpcTrace trace;
};

/// Fit bound eps = 10^(-sdr_db/10) * sum_observed data^2.
double error_bound(double sdr_db, const DenseTensor& data, const Mask& mask);

/// True when |mu_prev - mu_next| / |mu_next - eps| falls below nu, i.e. the
/// fit is converging too slowly for the current rank. mu_next == eps is a
/// reached fit, never a switch.
bool switching_check(double mu_prev, double mu_next, double eps, double nu,
                     SwitchComparison comparison = SwitchComparison::Strict);

/// Rank-increasing completion: starts from a rank-1 model on the mean-filled
/// tensor and appends one greedy component whenever the switching criterion
/// fires, until the fit bound, max_rank, or max_iterations is hit.
SpcResult spc_solve(const DenseTensor& data, const Mask& mask, const SpcConfig& config);

/// Reference rank search: restarts a full fixed-rank solve at R = 1, 2, ...
/// until the fit bound is satisfied. Slow by construction; kept for testing
/// and cross-checks against spc_solve.
SpcResult spc_solve_simple(const DenseTensor& data, const Mask& mask, const SpcConfig& config);

}  // namespace spc
