#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "spc/smoothness.hpp"
#include "spc/tensor.hpp"

namespace spc {

/// Rank-R polyadic model: per-component weights and one unit-norm column per
/// mode, Z = sum_r weight_r * col_r^(0) outer ... outer col_r^(N-1).
class FactorModel {
public:
    FactorModel() = default;
    explicit FactorModel(std::vector<std::size_t> dims, int rank = 0);

    int rank() const { return static_cast<int>(weights_.size()); }
    std::size_t order() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }

    double weight(int r) const { return weights_[static_cast<std::size_t>(r)]; }
    double& weight(int r) { return weights_[static_cast<std::size_t>(r)]; }
    std::span<const double> weights() const { return weights_; }

    std::span<const double> column(std::size_t mode, int r) const;
    std::span<double> column(std::size_t mode, int r);

    /// One column span per mode for component r.
    std::vector<std::span<const double>> component(int r) const;

    /// Adds a component with zero weight and zero columns; caller fills it in.
    void append_component();

    DenseTensor reconstruct() const;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> factors_;  // per mode, dims_[n] x rank column-major
};

/// Overwrites component r with standard normal draws normalized to unit
/// length, one column per mode. The weight is left untouched.
void randomize_component(FactorModel& model, int r, std::mt19937_64& rng);

/// Backtracking policy for the unit-sphere descent on one component vector.
struct SphereStepPolicy {
    double initial_alpha = 1.0;
    double shrink = 0.5;
    int max_backtracks = 30;
    int max_iterations = 50;
    double tolerance = 1e-8;  // relative objective change that stops the iteration
};

struct FrSpcState {
    DenseTensor x;         // completed estimate; observed entries always equal the data
    DenseTensor residual;  // data minus reconstruction on observed entries, zero elsewhere
    FactorModel model;
    Mask mask;
};

struct FrSpcConfig {
    int rank = 1;
    int p = 2;  // 1 = TV smoothing, 2 = QV smoothing
    std::vector<double> rho;                   // per-mode smoothing strength, >= 0
    std::vector<SmoothnessOperator> operators; // per-mode difference operator
    SphereStepPolicy step;
    double sweep_tol = 1e-6;  // relative change of ||residual||^2 that stops the outer loop
    int max_sweeps = 500;
    std::uint64_t seed = 0;
    std::function<void(const FrSpcState&)> on_sweep;  // called after every sweep
};

struct FrSpcResult {
    DenseTensor x;
    DenseTensor z;
    FactorModel model;
    std::vector<double> residual_trace;   // ||residual||^2 at start and after each sweep
    std::vector<double> objective_trace;  // full objective at start and after each sweep
    int sweeps = 0;
    bool converged = false;
    std::size_t zero_contraction_events = 0;
};

/// Simplified local objective for one component vector:
///   (g^2/2) rho ||L u||_p^p - g u^T y + (g^2/2) u^T u.
double local_objective(std::span<const double> u, std::span<const double> y, double g,
                       double rho_n, const SmoothnessOperator& op, int p);

/// (Sub)gradient of local_objective with respect to u.
void local_gradient(std::span<const double> u, std::span<const double> y, double g, double rho_n,
                    const SmoothnessOperator& op, int p, std::span<double> out);

/// One normalized descent step on the unit sphere:
///   u' = (u - alpha v) / sqrt(1 - 2 alpha u^T v + alpha^2 v^T v).
/// Returns false when the denominator degenerates (out is then unspecified),
/// which signals the caller to shrink alpha.
bool sphere_update_step(std::span<const double> u, std::span<const double> v, double alpha,
                        std::span<double> out);

/// Minimizes local_objective over the unit sphere by backtracked sphere steps.
/// The returned vector has unit norm and an objective no worse than u's.
std::vector<double> update_component_vector(std::span<const double> u, std::span<const double> y,
                                            double g, double rho_n, const SmoothnessOperator& op,
                                            int p, const SphereStepPolicy& policy);

/// Closed-form weight update
///   g = <Yr, u^(0) outer ... outer u^(N-1)> / (1 + sum_n rho_n ||L^(n) u^(n)||_p^p).
double update_weight(const DenseTensor& yr, const std::vector<std::span<const double>>& vectors,
                     std::span<const double> rho, std::span<const SmoothnessOperator> operators,
                     int p);

/// One full component cycle (every component, every mode, weight, residual).
/// Returns the number of zero-contraction events, where a component vector was
/// left unchanged because its contracted data vector vanished.
std::size_t fr_spc_sweep(FrSpcState& state, const FrSpcConfig& config);

/// Full objective evaluated fresh from the model:
///   0.5 sum_observed (data - Z)^2 + sum_r (g_r^2/2) sum_n rho_n ||L^(n) u_r^(n)||_p^p.
double spc_objective(const DenseTensor& data, const Mask& mask, const FactorModel& model,
                     std::span<const double> rho, std::span<const SmoothnessOperator> operators,
                     int p);

/// Fixed-rank smooth completion: seeded random unit columns, zero weights,
/// then sweeps until the relative change of ||residual||^2 drops below
/// sweep_tol or max_sweeps is reached.
FrSpcResult fr_spc_solve(const DenseTensor& data, const Mask& mask, const FrSpcConfig& config);

}  // namespace spc
