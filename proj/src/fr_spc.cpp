#include "spc/fr_spc.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace spc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void validate_config(const DenseTensor& data, const Mask& mask, std::size_t order, int rank,
                     int p, std::span<const double> rho,
                     std::span<const SmoothnessOperator> operators) {
    if (data.dims() != mask.dims())
        throw std::invalid_argument("data and mask extents do not match");
    if (mask.observed_count() == 0)
        throw std::invalid_argument("mask has no observed entries");
    if (rank < 1) throw std::invalid_argument("rank must be at least 1");
    if (p != 1 && p != 2) throw std::invalid_argument("penalty order p must be 1 or 2");
    if (rho.size() != order || operators.size() != order)
        throw std::invalid_argument("need one smoothing strength and operator per mode");
    for (std::size_t n = 0; n < order; ++n) {
        if (rho[n] < 0.0) throw std::invalid_argument("smoothing strengths must be nonnegative");
        if (operators[n].input_size() != data.dim(n))
            throw std::invalid_argument("operator size does not match mode " + std::to_string(n));
    }
    if (!data.all_finite()) throw std::invalid_argument("data entries must be finite");
}

}  // namespace

FactorModel::FactorModel(std::vector<std::size_t> dims, int rank) : dims_(std::move(dims)) {
    factors_.resize(dims_.size());
    for (int r = 0; r < rank; ++r) append_component();
}

std::span<const double> FactorModel::column(std::size_t mode, int r) const {
    const std::size_t len = dims_[mode];
    return std::span<const double>(factors_[mode].data() + len * static_cast<std::size_t>(r), len);
}

std::span<double> FactorModel::column(std::size_t mode, int r) {
    const std::size_t len = dims_[mode];
    return std::span<double>(factors_[mode].data() + len * static_cast<std::size_t>(r), len);
}

std::vector<std::span<const double>> FactorModel::component(int r) const {
    std::vector<std::span<const double>> cols;
    cols.reserve(order());
    for (std::size_t n = 0; n < order(); ++n) cols.push_back(column(n, r));
    return cols;
}

void FactorModel::append_component() {
    weights_.push_back(0.0);
    for (std::size_t n = 0; n < dims_.size(); ++n)
        factors_[n].resize(factors_[n].size() + dims_[n], 0.0);
}

DenseTensor FactorModel::reconstruct() const {
    DenseTensor z(dims_);
    for (int r = 0; r < rank(); ++r) rank1_accumulate(z, weight(r), component(r));
    return z;
}

void randomize_component(FactorModel& model, int r, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t n = 0; n < model.order(); ++n) {
        auto col = model.column(n, r);
        double nrm = 0.0;
        while (nrm == 0.0) {  // an all-zero draw has measure zero but would poison everything
            for (double& x : col) x = normal(rng);
            nrm = norm(col);
        }
        for (double& x : col) x /= nrm;
    }
}

double local_objective(std::span<const double> u, std::span<const double> y, double g,
                       double rho_n, const SmoothnessOperator& op, int p) {
    const double smooth = rho_n > 0.0 ? op.penalty(u, p) : 0.0;
    return 0.5 * g * g * rho_n * smooth - g * dot(u, y) + 0.5 * g * g * dot(u, u);
}

void local_gradient(std::span<const double> u, std::span<const double> y, double g, double rho_n,
                    const SmoothnessOperator& op, int p, std::span<double> out) {
    if (rho_n > 0.0) {
        op.penalty_subgradient(u, p, out);
        const double scale = 0.5 * g * g * rho_n;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * out[i] - g * y[i] + g * g * u[i];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = g * g * u[i] - g * y[i];
    }
}

bool sphere_update_step(std::span<const double> u, std::span<const double> v, double alpha,
                        std::span<double> out) {
    // For unit u the denominator 1 - 2 alpha u^T v + alpha^2 v^T v equals
    // ||u - alpha v||^2; computing it as such keeps the iterate exactly on
    // the sphere instead of accumulating norm drift.
    double denom_sq = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double s = u[i] - alpha * v[i];
        out[i] = s;
        denom_sq += s * s;
    }
    if (!(denom_sq > 1e-30)) return false;
    const double inv = 1.0 / std::sqrt(denom_sq);
    for (double& x : out) x *= inv;
    return true;
}

std::vector<double> update_component_vector(std::span<const double> u, std::span<const double> y,
                                            double g, double rho_n, const SmoothnessOperator& op,
                                            int p, const SphereStepPolicy& policy) {
    std::vector<double> current(u.begin(), u.end());
    if (g == 0.0) return current;  // objective is constant in u

    std::vector<double> grad(u.size());
    std::vector<double> candidate(u.size());
    double f_current = local_objective(current, y, g, rho_n, op, p);

    // Sufficient-decrease constant. Accepting any plain decrease can latch
    // onto a mirror point across the sphere whose objective is lower by
    // mere rounding, stalling the descent there.
    constexpr double kArmijo = 1e-4;

    for (int it = 0; it < policy.max_iterations; ++it) {
        local_gradient(current, y, g, rho_n, op, p, grad);
        const double radial = dot(current, grad);
        const double tangent_sq = std::max(0.0, dot(grad, grad) - radial * radial);

        double alpha = policy.initial_alpha;
        bool accepted = false;
        double f_next = f_current;
        for (int bt = 0; bt <= policy.max_backtracks; ++bt) {
            if (sphere_update_step(current, grad, alpha, candidate)) {
                const double f = local_objective(candidate, y, g, rho_n, op, p);
                if (f <= f_current - kArmijo * alpha * tangent_sq) {
                    accepted = true;
                    f_next = f;
                    break;
                }
            }
            alpha *= policy.shrink;
        }
        if (!accepted) break;

        std::swap(current, candidate);
        const double change = std::abs(f_current - f_next);
        f_current = f_next;
        if (change <= policy.tolerance * std::max(std::abs(f_current), 1e-300)) break;
    }
    return current;
}

double update_weight(const DenseTensor& yr, const std::vector<std::span<const double>>& vectors,
                     std::span<const double> rho, std::span<const SmoothnessOperator> operators,
                     int p) {
    double denom = 1.0;
    for (std::size_t n = 0; n < operators.size(); ++n)
        if (rho[n] > 0.0) denom += rho[n] * operators[n].penalty(vectors[n], p);
    return inner_with_rank1(yr, vectors) / denom;
}

std::size_t fr_spc_sweep(FrSpcState& state, const FrSpcConfig& config) {
    FactorModel& model = state.model;
    const std::size_t order = model.order();
    std::size_t zero_contractions = 0;

    DenseTensor yr(model.dims());
    for (int r = 0; r < model.rank(); ++r) {
        // Yr <- residual + g_r * current rank-1 term
        yr = state.residual;
        rank1_accumulate(yr, model.weight(r), model.component(r));

        for (std::size_t n = 0; n < order; ++n) {
            std::vector<double> y = contract_all_but(yr, n, model.component(r));
            if (norm(y) == 0.0) {
                ++zero_contractions;
                continue;
            }
            std::vector<double> updated = update_component_vector(
                model.column(n, r), y, model.weight(r), config.rho[n], config.operators[n],
                config.p, config.step);
            auto col = model.column(n, r);
            for (std::size_t i = 0; i < col.size(); ++i) col[i] = updated[i];
        }

        model.weight(r) = update_weight(yr, model.component(r), config.rho, config.operators,
                                        config.p);

        state.residual = std::move(yr);
        rank1_accumulate(state.residual, -model.weight(r), model.component(r));
        masked_fill(state.residual, 0.0, state.mask, MaskRegion::Unobserved);
        yr = DenseTensor(model.dims());
    }
    return zero_contractions;
}

double spc_objective(const DenseTensor& data, const Mask& mask, const FactorModel& model,
                     std::span<const double> rho, std::span<const SmoothnessOperator> operators,
                     int p) {
    const DenseTensor z = model.reconstruct();
    const double* t = data.values().data();
    const double* zv = z.values().data();
    const std::uint8_t* f = mask.flags().data();

    double fit = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (f[i] == 0) continue;
        const double d = t[i] - zv[i];
        fit += d * d;
    }

    double smooth = 0.0;
    for (int r = 0; r < model.rank(); ++r) {
        double pen = 0.0;
        for (std::size_t n = 0; n < model.order(); ++n)
            if (rho[n] > 0.0) pen += rho[n] * operators[n].penalty(model.column(n, r), p);
        smooth += 0.5 * model.weight(r) * model.weight(r) * pen;
    }
    return 0.5 * fit + smooth;
}

FrSpcResult fr_spc_solve(const DenseTensor& data, const Mask& mask, const FrSpcConfig& config) {
    validate_config(data, mask, data.order(), config.rank, config.p, config.rho,
                    config.operators);

    std::mt19937_64 rng(config.seed);
    FrSpcState state;
    state.mask = mask;
    state.model = FactorModel(data.dims(), config.rank);
    for (int r = 0; r < config.rank; ++r) randomize_component(state.model, r, rng);

    // Weights start at zero, so the initial reconstruction is zero and the
    // first sweep's weight updates are fitted greedily from the data.
    state.x = DenseTensor(data.dims());
    masked_overwrite(state.x, data, mask, MaskRegion::Observed);
    state.residual = state.x;

    FrSpcResult result;
    result.residual_trace.push_back(frobenius_norm_sq(state.residual));
    result.objective_trace.push_back(
        spc_objective(data, mask, state.model, config.rho, config.operators, config.p));

    for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
        result.zero_contraction_events += fr_spc_sweep(state, config);
        ++result.sweeps;

        const double mu_prev = result.residual_trace.back();
        const double mu = frobenius_norm_sq(state.residual);
        result.residual_trace.push_back(mu);
        result.objective_trace.push_back(
            spc_objective(data, mask, state.model, config.rho, config.operators, config.p));
        if (config.on_sweep) config.on_sweep(state);

        if (std::abs(mu_prev - mu) <= config.sweep_tol * std::max(mu_prev, 1e-300)) {
            result.converged = true;
            break;
        }
    }

    result.z = state.model.reconstruct();
    state.x = result.z;
    masked_overwrite(state.x, data, mask, MaskRegion::Observed);
    result.x = std::move(state.x);
    result.model = std::move(state.model);
    return result;
}

}  // namespace spc
