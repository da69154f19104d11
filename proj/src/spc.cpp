#include "spc/spc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace spc {

namespace {

void validate_inputs(const DenseTensor& data, const Mask& mask, const SpcConfig& config) {
    if (data.dims() != mask.dims())
        throw std::invalid_argument("data and mask extents do not match");
    if (mask.observed_count() == 0)
        throw std::invalid_argument("mask has no observed entries");
    if (!data.all_finite()) throw std::invalid_argument("data entries must be finite");
    if (config.p != 1 && config.p != 2)
        throw std::invalid_argument("penalty order p must be 1 or 2");
    if (!(config.nu > 0.0)) throw std::invalid_argument("switching threshold nu must be positive");
    if (!std::isfinite(config.sdr_db)) throw std::invalid_argument("target SDR must be finite");
    if (config.max_rank < 1) throw std::invalid_argument("max_rank must be at least 1");
    if (config.rho.size() != data.order() || config.operators.size() != data.order())
        throw std::invalid_argument("need one smoothing strength and operator per mode");
    for (std::size_t n = 0; n < data.order(); ++n) {
        if (config.rho[n] < 0.0)
            throw std::invalid_argument("smoothing strengths must be nonnegative");
        if (config.operators[n].input_size() != data.dim(n))
            throw std::invalid_argument("operator size does not match tensor mode");
    }
}

FrSpcConfig inner_config(const SpcConfig& config) {
    FrSpcConfig inner;
    inner.p = config.p;
    inner.rho = config.rho;
    inner.operators = config.operators;
    inner.step = config.step;
    inner.sweep_tol = config.fr_sweep_tol;
    inner.max_sweeps = config.fr_max_sweeps;
    return inner;
}

double observed_mean(const DenseTensor& data, const Mask& mask) {
    double sum = 0.0;
    std::size_t count = 0;
    const double* t = data.values().data();
    const std::uint8_t* f = mask.flags().data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (f[i] == 0) continue;
        sum += t[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

// Appends a random unit component fitted greedily along the residual, then
// re-restricts the residual to the observed entries.
void append_greedy_component(FrSpcState& state, std::mt19937_64& rng) {
    FactorModel& model = state.model;
    model.append_component();
    const int r = model.rank() - 1;
    randomize_component(model, r, rng);
    model.weight(r) = inner_with_rank1(state.residual, model.component(r));
    rank1_accumulate(state.residual, -model.weight(r), model.component(r));
    masked_fill(state.residual, 0.0, state.mask, MaskRegion::Unobserved);
}

SpcResult finish(FrSpcState&& state, const DenseTensor& data, SpcTrace&& trace) {
    SpcResult result;
    result.z = state.model.reconstruct();
    result.x = result.z;
    masked_overwrite(result.x, data, state.mask, MaskRegion::Observed);
    result.model = std::move(state.model);
    trace.final_rank = result.model.rank();
    result.trace = std::move(trace);
    return result;
}

}  // namespace

const char* to_string(SpcStopReason reason) {
    switch (reason) {
        case SpcStopReason::FitReached: return "fit-reached";
        case SpcStopReason::MaxRank: return "max-rank";
        case SpcStopReason::MaxIterations: return "max-iterations";
    }
    return "unknown";
}

double error_bound(double sdr_db, const DenseTensor& data, const Mask& mask) {
    if (data.dims() != mask.dims())
        throw std::invalid_argument("data and mask extents do not match");
    if (mask.observed_count() == 0)
        throw std::invalid_argument("mask has no observed entries");
    double energy = 0.0;
    const double* t = data.values().data();
    const std::uint8_t* f = mask.flags().data();
    for (std::size_t i = 0; i < data.size(); ++i)
        if (f[i] != 0) energy += t[i] * t[i];
    return std::pow(10.0, -sdr_db / 10.0) * energy;
}

bool switching_check(double mu_prev, double mu_next, double eps, double nu,
                     SwitchComparison comparison) {
    const double gap = std::abs(mu_next - eps);
    if (gap == 0.0) return false;  // the fit bound is reached; not a switch
    const double speed = std::abs(mu_prev - mu_next) / gap;
    return comparison == SwitchComparison::Strict ? speed < nu : speed <= nu;
}

SpcResult spc_solve(const DenseTensor& data, const Mask& mask, const SpcConfig& config) {
    validate_inputs(data, mask, config);
    const double eps = error_bound(config.sdr_db, data, mask);
    const FrSpcConfig sweep_config = inner_config(config);

    std::mt19937_64 rng(config.seed);
    FrSpcState state;
    state.mask = mask;
    state.x = DenseTensor(data.dims(), std::vector<double>(data.size(), observed_mean(data, mask)));
    masked_overwrite(state.x, data, mask, MaskRegion::Observed);

    state.model = FactorModel(data.dims(), 1);
    randomize_component(state.model, 0, rng);
    state.model.weight(0) = inner_with_rank1(state.x, state.model.component(0));

    state.residual = state.x;
    rank1_accumulate(state.residual, -state.model.weight(0), state.model.component(0));
    masked_fill(state.residual, 0.0, mask, MaskRegion::Unobserved);

    SpcTrace trace;
    trace.error_bound = eps;
    double mu = frobenius_norm_sq(state.residual);
    trace.records.push_back({0, mu, state.model.rank(), false});

    for (long t = 1;; ++t) {
        trace.zero_contraction_events += fr_spc_sweep(state, sweep_config);
        double mu_next = frobenius_norm_sq(state.residual);

        bool switched = false;
        if (mu_next > eps && switching_check(mu, mu_next, eps, config.nu, config.comparison)) {
            if (state.model.rank() >= config.max_rank) {
                trace.records.push_back({t, mu_next, state.model.rank(), false});
                trace.reason = SpcStopReason::MaxRank;
                if (config.on_iteration) config.on_iteration(state);
                return finish(std::move(state), data, std::move(trace));
            }
            append_greedy_component(state, rng);
            mu_next = frobenius_norm_sq(state.residual);
            switched = true;
        }

        mu = mu_next;
        trace.records.push_back({t, mu, state.model.rank(), switched});
        if (config.on_iteration) config.on_iteration(state);

        if (mu <= eps) {
            trace.reason = SpcStopReason::FitReached;
            break;
        }
        if (t >= config.max_iterations) {
            trace.reason = SpcStopReason::MaxIterations;
            break;
        }
    }
    return finish(std::move(state), data, std::move(trace));
}

SpcResult spc_solve_simple(const DenseTensor& data, const Mask& mask, const SpcConfig& config) {
    validate_inputs(data, mask, config);
    const double eps = error_bound(config.sdr_db, data, mask);
    FrSpcConfig inner = inner_config(config);

    SpcTrace trace;
    trace.error_bound = eps;

    FrSpcResult fit;
    long iters = 0;
    for (int rank = 1;; ++rank) {
        inner.rank = rank;
        inner.seed = config.seed + static_cast<std::uint64_t>(rank);
        fit = fr_spc_solve(data, mask, inner);
        iters += fit.sweeps;
        trace.zero_contraction_events += fit.zero_contraction_events;

        const double mu = fit.residual_trace.back();
        trace.records.push_back({iters, mu, rank, false});
        if (mu <= eps) {
            trace.reason = SpcStopReason::FitReached;
            break;
        }
        if (rank >= config.max_rank) {
            trace.reason = SpcStopReason::MaxRank;
            break;
        }
        if (iters >= config.max_iterations) {
            trace.reason = SpcStopReason::MaxIterations;
            break;
        }
    }

    SpcResult result;
    result.x = std::move(fit.x);
    result.z = std::move(fit.z);
    result.model = std::move(fit.model);
    trace.final_rank = result.model.rank();
    result.trace = std::move(trace);
    return result;
}

}  // namespace spc
