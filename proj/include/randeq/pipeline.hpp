// pipeline.hpp -- assembly of the full equilibrium pipeline.
//
// Glues the pieces together: expansion profiles and the hypothesis report,
// the equilibrium bundle (nu, lambda, h) over a position range, the
// three-route pressure estimate with its entropy companion, and the
// stability sweep. Long windows are processed in blocks so that reference
// measures never need to be stored for every position at once.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "randeq/hypotheses.hpp"
#include "randeq/thermo.hpp"
#include "randeq/transfer.hpp"

namespace randeq {

// ---------------------------------------------------------------------------
// Equilibrium bundle over a short position range

struct EquilibriumOptions {
    int positions = 8;
    int nu_depth = 18;
    int past_depth = 30;
    double anchor = 0.0;
    ConeParams cone;
};

inline EquilibriumData compute_equilibrium(const TransferContext& ctx,
                                           const EquilibriumOptions& opt) {
    if (opt.positions < 1)
        throw std::invalid_argument("compute_equilibrium: need at least one position");
    ReferenceSweep sweep = reference_sweep(ctx, 0, opt.positions, opt.nu_depth, opt.anchor);
    DensityPullback pull = density_pullback(ctx, 0, opt.past_depth, opt.cone, sweep.nu(0));
    std::vector<GridFunction> hs = density_roll(ctx, sweep, pull.h);

    EquilibriumData eq;
    eq.j_lo = 0;
    eq.j_hi = opt.positions;
    eq.nu_by_pos = std::move(sweep.nus);
    eq.lambda_by_pos.assign(sweep.lambdas.begin(), sweep.lambdas.end() - 1);
    eq.h_by_pos = std::move(hs);
    eq.R_bound = opt.cone.density_bound();
    eq.pressure = pressure_lambda(std::span<const double>(eq.lambda_by_pos), opt.positions);

    eq.residual_h = 0.0;
    for (int j = 0; j < opt.positions; ++j) {
        GridFunction img = apply_transfer(ctx, j, eq.h(j));
        img.scale(1.0 / eq.lambda(j));
        double r = 0.0;
        for (int i = 0; i < img.n; ++i)
            r = std::max(r, std::fabs(img[i] - eq.h(j + 1)[i]));
        eq.residual_h = std::max(eq.residual_h, r);
    }
    return eq;
}

// ---------------------------------------------------------------------------
// Long-window analysis: lambda sweep + streaming Rokhlin entropy

struct LongWindowOptions {
    int n = 1024;            // positions of the Birkhoff average
    int nu_depth = 18;
    int past_depth = 30;
    double anchor = 0.0;
    int block = 512;
    int entropy_samples = 10000;
    std::uint64_t seed = 0;
    ConeParams cone;
};

struct LongWindowResult {
    std::vector<double> lambdas;   // lambda_j, j in [0, n)
    double pressure = 0.0;
    EntropyEstimate entropy;
    double variational_gap = 0.0;  // |entropy + int phi dmu - pressure|
    double mean_phi = 0.0;         // MC companion of int phi dmu
};

inline LongWindowResult long_window_analysis(const TransferContext& ctx,
                                             const LongWindowOptions& opt) {
    int n = opt.n;
    if (n < 1) throw std::invalid_argument("long_window_analysis: n must be positive");
    int block = std::max(1, opt.block);

    // backward pass: lambdas everywhere, nu checkpoints at block boundaries
    std::vector<double> lambdas(static_cast<std::size_t>(n), 0.0);
    int nckpt = (n + block - 1) / block + 1;
    std::vector<std::vector<double>> ckpt(static_cast<std::size_t>(nckpt));
    std::vector<double> nu = reference_measure(ctx, n, opt.nu_depth, opt.anchor);
    std::vector<double> nu_at_n = nu;
    for (int j = n - 1; j >= 0; --j) {
        auto [img, mass] = adjoint_transfer(ctx, j, nu);
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw std::runtime_error("long_window_analysis: mass collapse at position " +
                                     std::to_string(j));
        for (double& v : img) v /= mass;
        lambdas[static_cast<std::size_t>(j)] = mass;
        nu = std::move(img);
        if (j % block == 0) ckpt[static_cast<std::size_t>(j / block)] = nu;
    }

    LongWindowResult out;
    out.lambdas = lambdas;
    out.pressure = pressure_lambda(std::span<const double>(lambdas), n);

    // forward pass: roll h block by block, recomputing nu inside each block
    DensityPullback pull = density_pullback(ctx, 0, opt.past_depth, opt.cone,
                                            ckpt[0]);
    GridFunction h = pull.h;

    double sum = 0.0, sumsq = 0.0, phisum = 0.0;
    long total_samples = 0;
    int S = opt.entropy_samples;
    int g = ctx.grid_n();

    int nblocks = (n + block - 1) / block;
    for (int b = 0; b < nblocks; ++b) {
        int jlo = b * block;
        int jhi = std::min(n, jlo + block);
        // recompute nu_j for j in [jlo, jhi] downward from the next checkpoint
        std::vector<std::vector<double>> nus(static_cast<std::size_t>(jhi - jlo + 1));
        if (jhi == n) {
            nus.back() = nu_at_n;
        } else {
            nus.back() = ckpt[static_cast<std::size_t>(jhi / block)];
        }
        for (int j = jhi - 1; j >= jlo; --j) {
            auto [img, mass] = adjoint_transfer(ctx, j, nus[static_cast<std::size_t>(j - jlo + 1)]);
            for (double& v : img) v /= mass;
            nus[static_cast<std::size_t>(j - jlo)] = std::move(img);
        }

        // roll h over the block, drawing entropy samples per position
        for (int j = jlo; j < jhi; ++j) {
            const auto& nuj = nus[static_cast<std::size_t>(j - jlo)];
            // normalize h against nu_j
            {
                double integral = weighted_sum(h, nuj);
                if (!(integral > 0.0))
                    throw std::runtime_error("long_window_analysis: bad density normalizer");
                h.scale(1.0 / integral);
            }
            GridFunction hnext = apply_transfer(ctx, j, h);
            {
                double integral = weighted_sum(hnext, nus[static_cast<std::size_t>(j - jlo + 1)]);
                hnext.scale(1.0 / integral);
            }

            int count_j = (S > j) ? (S - j - 1) / n + 1 : 0;
            if (count_j > 0) {
                auto mu = invariant_measure(h, nuj);
                std::vector<double> cdf(mu.size());
                double acc = 0.0;
                for (std::size_t i = 0; i < mu.size(); ++i) {
                    acc += mu[i];
                    cdf[i] = acc;
                }
                cdf.back() = 1.0;
                double lam = lambdas[static_cast<std::size_t>(j)];
                for (int k = 0; k < count_j; ++k) {
                    std::uint64_t sidx = static_cast<std::uint64_t>(j) +
                                         static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n);
                    double u = rng_uniform01(opt.seed, sidx);
                    int i = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) -
                                             cdf.begin());
                    if (i >= g) i = g - 1;
                    double u2 = rng_uniform01(opt.seed ^ 0x9E3779B97F4A7C15ULL, sidx);
                    double x = wrap01((i + (u2 - 0.5)) / g);
                    double hx = h.interp(x);
                    double fx = eval(ctx.map_at(j), x);
                    double hn = hnext.interp(fx);
                    if (!(hx > 0.0) || !(hn > 0.0))
                        throw std::runtime_error("long_window_analysis: density hit zero");
                    double phi = ctx.potential_at(j).value(x);
                    double v = std::log(lam) - phi + std::log(hn) - std::log(hx);
                    sum += v;
                    sumsq += v * v;
                    phisum += phi;
                    ++total_samples;
                }
            }
            h = std::move(hnext);
        }
    }

    if (total_samples > 0) {
        out.entropy.samples = static_cast<int>(total_samples);
        out.entropy.value = sum / total_samples;
        double var = std::max(0.0, sumsq / total_samples -
                                       out.entropy.value * out.entropy.value);
        out.entropy.std_error = std::sqrt(var / total_samples);
        out.mean_phi = phisum / total_samples;
        out.variational_gap = std::fabs(out.entropy.value + out.mean_phi - out.pressure);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pressure estimate with all three routes

struct PressureOptions {
    int n = 1024;              // lambda-route Birkhoff length
    int separated_n = 12;
    double separated_eps = 0.25;
    int balls_N = 12;
    double balls_eps = 0.45;
    int refinement_steps = 2;  // eps-halving rows
    LongWindowOptions window;  // nu/entropy machinery
};

struct PressureResult {
    PressureEstimate estimate;
    LongWindowResult window;
};

inline PressureResult compute_pressure(const TransferContext& ctx,
                                       const PressureOptions& opt) {
    PressureResult out;
    LongWindowOptions w = opt.window;
    w.n = opt.n;
    out.window = long_window_analysis(ctx, w);

    PressureEstimate& est = out.estimate;
    est.lambda_route = out.window.pressure;
    est.n_used = opt.separated_n;
    est.eps_used = opt.separated_eps;
    est.balls_N = opt.balls_N;
    est.balls_eps = opt.balls_eps;
    est.separated_route = pressure_separated(ctx, opt.separated_n, opt.separated_eps);
    est.balls_route = pressure_balls(ctx, opt.balls_eps, opt.balls_N);
    double eps_s = opt.separated_eps;
    double eps_b = opt.balls_eps;
    for (int r = 0; r < opt.refinement_steps; ++r) {
        est.separated_refinement.emplace_back(eps_s,
                                              pressure_separated(ctx, opt.separated_n, eps_s));
        est.balls_refinement.emplace_back(eps_b, pressure_balls(ctx, eps_b, opt.balls_N));
        eps_s *= 0.5;
        eps_b *= 0.5;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stability sweep

struct StabilityOptions {
    std::vector<double> values;     // sweep parameter values, any order
    double reference = 0.0;
    EquilibriumOptions eq;
};

// family_of_s builds the fiber family and expansion-profile inputs for a
// parameter value; hypotheses are re-checked per value and failures mark
// the row rather than dropping it.
inline StabilityReport stability_sweep(
    const std::function<TransferContext(double)>& context_of_s,
    const std::function<HypothesisReport(const TransferContext&)>& check_of_s,
    const StabilityOptions& opt) {
    StabilityReport rep;
    rep.s_reference = opt.reference;

    TransferContext ref_ctx = context_of_s(opt.reference);
    EquilibriumData ref = compute_equilibrium(ref_ctx, opt.eq);

    std::vector<double> values = opt.values;
    std::sort(values.begin(), values.end(), [&](double a, double b) {
        return std::fabs(a - opt.reference) > std::fabs(b - opt.reference);
    });

    for (double s : values) {
        StabilityRow row;
        row.s = s;
        TransferContext ctx = context_of_s(s);
        HypothesisReport hyp = check_of_s(ctx);
        row.hypotheses_passed = hyp.all_pass();
        EquilibriumData eq = compute_equilibrium(ctx, opt.eq);
        for (int j = 0; j < eq.positions(); ++j) {
            row.dlambda_sup = std::max(row.dlambda_sup,
                                       std::fabs(eq.lambda(j) - ref.lambda(j)));
            double dh = 0.0;
            for (int i = 0; i < eq.h(j).n; ++i)
                dh = std::max(dh, std::fabs(eq.h(j)[i] - ref.h(j)[i]));
            row.dh_sup = std::max(row.dh_sup, dh);
        }
        row.dpressure = std::fabs(eq.pressure - ref.pressure);
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace randeq
