// transfer.hpp -- the fiberwise Ruelle-Perron-Frobenius operator.
//
//   L_w(psi)(x) = sum over preimages y of x under f_w of e^{phi_w(y)} psi(y)
//
// plus the machinery built on it: the dual (adjoint) action on grid weight
// vectors, reference measures nu_w materialized from the preimage tree,
// eigenvalue estimates lambda_w, invariant densities h_w obtained by
// pulling the cone backward along the orbit, and the invariant family
// mu_w = h_w nu_w.
//
// Grid preimages and potential weights are cached per symbol at context
// construction; afterwards every operation is read-only and cheap.

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "randeq/base.hpp"
#include "randeq/cone.hpp"
#include "randeq/fiber.hpp"
#include "randeq/grid.hpp"

namespace randeq {

// ---------------------------------------------------------------------------
// TransferContext

class TransferContext {
public:
    TransferContext(FiberFamily family, BaseOrbit orbit, int grid_n,
                    double preimage_tol = 1e-12, int threads = 1)
        : family_(std::move(family)), orbit_(std::move(orbit)), grid_n_(grid_n),
          preimage_tol_(preimage_tol), threads_(threads) {
        family_.validate();
        for (int s : orbit_.symbols)
            if (s < 0 || s >= family_.symbols())
                throw std::invalid_argument("TransferContext: orbit symbol " +
                                            std::to_string(s) + " has no fiber map");
        build_caches();
    }

    const FiberFamily& family() const { return family_; }
    const BaseOrbit& orbit() const { return orbit_; }
    int grid_n() const { return grid_n_; }
    double preimage_tol() const { return preimage_tol_; }
    int threads() const { return threads_; }

    int symbol(int j) const { return orbit_.symbol_at(j); }
    const FiberMap& map_at(int j) const {
        return family_.maps[static_cast<std::size_t>(symbol(j))];
    }
    const PotentialFiber& potential_at(int j) const {
        return family_.potentials[static_cast<std::size_t>(symbol(j))];
    }

    // Cached preimages of grid node x_i under branch b of a symbol's map,
    // and the corresponding weights e^{phi(y)}.
    const std::vector<std::vector<double>>& pre_points(int sym) const {
        return cache_[static_cast<std::size_t>(sym)].y;
    }
    const std::vector<std::vector<double>>& pre_weights(int sym) const {
        return cache_[static_cast<std::size_t>(sym)].w;
    }
    // (L 1)(x_i) per node for a symbol.
    const std::vector<double>& transfer_of_one(int sym) const {
        return cache_[static_cast<std::size_t>(sym)].l1;
    }

private:
    struct SymbolCache {
        std::vector<std::vector<double>> y;   // [branch][node]
        std::vector<std::vector<double>> w;   // e^{phi(y)}
        std::vector<double> l1;               // row sums
    };

    void build_caches() {
        cache_.resize(static_cast<std::size_t>(family_.symbols()));
        for (int s = 0; s < family_.symbols(); ++s) {
            const FiberMap& f = family_.maps[static_cast<std::size_t>(s)];
            const PotentialFiber& pot = family_.potentials[static_cast<std::size_t>(s)];
            SymbolCache& c = cache_[static_cast<std::size_t>(s)];
            c.y.assign(static_cast<std::size_t>(f.degree),
                       std::vector<double>(static_cast<std::size_t>(grid_n_)));
            c.w.assign(static_cast<std::size_t>(f.degree),
                       std::vector<double>(static_cast<std::size_t>(grid_n_)));
            c.l1.assign(static_cast<std::size_t>(grid_n_), 0.0);
            for (int i = 0; i < grid_n_; ++i) {
                auto ys = preimages(f, static_cast<double>(i) / grid_n_, preimage_tol_);
                for (int b = 0; b < f.degree; ++b) {
                    double y = ys[static_cast<std::size_t>(b)];
                    double w = std::exp(pot.value(y));
                    c.y[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] = y;
                    c.w[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] = w;
                    c.l1[static_cast<std::size_t>(i)] += w;
                }
            }
        }
    }

    FiberFamily family_;
    BaseOrbit orbit_;
    int grid_n_;
    double preimage_tol_;
    int threads_;
    std::vector<SymbolCache> cache_;
};

// ---------------------------------------------------------------------------
// Forward and adjoint action

// (L_{theta^j w} g) sampled on the grid.
inline GridFunction apply_transfer(const TransferContext& ctx, int j,
                                   const GridFunction& g) {
    if (g.n != ctx.grid_n())
        throw std::invalid_argument("apply_transfer: grid size mismatch");
    int sym = ctx.symbol(j);
    const auto& ys = ctx.pre_points(sym);
    const auto& ws = ctx.pre_weights(sym);
    GridFunction out(ctx.grid_n());
    int n = ctx.grid_n();
    parallel_for(static_cast<std::size_t>(n), ctx.threads(),
                 [&](std::size_t b, std::size_t e) {
                     for (std::size_t i = b; i < e; ++i) {
                         double acc = 0.0;
                         for (std::size_t br = 0; br < ys.size(); ++br)
                             acc += ws[br][i] * g.interp(ys[br][i]);
                         out.values[i] = acc;
                     }
                 });
    return out;
}

// Dual action on a weight vector rho (hat-function binning, so that
// <L g, rho> = <g, L* rho> holds to rounding). Returns the un-normalized
// image and its total mass sum_i rho_i (L 1)(x_i).
inline std::pair<std::vector<double>, double>
adjoint_transfer(const TransferContext& ctx, int j, const std::vector<double>& rho) {
    int n = ctx.grid_n();
    if (static_cast<int>(rho.size()) != n)
        throw std::invalid_argument("adjoint_transfer: weight size mismatch");
    int sym = ctx.symbol(j);
    const auto& ys = ctx.pre_points(sym);
    const auto& ws = ctx.pre_weights(sym);
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = rho[static_cast<std::size_t>(i)];
        if (r == 0.0) continue;
        for (std::size_t br = 0; br < ys.size(); ++br) {
            double w = ws[br][static_cast<std::size_t>(i)] * r;
            double u = wrap01(ys[br][static_cast<std::size_t>(i)]) * n;
            int i0 = static_cast<int>(u);
            if (i0 >= n) i0 = n - 1;
            double frac = u - i0;
            out[static_cast<std::size_t>(i0)] += w * (1.0 - frac);
            out[static_cast<std::size_t>((i0 + 1) % n)] += w * frac;
            mass += w;
        }
    }
    return {std::move(out), mass};
}

// ---------------------------------------------------------------------------
// Reference measures

// nu_{theta^j(w)} approximated by the functional
//   g -> L^depth g(anchor) / L^depth 1(anchor)
// materialized by expanding the preimage tree of the anchor through the
// maps at positions j .. j+depth-1 and binning e^{S_depth phi} leaf masses
// into nearest-node bins.
inline std::vector<double> reference_measure(const TransferContext& ctx, int j,
                                             int depth, double anchor) {
    if (depth < 1) throw std::invalid_argument("reference_measure: depth must be >= 1");
    double log_leaves = 0.0;
    for (int m = j; m < j + depth; ++m)
        log_leaves += std::log(static_cast<double>(ctx.map_at(m).degree));
    if (log_leaves > 24.0 * std::log(2.0) + 1e-9)
        throw std::invalid_argument("reference_measure: preimage-tree budget exceeded");

    int n = ctx.grid_n();
    std::vector<double> bins(static_cast<std::size_t>(n), 0.0);

    // iterative DFS over (position, point, weight)
    struct Node { int m; double pt; double w; };
    std::vector<Node> stack;
    stack.push_back({j + depth - 1, wrap01(anchor), 1.0});
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        const FiberMap& f = ctx.map_at(nd.m);
        const PotentialFiber& pot = ctx.potential_at(nd.m);
        auto ys = preimages(f, nd.pt, ctx.preimage_tol());
        for (double z : ys) {
            double w = nd.w * std::exp(pot.value(z));
            if (nd.m == j) {
                int bin = static_cast<int>(std::llround(z * n)) % n;
                bins[static_cast<std::size_t>(bin)] += w;
            } else {
                stack.push_back({nd.m - 1, z, w});
            }
        }
    }

    double total = 0.0;
    for (double b : bins) total += b;
    if (!(total > 0.0) || !std::isfinite(total))
        throw std::runtime_error("reference_measure: mass collapse (underflow/overflow)");
    for (double& b : bins) b /= total;
    return bins;
}

// lambda_{theta^j(w)} = nu_{theta^{j+1}(w)}(L_{theta^j(w)} 1).
inline double lambda_at(const TransferContext& ctx, int j,
                        const std::vector<double>& nu_next) {
    const auto& l1 = ctx.transfer_of_one(ctx.symbol(j));
    if (nu_next.size() != l1.size())
        throw std::invalid_argument("lambda_at: weight size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < l1.size(); ++i) s += nu_next[i] * l1[i];
    return s;
}

// Backward sweep of reference measures: seed nu at position j_hi from the
// preimage tree, then propagate nu_j = L_j^* nu_{j+1} / lambda_j down to
// j_lo. nu(j) and lambda(j) index into [j_lo, j_hi].
struct ReferenceSweep {
    int j_lo = 0;
    int j_hi = 0;
    std::vector<std::vector<double>> nus;   // nus[j - j_lo]
    std::vector<double> lambdas;            // lambdas[j - j_lo], valid j < j_hi

    const std::vector<double>& nu(int j) const {
        return nus[static_cast<std::size_t>(j - j_lo)];
    }
    double lambda(int j) const {
        return lambdas[static_cast<std::size_t>(j - j_lo)];
    }
};

inline ReferenceSweep reference_sweep(const TransferContext& ctx, int j_lo, int j_hi,
                                      int tail_depth, double anchor) {
    if (j_hi < j_lo) throw std::invalid_argument("reference_sweep: empty range");
    ReferenceSweep sw;
    sw.j_lo = j_lo;
    sw.j_hi = j_hi;
    sw.nus.resize(static_cast<std::size_t>(j_hi - j_lo + 1));
    sw.lambdas.assign(static_cast<std::size_t>(j_hi - j_lo + 1), 0.0);
    sw.nus[static_cast<std::size_t>(j_hi - j_lo)] =
        reference_measure(ctx, j_hi, tail_depth, anchor);
    for (int j = j_hi - 1; j >= j_lo; --j) {
        auto [img, mass] = adjoint_transfer(ctx, j, sw.nu(j + 1));
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw std::runtime_error("reference_sweep: mass collapse at position " +
                                     std::to_string(j));
        for (double& v : img) v /= mass;
        sw.nus[static_cast<std::size_t>(j - j_lo)] = std::move(img);
        sw.lambdas[static_cast<std::size_t>(j - j_lo)] = mass;
    }
    return sw;
}

// ---------------------------------------------------------------------------
// Invariant densities

struct DensityPullback {
    GridFunction h;
    std::vector<double> log_factors;   // per-step mean normalizers
    int start_position = 0;            // pullback started at this position
};

// h_{theta^j(w)} as the limit of normalized operator images of 1 pulled
// from past_depth steps back. Each step renormalizes to grid mean 1 and
// records the factor; the final density is rescaled so that
// integral h d(nu_j) = 1 against the supplied reference weights.
// Iterates are required to stay inside the cone.
inline DensityPullback density_pullback(const TransferContext& ctx, int j, int past_depth,
                                        const ConeParams& cone,
                                        const std::vector<double>& nu_j) {
    if (past_depth < 1)
        throw std::invalid_argument("density_pullback: past_depth must be >= 1");
    if (j - past_depth < -ctx.orbit().past)
        throw std::out_of_range("density_pullback: window exhausted (need past depth " +
                                std::to_string(past_depth - j) + ")");
    DensityPullback out;
    out.start_position = j - past_depth;
    GridFunction g = constant_grid(ctx.grid_n(), 1.0);
    for (int m = j - past_depth; m < j; ++m) {
        g = apply_transfer(ctx, m, g);
        double mu = g.mean();
        if (!(mu > 0.0) || !std::isfinite(mu))
            throw std::runtime_error("density_pullback: degenerate normalizer at step " +
                                     std::to_string(m));
        g.scale(1.0 / mu);
        out.log_factors.push_back(std::log(mu));
        auto member = cone_member(g, cone, ctx.threads());
        if (!member.first)
            throw std::runtime_error("density_pullback: iterate left the cone at position " +
                                     std::to_string(m + 1) + " (margin " +
                                     std::to_string(member.second) + ")");
    }
    double integral = weighted_sum(g, nu_j);
    if (!(integral > 0.0))
        throw std::runtime_error("density_pullback: nonpositive nu-integral");
    g.scale(1.0 / integral);
    out.h = std::move(g);
    return out;
}

// Forward roll of densities along the orbit: h_{m+1} = L_m h_m / lambda_m,
// renormalized so nu_{m+1}(h_{m+1}) = 1. Errors contract forward, so a
// pullback seed at j_lo propagates accurately.
inline std::vector<GridFunction> density_roll(const TransferContext& ctx,
                                              const ReferenceSweep& sweep,
                                              const GridFunction& h_start) {
    std::vector<GridFunction> hs;
    hs.reserve(static_cast<std::size_t>(sweep.j_hi - sweep.j_lo + 1));
    hs.push_back(h_start);
    for (int m = sweep.j_lo; m < sweep.j_hi; ++m) {
        GridFunction next = apply_transfer(ctx, m, hs.back());
        double integral = weighted_sum(next, sweep.nu(m + 1));
        if (!(integral > 0.0))
            throw std::runtime_error("density_roll: nonpositive nu-integral at position " +
                                     std::to_string(m + 1));
        next.scale(1.0 / integral);
        hs.push_back(std::move(next));
    }
    return hs;
}

// ---------------------------------------------------------------------------
// Invariant measure and pushforward diagnostics

// mu weights = h(x_i) nu_i, renormalized.
inline std::vector<double> invariant_measure(const GridFunction& h,
                                             const std::vector<double>& nu) {
    if (static_cast<int>(nu.size()) != h.n)
        throw std::invalid_argument("invariant_measure: size mismatch");
    std::vector<double> mu(nu.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        mu[i] = h[static_cast<int>(i)] * nu[i];
        total += mu[i];
    }
    if (!(total > 0.0)) throw std::runtime_error("invariant_measure: zero mass");
    for (double& v : mu) v /= total;
    return mu;
}

// |mu_j(g o f_j) - mu_{j+1}(g)| for a test observable g.
inline double pushforward_defect(const TransferContext& ctx, int j,
                                 const std::vector<double>& mu_j,
                                 const std::vector<double>& mu_next,
                                 const std::function<double(double)>& g) {
    const FiberMap& f = ctx.map_at(j);
    int n = ctx.grid_n();
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / n;
        lhs += mu_j[static_cast<std::size_t>(i)] * g(eval(f, x));
        rhs += mu_next[static_cast<std::size_t>(i)] * g(x);
    }
    return std::fabs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Equilibrium data bundle

struct EquilibriumData {
    int j_lo = 0;
    int j_hi = 0;                             // positions j_lo..j_hi carry data
    std::vector<double> lambda_by_pos;        // lambda_j, j in [j_lo, j_hi)
    std::vector<GridFunction> h_by_pos;       // h_j, j in [j_lo, j_hi]
    std::vector<std::vector<double>> nu_by_pos;
    double pressure = 0.0;                    // Birkhoff average of log lambda
    double residual_h = 0.0;                  // max |L^ h_j - h_{j+1}|_inf
    double R_bound = 0.0;

    double lambda(int j) const {
        return lambda_by_pos[static_cast<std::size_t>(j - j_lo)];
    }
    const GridFunction& h(int j) const {
        return h_by_pos[static_cast<std::size_t>(j - j_lo)];
    }
    const std::vector<double>& nu(int j) const {
        return nu_by_pos[static_cast<std::size_t>(j - j_lo)];
    }
    int positions() const { return j_hi - j_lo; }
};

// deg e^{inf phi} <= lambda <= deg e^{sup phi}, with a few ulps of slack.
inline bool eigenvalue_bounds_ok(const TransferContext& ctx, int j, double lambda) {
    const FiberMap& f = ctx.map_at(j);
    const PotentialFiber& p = ctx.potential_at(j);
    double lo = f.degree * std::exp(p.inf_value);
    double hi = f.degree * std::exp(p.sup_value);
    double slack = 1e-12 * hi;
    return lambda >= lo - slack && lambda <= hi + slack;
}

// ---------------------------------------------------------------------------
// Empirical contraction constants

struct DecayConstants {
    double delta_hat = 0.0;   // max sampled Theta_k over operator images
    double tau_hat = 0.0;     // 1 - e^{-delta_hat}; empirical estimate
    int pairs = 0;            // sample count
    int grid = 0;             // sampling density of the metric
    int z_subgrid = 0;
};

// Delta_hat from >= 32 sampled cone pairs pushed once through the operator.
// The sampled Delta is a lower bound of the true diameter, hence tau_hat is
// a lower bound of the certified contraction rate.
inline DecayConstants
estimate_decay_constants(const TransferContext& ctx, int j, const ConeParams& cone,
                         const std::vector<std::pair<GridFunction, GridFunction>>& pairs) {
    if (pairs.size() < 32)
        throw std::invalid_argument("estimate_decay_constants: need at least 32 cone pairs");
    DecayConstants out;
    out.pairs = static_cast<int>(pairs.size());
    out.grid = ctx.grid_n();
    out.z_subgrid = cone.z_subgrid;
    for (const auto& [f, g] : pairs) {
        GridFunction lf = apply_transfer(ctx, j, f);
        GridFunction lg = apply_transfer(ctx, j, g);
        lf.scale(1.0 / lf.mean());
        lg.scale(1.0 / lg.mean());
        if (!cone_member(lf, cone, ctx.threads()).first ||
            !cone_member(lg, cone, ctx.threads()).first)
            throw std::runtime_error("estimate_decay_constants: image left the cone");
        double theta = theta_metric(lf, lg, cone, ctx.threads()).value;
        out.delta_hat = std::max(out.delta_hat, theta);
    }
    out.tau_hat = 1.0 - std::exp(-out.delta_hat);
    return out;
}

} // namespace randeq
