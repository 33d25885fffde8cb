// thermo.hpp -- pressure routes, Gibbs verification, Rokhlin entropy and
// decay of correlations.
//
// The random topological pressure is computed three ways: the Birkhoff
// average of log lambda, partition sums over (w,n,eps)-separated sets built
// greedily from grid nodes, and the critical exponent of cover sums over
// dynamical balls. Discrepancies between routes are reported, never
// averaged away. All finite-scale renderings of the paper-level limits
// (fixed n, eps, N) are recorded alongside the values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "randeq/hypotheses.hpp"
#include "randeq/rng.hpp"
#include "randeq/transfer.hpp"

namespace randeq {

// ---------------------------------------------------------------------------
// Pressure, route 1: Birkhoff average of log lambda

inline double pressure_lambda(std::span<const double> lambdas, int n) {
    if (n < 1 || n > static_cast<int>(lambdas.size()))
        throw std::invalid_argument("pressure_lambda: bad n");
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::log(lambdas[static_cast<std::size_t>(j)]);
    return s / n;
}

inline double pressure_lambda(const EquilibriumData& eq, int n) {
    return pressure_lambda(std::span<const double>(eq.lambda_by_pos), n);
}

// ---------------------------------------------------------------------------
// Pressure, route 2: separated sets

// Greedy maximal (w,n,eps)-separated set on the grid; returns
// (1/n) log sum_{y in F_n} e^{S_n phi(y)}. Maximality holds up to grid
// resolution only; pick eps at the expansion scale (the linear-map count
// d^{n-1}/(2 eps) calibrates the bias).
inline double pressure_separated(const TransferContext& ctx, int n, double eps) {
    if (n < 1) throw std::invalid_argument("pressure_separated: n must be positive");
    if (eps < 2.0 / ctx.grid_n())
        throw std::invalid_argument("pressure_separated: grid too coarse for eps");
    if (n > ctx.orbit().future)
        throw std::out_of_range("pressure_separated: n exceeds window");
    int g = ctx.grid_n();

    // forward trajectories of all grid nodes and their Birkhoff sums
    std::vector<std::vector<double>> traj(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(g)));
    std::vector<double> snphi(static_cast<std::size_t>(g), 0.0);
    {
        std::vector<double> cur(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i) cur[static_cast<std::size_t>(i)] = static_cast<double>(i) / g;
        for (int j = 0; j < n; ++j) {
            const FiberMap& f = ctx.map_at(j);
            const PotentialFiber& pot = ctx.potential_at(j);
            for (int i = 0; i < g; ++i) {
                double x = cur[static_cast<std::size_t>(i)];
                traj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = x;
                snphi[static_cast<std::size_t>(i)] += pot.value(x);
                cur[static_cast<std::size_t>(i)] = eval(f, x);
            }
        }
    }

    std::vector<int> kept;
    kept.reserve(1024);
    double sum = 0.0;
    for (int i = 0; i < g; ++i) {
        bool separated = true;
        for (int y : kept) {
            bool apart = false;
            for (int j = 0; j < n; ++j) {
                if (circle_dist(traj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)],
                                traj[static_cast<std::size_t>(j)][static_cast<std::size_t>(y)]) >
                    eps) {
                    apart = true;
                    break;
                }
            }
            if (!apart) { separated = false; break; }
        }
        if (separated) {
            kept.push_back(i);
            sum += std::exp(snphi[static_cast<std::size_t>(i)]);
        }
    }
    return std::log(sum) / n;
}

// ---------------------------------------------------------------------------
// Dynamical balls

struct DynamicalBall {
    double center = 0.0;
    double lo = 0.0;    // offsets relative to center, lo <= 0 <= hi
    double hi = 0.0;
    bool clipped = false;   // endpoint resolved conservatively

    double length() const { return hi - lo; }
};

// B_w(x,n,eps) = {y : d(f^j x, f^j y) < eps, 0 <= j <= n}, computed by
// pulling the eps-interval around f^n(x) back through the monotone branch
// containing the orbit, intersecting with the eps-interval at each level.
inline DynamicalBall dynamical_ball(const TransferContext& ctx, double x, int n,
                                    double eps) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("dynamical_ball: eps must be in (0, 1/2)");
    if (n < 0 || n > ctx.orbit().future)
        throw std::out_of_range("dynamical_ball: n outside window");
    x = wrap01(x);
    std::vector<double> orbit_pts(static_cast<std::size_t>(n) + 1);
    orbit_pts[0] = x;
    for (int j = 0; j < n; ++j)
        orbit_pts[static_cast<std::size_t>(j) + 1] = eval(ctx.map_at(j), orbit_pts[static_cast<std::size_t>(j)]);

    DynamicalBall ball;
    ball.center = x;
    double lo = orbit_pts[static_cast<std::size_t>(n)] - eps;
    double hi = orbit_pts[static_cast<std::size_t>(n)] + eps;
    for (int m = n - 1; m >= 0; --m) {
        const FiberMap& f = ctx.map_at(m);
        double xm = orbit_pts[static_cast<std::size_t>(m)];
        double gm = f.lift(xm);
        double blo = xm - 0.5, bhi = xm + 0.5;
        double glo = f.lift(blo), ghi = f.lift(bhi);
        auto pull = [&](double e) {
            double t = e + std::round(gm - e);
            if (t < glo) { ball.clipped = true; return blo; }
            if (t > ghi) { ball.clipped = true; return bhi; }
            double a = blo, b = bhi;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (a + b);
                if (f.lift(mid) < t) a = mid; else b = mid;
            }
            return 0.5 * (a + b);
        };
        lo = std::max(pull(lo), xm - eps);
        hi = std::min(pull(hi), xm + eps);
        if (hi < lo) hi = lo;   // degenerate; conservative shrink
    }
    ball.lo = lo - x;
    ball.hi = hi - x;
    return ball;
}

// nu-mass of the circle interval [a,b] (real endpoints, b-a <= 1) with each
// node weight spread uniformly over its cell [(i-1/2)/n, (i+1/2)/n).
inline double interval_mass(const std::vector<double>& nu, double a, double b) {
    int n = static_cast<int>(nu.size());
    if (b < a) throw std::invalid_argument("interval_mass: empty interval");
    if (b - a >= 1.0) return 1.0;
    double mass = 0.0;
    int i_lo = static_cast<int>(std::floor((a - 0.5 / n) * n));
    int i_hi = static_cast<int>(std::ceil((b + 0.5 / n) * n));
    for (int i = i_lo; i <= i_hi; ++i) {
        double clo = (i - 0.5) / n;
        double chi = (i + 0.5) / n;
        double ov = std::min(b, chi) - std::max(a, clo);
        if (ov > 0.0)
            mass += nu[static_cast<std::size_t>(((i % n) + n) % n)] * ov * n;
    }
    return mass;
}

// ---------------------------------------------------------------------------
// Pressure, route 3: dynamical-ball covers

// Cover sum proxy for inf{beta : m_beta = 0}: build a sequential cover of
// the circle by depth-N dynamical balls (each new ball is centered so its
// left edge just overlaps the covered part) and bisect the beta at which
// sum e^{-beta n + S_n phi(B)} crosses 1.
inline double pressure_balls(const TransferContext& ctx, double eps, int N,
                             double beta_lo = 0.0, double beta_hi = 3.0) {
    if (N < 1 || N > ctx.orbit().future)
        throw std::out_of_range("pressure_balls: N outside window");
    struct Item { double s; };
    std::vector<Item> items;
    double t = 0.0;
    int guard = 0;
    const int guard_max = 2000000;
    while (t < 1.0) {
        if (++guard > guard_max)
            throw std::runtime_error("pressure_balls: cover construction failure");
        DynamicalBall probe = dynamical_ball(ctx, wrap01(t), N, eps);
        double c = t - 0.9 * probe.lo;   // shift right; probe.lo <= 0
        DynamicalBall ball = dynamical_ball(ctx, wrap01(c), N, eps);
        if (c + ball.lo > t + 1e-15 || ball.length() <= 0.0) {
            c = t;
            ball = probe;
        }
        if (ball.length() <= 1e-15)
            throw std::runtime_error("pressure_balls: degenerate ball in cover");
        // sup of the Birkhoff sum over the ball, sampled at ends and center
        double best = -std::numeric_limits<double>::infinity();
        for (double y : {c + ball.lo, c, c + ball.hi}) {
            double acc = 0.0, cur = wrap01(y);
            for (int j = 0; j < N; ++j) {
                acc += ctx.potential_at(j).value(cur);
                cur = eval(ctx.map_at(j), cur);
            }
            best = std::max(best, acc);
        }
        items.push_back({best});
        double advance = c + ball.hi - t;
        if (advance <= 1e-15) advance = ball.length();
        t += advance;
    }
    auto cover_sum = [&](double beta) {
        double s = 0.0;
        for (const Item& it : items) s += std::exp(-beta * N + it.s);
        return s;
    };
    if (cover_sum(beta_lo) <= 1.0)
        return beta_lo;   // already subcritical at the grid floor
    if (cover_sum(beta_hi) > 1.0)
        throw std::runtime_error("pressure_balls: beta grid does not bracket the crossing");
    double lo = beta_lo, hi = beta_hi;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cover_sum(mid) > 1.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct PressureEstimate {
    double lambda_route = 0.0;
    double separated_route = 0.0;
    double balls_route = 0.0;
    int n_used = 0;
    double eps_used = 0.0;
    int balls_N = 0;
    double balls_eps = 0.0;
    // finite-scale refinement rows (eps halving), reported not extrapolated
    std::vector<std::pair<double, double>> separated_refinement;
    std::vector<std::pair<double, double>> balls_refinement;
};

// ---------------------------------------------------------------------------
// Gibbs property at hyperbolic times

struct GibbsRow {
    int n = 0;             // a c-hyperbolic time
    double ball_lo = 0.0;  // interval endpoints (real, around x)
    double ball_hi = 0.0;
    double nu_mass = 0.0;
    double sn_phi = 0.0;
    double log_lambda_n = 0.0;
    double ratio = 0.0;          // nu(B) / exp(S_n phi - log lambda^n)
    double gamma_lower = 0.0;    // lower bound for gamma_eps(theta^n w)
    bool in_band = true;
};

struct GibbsReport {
    double x = 0.0;
    double eps = 0.0;
    double c = 0.0;
    double K_eps = 1.0;
    double gamma_eps_min = 1.0;
    std::vector<GibbsRow> rows;
    bool all_in_band = true;
};

// Checks gamma_eps K^-1 <= nu(B_w(x,n,eps)) / exp(S_n phi - log lambda^n) <= K
// at the first detected c-hyperbolic times of x.
inline GibbsReport gibbs_check(const TransferContext& ctx, double x, double eps, double c,
                               const EquilibriumData& eq, int max_times = 10,
                               int exactness_cap = 64) {
    GibbsReport rep;
    rep.x = wrap01(x);
    rep.eps = eps;
    rep.c = c;

    int span = eq.positions();
    if (span < 2) throw std::invalid_argument("gibbs_check: equilibrium data too short");

    // hyperbolic times of x along the window
    auto s = orbit_log_expansions(ctx, rep.x, span);
    auto rec = hyperbolic_times(std::span<const double>(s), c);
    if (rec.times.size() < 3)
        throw std::runtime_error("gibbs_check: fewer than 3 hyperbolic times in window");

    // K_eps = exp(eps sum_k |phi_{theta^k w}|_alpha e^{-ck/2}); global
    // seminorms cached per symbol
    std::vector<double> seminorm(static_cast<std::size_t>(ctx.family().symbols()), -1.0);
    double ksum = 0.0;
    for (int k = 0; k < ctx.orbit().future; ++k) {
        double decay = std::exp(-c * k / 2.0);
        if (decay < 1e-12) break;
        int sym = ctx.symbol(k);
        if (seminorm[static_cast<std::size_t>(sym)] < 0.0) {
            const auto& cacheg = ctx.potential_at(k).cache;
            GridFunction e(cacheg.n);
            for (int i = 0; i < cacheg.n; ++i) e[i] = cacheg[i];
            seminorm[static_cast<std::size_t>(sym)] =
                holder_seminorm(e, ctx.potential_at(k).holder_exponent, 0.5 + 2.0 / cacheg.n,
                                ctx.threads());
        }
        ksum += seminorm[static_cast<std::size_t>(sym)] * decay;
    }
    rep.K_eps = std::exp(eps * ksum);

    // Birkhoff sums of phi along x's orbit
    std::vector<double> phi_prefix(static_cast<std::size_t>(span) + 1, 0.0);
    {
        double cur = rep.x;
        for (int j = 0; j < span; ++j) {
            phi_prefix[static_cast<std::size_t>(j) + 1] =
                phi_prefix[static_cast<std::size_t>(j)] + ctx.potential_at(j).value(cur);
            cur = eval(ctx.map_at(j), cur);
        }
    }
    std::vector<double> loglam_prefix(static_cast<std::size_t>(span) + 1, 0.0);
    for (int j = 0; j < span; ++j)
        loglam_prefix[static_cast<std::size_t>(j) + 1] =
            loglam_prefix[static_cast<std::size_t>(j)] + std::log(eq.lambda(eq.j_lo + j));

    rep.gamma_eps_min = std::numeric_limits<double>::infinity();
    for (int n : rec.times) {
        if (static_cast<int>(rep.rows.size()) >= max_times) break;
        if (n >= span) break;
        // lower bound for gamma_eps(theta^n(w)) needs lambdas over the
        // exactness span starting at position n
        double xn = rep.x;
        for (int j = 0; j < n; ++j) xn = eval(ctx.map_at(j), xn);
        int nt = exactness_time(ctx, n, xn, eps, exactness_cap);
        if (n + nt > span) break;

        GibbsRow row;
        row.n = n;
        DynamicalBall ball = dynamical_ball(ctx, rep.x, n, eps);
        row.ball_lo = rep.x + ball.lo;
        row.ball_hi = rep.x + ball.hi;
        row.nu_mass = interval_mass(eq.nu(eq.j_lo), row.ball_lo, row.ball_hi);
        row.sn_phi = phi_prefix[static_cast<std::size_t>(n)];
        row.log_lambda_n = loglam_prefix[static_cast<std::size_t>(n)];
        row.ratio = row.nu_mass / std::exp(row.sn_phi - row.log_lambda_n);

        double snlog = 0.0, sninf = 0.0;
        for (int i = 0; i < nt; ++i) {
            sninf += ctx.potential_at(n + i).inf_value;
            snlog += std::log(eq.lambda(eq.j_lo + n + i));
        }
        row.gamma_lower = std::exp(sninf - snlog);
        rep.gamma_eps_min = std::min(rep.gamma_eps_min, row.gamma_lower);

        row.in_band = row.ratio >= row.gamma_lower / rep.K_eps * 0.999 &&
                      row.ratio <= rep.K_eps * 1.001;
        rep.all_in_band = rep.all_in_band && row.in_band;
        rep.rows.push_back(row);
    }
    if (rep.rows.empty())
        throw std::runtime_error("gibbs_check: no usable hyperbolic times in window");
    return rep;
}

// ---------------------------------------------------------------------------
// Rokhlin entropy

struct EntropyEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

// Monte-Carlo average of log J_mu = log lambda - phi + log h_next(f x) - log h(x)
// over positions cycled 0..n-1 and x drawn from the mu_j weights.
inline EntropyEstimate rokhlin_entropy(const TransferContext& ctx, const EquilibriumData& eq,
                                       int samples, int n, std::uint64_t seed) {
    if (n < 1 || n > eq.positions())
        throw std::invalid_argument("rokhlin_entropy: n outside equilibrium data");
    if (samples < 1) throw std::invalid_argument("rokhlin_entropy: no samples");

    // per-position mu CDFs
    int g = ctx.grid_n();
    std::vector<std::vector<double>> cdf(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto mu = invariant_measure(eq.h(eq.j_lo + j), eq.nu(eq.j_lo + j));
        auto& c = cdf[static_cast<std::size_t>(j)];
        c.resize(mu.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            acc += mu[i];
            c[i] = acc;
        }
        c.back() = 1.0;
    }

    double sum = 0.0, sumsq = 0.0;
    for (int sidx = 0; sidx < samples; ++sidx) {
        int j = sidx % n;
        double u = rng_uniform01(seed, static_cast<std::uint64_t>(sidx));
        const auto& c = cdf[static_cast<std::size_t>(j)];
        int i = static_cast<int>(std::lower_bound(c.begin(), c.end(), u) - c.begin());
        if (i >= g) i = g - 1;
        // uniform within the node cell
        double u2 = rng_uniform01(seed ^ 0x9E3779B97F4A7C15ULL,
                                  static_cast<std::uint64_t>(sidx));
        double x = wrap01((i + (u2 - 0.5)) / g);
        double hx = eq.h(eq.j_lo + j).interp(x);
        double fx = eval(ctx.map_at(eq.j_lo + j), x);
        double hnext = eq.h(eq.j_lo + j + 1).interp(fx);
        if (!(hx > 0.0) || !(hnext > 0.0))
            throw std::runtime_error("rokhlin_entropy: density evaluated to zero");
        double v = std::log(eq.lambda(eq.j_lo + j)) - ctx.potential_at(eq.j_lo + j).value(x) +
                   std::log(hnext) - std::log(hx);
        sum += v;
        sumsq += v * v;
    }
    EntropyEstimate out;
    out.samples = samples;
    out.value = sum / samples;
    double var = std::max(0.0, sumsq / samples - out.value * out.value);
    out.std_error = std::sqrt(var / samples);
    return out;
}

// ---------------------------------------------------------------------------
// Decay of correlations

struct DecayReport {
    std::string psi_name;
    std::string phi_name;
    std::vector<std::pair<int, double>> rows;   // (n, C_n)
    double fitted_rate = std::numeric_limits<double>::quiet_NaN();
    int fit_points = 0;
    double tau_hat = 0.0;          // empirical envelope from the cone metric
    bool rate_within_envelope = true;
    int noise_floor_at = -1;       // first n excluded as noise regrowth
};

// C_n = integral (phi_obs o f^n) psi d mu_0  -  integral phi_obs d mu_n *
// integral psi d mu_0, with f^n composed pointwise from grid samples so the
// estimate stays independent of the transfer discretization it tests.
inline DecayReport decay_correlations(const TransferContext& ctx, const EquilibriumData& eq,
                                      const GridFunction& psi, const GridFunction& phi_obs,
                                      int n_max, double tau_hat = 0.0) {
    if (n_max < 1 || n_max > eq.positions())
        throw std::invalid_argument("decay_correlations: n_max outside equilibrium data");
    DecayReport rep;
    rep.tau_hat = tau_hat;
    int g = ctx.grid_n();
    auto mu0 = invariant_measure(eq.h(eq.j_lo), eq.nu(eq.j_lo));
    double mean_psi = 0.0;
    for (int i = 0; i < g; ++i) mean_psi += mu0[static_cast<std::size_t>(i)] * psi[i];

    std::vector<double> cur(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) cur[static_cast<std::size_t>(i)] = static_cast<double>(i) / g;
    for (int n = 1; n <= n_max; ++n) {
        const FiberMap& f = ctx.map_at(eq.j_lo + n - 1);
        for (int i = 0; i < g; ++i)
            cur[static_cast<std::size_t>(i)] = eval(f, cur[static_cast<std::size_t>(i)]);
        auto mun = invariant_measure(eq.h(eq.j_lo + n), eq.nu(eq.j_lo + n));
        double cross = 0.0, mean_phi_n = 0.0;
        for (int i = 0; i < g; ++i) {
            cross += mu0[static_cast<std::size_t>(i)] * psi[i] *
                     phi_obs.interp(cur[static_cast<std::size_t>(i)]);
            mean_phi_n += mun[static_cast<std::size_t>(i)] * phi_obs[i];
        }
        rep.rows.emplace_back(n, cross - mean_phi_n * mean_psi);
    }

    // least squares on log|C_n| over nonzero entries, stopping at the first
    // regrowth (aliasing/quadrature noise floor)
    std::vector<std::pair<double, double>> pts;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& [n, cn] : rep.rows) {
        double a = std::fabs(cn);
        if (a <= 1e-13) { rep.noise_floor_at = n; break; }
        if (a > prev * 1.2) { rep.noise_floor_at = n; break; }
        pts.emplace_back(static_cast<double>(n), std::log(a));
        prev = a;
    }
    rep.fit_points = static_cast<int>(pts.size());
    if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (auto& [px, py] : pts) {
            sx += px; sy += py; sxx += px * px; sxy += px * py;
        }
        double m = pts.size();
        double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        rep.fitted_rate = std::exp(slope);
        if (tau_hat > 0.0)
            rep.rate_within_envelope = rep.fitted_rate <= tau_hat + 0.1;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Stability sweep bookkeeping (the sweep itself is orchestrated by the
// pipeline; rows land here)

struct StabilityRow {
    double s = 0.0;
    double dlambda_sup = 0.0;   // sup over positions |lambda_s - lambda_0|
    double dh_sup = 0.0;        // max over positions |h_s - h_0|_inf
    double dpressure = 0.0;
    bool hypotheses_passed = true;
};

struct StabilityReport {
    double s_reference = 0.0;
    std::vector<StabilityRow> rows;   // sorted by decreasing |s - s0|

    bool strictly_decreasing() const {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i].dlambda_sup < rows[i - 1].dlambda_sup)) return false;
            if (!(rows[i].dh_sup < rows[i - 1].dh_sup)) return false;
            if (!(rows[i].dpressure < rows[i - 1].dpressure)) return false;
        }
        return true;
    }
};

} // namespace randeq
