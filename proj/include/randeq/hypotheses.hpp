// hypotheses.hpp -- executable checker for the standing conditions.
//
// Conditions (I)/(II) come from the expansion profiles, (IV) and (V) from
// the potentials and cone parameters, (VI) from the per-symbol envelopes.
// (III), topological exactness, is probed at finitely many samples; full
// exactness is not decidable numerically. Hyperbolic times are detected by
// the descending-maximum scan over the log-expansion sequence.

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "randeq/cone.hpp"
#include "randeq/rng.hpp"
#include "randeq/fiber.hpp"
#include "randeq/transfer.hpp"

namespace randeq {

inline double delta_of_c_families(const FiberFamily& family, double c);

// ---------------------------------------------------------------------------
// Condition report

struct SymbolConditions {
    int symbol = 0;
    int degree = 0;
    double sigma = 0.0;
    double L_bound = 1.0;
    double probe_radius = 0.0;   // neighborhood used for L_w(x); recorded, not canonical
    int q = 1;
    int p = 0;
    double gamma_w = 0.0;         // condition (V) quantity
    double iv_margin = 0.0;       // (log deg - log q) - (sup phi - inf phi + eps_phi)
    double holder_exp_phi = 0.0;  // |e^{phi}|_alpha, global seminorm
    double iv_holder_rhs = 0.0;   // eps_phi e^{inf phi}
    bool pass_I = true;
    bool pass_II = true;
    bool pass_IV = true;
};

struct ExactnessSample {
    int position = 0;
    double x = 0.0;
    double eps = 0.0;
    int n_tilde = -1;   // -1 when the cap was exceeded
};

struct HypothesisReport {
    std::vector<SymbolConditions> per_symbol;
    double eps_phi = 0.0;
    double eps_0 = 0.0;        // recorded witness 0 < eps_0 < eps_phi
    double gamma = 0.0;        // max_w gamma_w
    double c = 0.0;
    double rho = 0.0;
    double L_tilde = 1.0;      // max_w L_bound
    double sigma_tilde = 0.0;  // min_w sigma
    double vi_lhs = 0.0;       // L~^rho sigma~^{-(1-rho)}
    double vi_rhs = 0.0;       // e^{-2c}
    double delta_c = 0.0;
    int q_hat = 0;
    int q_bar = 0;
    int p_hat = 0;
    bool pass_I = true;
    bool pass_II = true;
    bool pass_III = true;      // from the exactness probe
    bool pass_IV = true;
    bool pass_V = true;
    bool pass_VI = true;
    std::vector<ExactnessSample> exactness;

    bool all_pass() const {
        return pass_I && pass_II && pass_III && pass_IV && pass_V && pass_VI;
    }
};

// Default c: a quarter of the (VI) budget (1-rho) log(min sigma), so that
// uniformly expanding families pass (VI) for any rho in (0,1).
inline double default_hyperbolicity_c(const std::vector<ExpansionProfile>& profiles,
                                      double rho) {
    double min_log_sigma = std::numeric_limits<double>::infinity();
    for (const auto& pr : profiles)
        min_log_sigma = std::min(min_log_sigma, std::log(pr.sigma));
    return 0.25 * (1.0 - rho) * min_log_sigma;
}

// Conditions (I), (II), (IV), (V), (VI). The exactness flag (III) is filled
// by probe_exactness below; it defaults to pass here.
inline HypothesisReport check_conditions(const FiberFamily& family,
                                         const std::vector<ExpansionProfile>& profiles,
                                         const ConeParams& cone, double c, double rho,
                                         int threads = 1) {
    family.validate();
    if (profiles.size() != family.maps.size())
        throw std::invalid_argument("check_conditions: profile per symbol required");
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("check_conditions: rho must be in (0,1)");
    if (!(c > 0.0)) throw std::invalid_argument("check_conditions: c must be positive");

    HypothesisReport rep;
    rep.c = c;
    rep.rho = rho;
    rep.eps_phi = family.potentials.front().eps_phi;
    for (const auto& pot : family.potentials)
        if (std::fabs(pot.eps_phi - rep.eps_phi) > 1e-15)
            throw std::invalid_argument("check_conditions: eps_phi must be common to all fibers");
    if (!(rep.eps_phi > 0.0))
        throw std::invalid_argument("check_conditions: missing eps_phi");
    rep.eps_0 = 0.5 * rep.eps_phi;

    double m_diam = cone.m() * std::pow(kCircleDiameter, cone.alpha);
    rep.sigma_tilde = std::numeric_limits<double>::infinity();
    rep.q_bar = std::numeric_limits<int>::max();

    for (int s = 0; s < family.symbols(); ++s) {
        const auto& prof = profiles[static_cast<std::size_t>(s)];
        const auto& pot = family.potentials[static_cast<std::size_t>(s)];
        const auto& map = family.maps[static_cast<std::size_t>(s)];
        SymbolConditions sc;
        sc.symbol = s;
        sc.degree = map.degree;
        sc.sigma = prof.sigma;
        sc.L_bound = prof.L_bound;
        sc.probe_radius = prof.probe_radius;
        sc.q = prof.q;
        sc.p = prof.p;
        sc.pass_I = prof.cond_I_ok;
        sc.pass_II = prof.cond_II_ok;

        // (IV): variation margin and the Hölder side |e^{phi}|_alpha < eps_phi e^{inf phi}
        double osc = pot.sup_value - pot.inf_value;
        sc.iv_margin = (std::log(static_cast<double>(map.degree)) - std::log(sc.q)) -
                       (osc + rep.eps_phi);
        GridFunction exp_phi(pot.cache.n);
        for (int i = 0; i < pot.cache.n; ++i) exp_phi[i] = std::exp(pot.cache[i]);
        sc.holder_exp_phi =
            holder_seminorm(exp_phi, cone.alpha, 0.5 + 2.0 / pot.cache.n, threads);
        if (!std::isfinite(sc.holder_exp_phi))
            throw std::runtime_error("check_conditions: non-finite seminorm");
        sc.iv_holder_rhs = rep.eps_phi * std::exp(pot.inf_value);
        sc.pass_IV = sc.iv_margin > 0.0 && sc.holder_exp_phi < sc.iv_holder_rhs;

        // (V)
        double La = std::pow(sc.L_bound, cone.alpha);
        double branch_term =
            (sc.p * std::pow(sc.sigma, -cone.alpha) +
             sc.q * La * (1.0 + std::pow(sc.L_bound - 1.0, cone.alpha))) /
            map.degree;
        sc.gamma_w = std::exp(rep.eps_phi) * branch_term +
                     rep.eps_phi * La * (1.0 + m_diam);

        rep.per_symbol.push_back(sc);
        rep.pass_I = rep.pass_I && sc.pass_I;
        rep.pass_II = rep.pass_II && sc.pass_II;
        rep.pass_IV = rep.pass_IV && sc.pass_IV;
        rep.gamma = std::max(rep.gamma, sc.gamma_w);
        rep.L_tilde = std::max(rep.L_tilde, sc.L_bound);
        rep.sigma_tilde = std::min(rep.sigma_tilde, sc.sigma);
        rep.q_hat = std::max(rep.q_hat, sc.q);
        rep.q_bar = std::min(rep.q_bar, sc.q);
        rep.p_hat = std::max(rep.p_hat, sc.p);
    }
    rep.pass_V = rep.gamma < 1.0;

    rep.vi_lhs = std::pow(rep.L_tilde, rho) * std::pow(rep.sigma_tilde, -(1.0 - rho));
    rep.vi_rhs = std::exp(-2.0 * c);
    rep.pass_VI = rep.vi_lhs < rep.vi_rhs && rep.vi_rhs < 1.0;

    rep.delta_c = delta_of_c_families(family, c);
    return rep;
}

// ---------------------------------------------------------------------------
// delta(c): radius at which branch inverses are defined on every delta-ball

inline double delta_of_c_families(const FiberFamily& family, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("delta_of_c: c must be positive");
    double min_image = std::numeric_limits<double>::infinity();
    for (const auto& f : family.maps) {
        auto b = branch_boundaries(f);
        for (int k = 0; k < f.degree; ++k) {
            double len = f.lift(b[static_cast<std::size_t>(k) + 1]) -
                         f.lift(b[static_cast<std::size_t>(k)]);
            if (len < 1e-6)
                throw std::runtime_error("delta_of_c: degenerate branch image on '" +
                                         f.label + "'");
            min_image = std::min(min_image, len);
        }
    }
    return std::min(0.1, 0.5 * min_image);
}

inline double delta_of_c(const FiberFamily& family, double c) {
    return delta_of_c_families(family, c);
}

// ---------------------------------------------------------------------------
// Topological exactness probe (condition III)

// Smallest n such that the forward image of B(x, eps) along the orbit from
// position j covers the circle. Interval endpoints are tracked as lifts.
inline int exactness_time(const TransferContext& ctx, int j, double x, double eps,
                          int cap = 64) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("exactness_time: eps must be in (0, 1/2)");
    double lo = x - eps, hi = x + eps;
    for (int n = 1; n <= cap; ++n) {
        const FiberMap& f = ctx.map_at(j + n - 1);
        lo = f.lift(lo);
        hi = f.lift(hi);
        if (hi - lo >= 1.0) return n;
    }
    throw std::runtime_error("exactness_time: image did not cover the circle within " +
                             std::to_string(cap) + " steps (exactness failure)");
}

// Probe (III) at a deterministic sample of points and positions; fills the
// report's exactness table and pass flag.
inline void probe_exactness(const TransferContext& ctx, HypothesisReport& rep,
                            double eps, int cap = 64) {
    const double xs[] = {0.1, 0.37, 0.62, 0.9};
    const int positions[] = {0, 1, 2};
    rep.pass_III = true;
    rep.exactness.clear();
    for (int j : positions) {
        if (j + cap > ctx.orbit().future) continue;
        for (double x : xs) {
            ExactnessSample sm;
            sm.position = j;
            sm.x = x;
            sm.eps = eps;
            try {
                sm.n_tilde = exactness_time(ctx, j, x, eps, cap);
            } catch (const std::runtime_error&) {
                sm.n_tilde = -1;
                rep.pass_III = false;
            }
            rep.exactness.push_back(sm);
        }
    }
}

// ---------------------------------------------------------------------------
// Hyperbolic times

struct HyperbolicTimeRecord {
    double c = 0.0;
    std::vector<double> log_expansions;   // s_j = log L_{theta^j(w)}(f^j_w x)^{-1}
    std::vector<int> times;               // sorted c-hyperbolic times
};

// n is a c-hyperbolic time iff sum_{j=n-k}^{n-1} s_j >= c k for all
// 1 <= k <= n; equivalently U_n >= max_{i<n} U_i for U_i = sum (s_j - c).
inline HyperbolicTimeRecord hyperbolic_times(std::span<const double> s, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("hyperbolic_times: c must be positive");
    HyperbolicTimeRecord rec;
    rec.c = c;
    rec.log_expansions.assign(s.begin(), s.end());
    double run_max = 0.0;   // U_0
    double u = 0.0;
    for (std::size_t n = 1; n <= s.size(); ++n) {
        u += s[n - 1] - c;
        if (u >= run_max) rec.times.push_back(static_cast<int>(n));
        run_max = std::max(run_max, u);
    }
    return rec;
}

// Log-expansion sequence of a point along the orbit: s_j = -log L(f^j x)
// with L the probed inverse-Lipschitz constant of the map at position j.
inline std::vector<double> orbit_log_expansions(const TransferContext& ctx, double x,
                                                int n, double probe_radius = 0.0) {
    if (n > ctx.orbit().future)
        throw std::out_of_range("orbit_log_expansions: n exceeds window");
    if (probe_radius <= 0.0) probe_radius = 2.0 / ctx.grid_n();
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(n));
    double cur = wrap01(x);
    for (int j = 0; j < n; ++j) {
        const FiberMap& f = ctx.map_at(j);
        s.push_back(-std::log(expansion_constant(f, cur, probe_radius)));
        cur = eval(f, cur);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Visit frequency to the bad regions

// Empirical cone invariance: one transfer step maps sampled members of
// C^k_delta into C^{gamma k}_delta. Errors list the offending sample.
inline void verify_cone_invariance(const TransferContext& ctx, int j,
                                   const ConeParams& cone, double gamma,
                                   int n_samples = 16, std::uint64_t seed = 0x1CE) {
    ConeParams tight = cone;
    tight.k = gamma * cone.k;
    for (int t = 0; t < n_samples; ++t) {
        double a1 = 0.03 + 0.1 * rng_uniform01(seed, 4 * static_cast<std::uint64_t>(t));
        double p1 = rng_uniform01(seed, 4 * static_cast<std::uint64_t>(t) + 1);
        double a2 = 0.05 * rng_uniform01(seed, 4 * static_cast<std::uint64_t>(t) + 2);
        GridFunction g(ctx.grid_n(), [&](double x) {
            return 1.0 + a1 * std::cos(2.0 * std::numbers::pi * (x + p1)) +
                   a2 * std::sin(4.0 * std::numbers::pi * x);
        });
        if (!cone_member(g, cone, ctx.threads()).first)
            throw std::runtime_error("verify_cone_invariance: sample outside the cone");
        GridFunction img = apply_transfer(ctx, j, g);
        auto member = cone_member(img, tight, ctx.threads());
        if (!member.first)
            throw std::runtime_error(
                "verify_cone_invariance: image left C^{gamma k} at sample " +
                std::to_string(t) + " (margin " + std::to_string(member.second) + ")");
    }
}

// Fraction of j in [0,n) with f^j_w(x) in A_{theta^j(w)}.
inline double visit_frequency(const TransferContext& ctx,
                              const std::vector<ExpansionProfile>& profiles, double x,
                              int n) {
    if (n < 1) throw std::invalid_argument("visit_frequency: n must be positive");
    if (n > ctx.orbit().future)
        throw std::out_of_range("visit_frequency: n exceeds window");
    double cur = wrap01(x);
    int hits = 0;
    for (int j = 0; j < n; ++j) {
        const auto& prof = profiles[static_cast<std::size_t>(ctx.symbol(j))];
        if (prof.in_bad_region(cur)) ++hits;
        cur = eval(ctx.map_at(j), cur);
    }
    return static_cast<double>(hits) / n;
}

} // namespace randeq
