// cone.hpp -- local Hölder seminorms, the cone C^k_delta and its
// projective metric.
//
// The cone consists of positive functions whose Hölder seminorm in balls
// of radius delta is at most k times their infimum. The projective metric
// is computed from the explicit inf/sup formula over triples (x,y,z) with
// d(x,y) < delta; sampling is exhaustive over grid pairs within delta
// against a z-subgrid, so the reported value is a lower bound of the true
// supremum-based metric (the sampling density is part of every report).

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "randeq/circle.hpp"
#include "randeq/grid.hpp"
#include "randeq/parallel.hpp"

namespace randeq {

struct ConeParams {
    double alpha = 1.0;   // Hölder exponent in (0,1]
    double delta = 0.05;  // locality radius
    double k = 100.0;     // cone aperture
    int z_subgrid = 256;  // minimum z-sample count for the metric

    ConeParams() = default;
    ConeParams(double a, double d, double aperture)
        : alpha(a), delta(d), k(aperture) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("ConeParams: alpha must be in (0,1]");
        if (!(delta > 0.0)) throw std::invalid_argument("ConeParams: delta must be positive");
        if (!(k > 0.0)) throw std::invalid_argument("ConeParams: k must be positive");
    }

    // Covering constant of the circle by delta-balls, m = N + 1.
    int m() const { return static_cast<int>(std::ceil(1.0 / (2.0 * delta))) + 1; }

    // Bound R with 1/R <= inf h <= 1 <= sup h <= R for the invariant densities.
    double density_bound() const {
        return 1.0 + m() * k * std::pow(kCircleDiameter, alpha);
    }
};

struct ProjectiveDistance {
    double value = 0.0;   // in [0, +inf]
    double A = 0.0;
    double B = 0.0;

    bool finite() const { return std::isfinite(value); }
};

// Largest local Hölder quotient over grid pairs at circle distance < delta.
inline double holder_seminorm(const GridFunction& g, double alpha, double delta,
                              int threads = 1) {
    if (delta < 2.0 / g.n)
        throw std::invalid_argument("holder_seminorm: delta below grid resolution");
    int n = g.n;
    int reach = static_cast<int>(std::ceil(delta * n)) - 1;
    reach = std::min(reach, n / 2);
    if (reach < 1) throw std::invalid_argument("holder_seminorm: no pairs within delta");

    std::vector<double> dist_pow(static_cast<std::size_t>(reach) + 1, 0.0);
    for (int off = 1; off <= reach; ++off) {
        double d = std::min(static_cast<double>(off) / n, 1.0 - static_cast<double>(off) / n);
        dist_pow[static_cast<std::size_t>(off)] = std::pow(d, alpha);
    }

    std::vector<double> block_max(static_cast<std::size_t>(effective_threads(threads)), 0.0);
    int nb = static_cast<int>(block_max.size());
    std::size_t per = (static_cast<std::size_t>(n) + nb - 1) / nb;
    parallel_for(static_cast<std::size_t>(nb), threads, [&](std::size_t bb, std::size_t be) {
        for (std::size_t b = bb; b < be; ++b) {
            double best = 0.0;
            std::size_t i0 = b * per, i1 = std::min<std::size_t>(n, i0 + per);
            for (std::size_t i = i0; i < i1; ++i) {
                double vi = g.values[i];
                for (int off = 1; off <= reach; ++off) {
                    double dn = static_cast<double>(off) / n;
                    double d = std::min(dn, 1.0 - dn);
                    if (!(d < delta)) continue;
                    double vj = g.values[(i + static_cast<std::size_t>(off)) % n];
                    double q = std::fabs(vi - vj) / dist_pow[static_cast<std::size_t>(off)];
                    if (q > best) best = q;
                }
            }
            block_max[b] = best;
        }
    });
    double best = 0.0;
    for (double v : block_max) best = std::max(best, v);
    return best;
}

// Certified global Hölder constant from a local one (factor m).
inline double globalize_seminorm(double local, const ConeParams& params) {
    if (local < 0.0) throw std::invalid_argument("globalize_seminorm: negative seminorm");
    return local * params.m();
}

// Membership in C^k_delta with margin k - |g|_{alpha,delta}/inf g.
// Non-membership is a value, not an error.
inline std::pair<bool, double> cone_member(const GridFunction& g, const ConeParams& params,
                                           int threads = 1) {
    double lo = g.min();
    if (!(lo > 0.0)) return {false, -std::numeric_limits<double>::infinity()};
    double ratio = holder_seminorm(g, params.alpha, params.delta, threads) / lo;
    return {ratio <= params.k, params.k - ratio};
}

// Projective metric Theta_k between two cone members:
//   A_k = inf, B_k = sup over d(x,y) < delta, z of
//     [k d(x,y)^a psi(z) - (psi(x)-psi(y))] / [k d(x,y)^a phi(z) - (phi(x)-phi(y))]
// Theta = log(B_k / A_k). A nonpositive denominator means phi is not
// strictly inside the cone and is reported as an error.
inline ProjectiveDistance theta_metric(const GridFunction& phi, const GridFunction& psi,
                                       const ConeParams& params, int threads = 1) {
    if (phi.n != psi.n) throw std::invalid_argument("theta_metric: grid mismatch");
    int n = phi.n;
    int reach = static_cast<int>(std::ceil(params.delta * n)) - 1;
    reach = std::min(reach, n / 2);
    if (reach < 1) throw std::invalid_argument("theta_metric: delta below grid resolution");

    if (!cone_member(phi, params, threads).first || !cone_member(psi, params, threads).first)
        throw std::runtime_error("theta_metric: argument outside the cone");

    int zstride = std::max(1, n / std::max(1, params.z_subgrid));
    int zcount = (n + zstride - 1) / zstride;
    std::vector<double> zphi(static_cast<std::size_t>(zcount));
    std::vector<double> zpsi(static_cast<std::size_t>(zcount));
    for (int zi = 0; zi < zcount; ++zi) {
        zphi[static_cast<std::size_t>(zi)] = phi.values[static_cast<std::size_t>(zi) * zstride];
        zpsi[static_cast<std::size_t>(zi)] = psi.values[static_cast<std::size_t>(zi) * zstride];
    }

    std::vector<int> offs;
    std::vector<double> kd;
    for (int off = 1; off <= reach; ++off) {
        double dn = static_cast<double>(off) / n;
        double d = std::min(dn, 1.0 - dn);
        if (!(d < params.delta)) continue;
        offs.push_back(off);
        kd.push_back(params.k * std::pow(d, params.alpha));
    }

    int nb = effective_threads(threads);
    std::vector<double> blockA(static_cast<std::size_t>(nb),
                               std::numeric_limits<double>::infinity());
    std::vector<double> blockB(static_cast<std::size_t>(nb),
                               -std::numeric_limits<double>::infinity());
    std::vector<char> blockBadDen(static_cast<std::size_t>(nb), 0);
    std::size_t per = (static_cast<std::size_t>(n) + nb - 1) / nb;

    parallel_for(static_cast<std::size_t>(nb), threads, [&](std::size_t bb, std::size_t be) {
        for (std::size_t b = bb; b < be; ++b) {
            double A = std::numeric_limits<double>::infinity();
            double B = -std::numeric_limits<double>::infinity();
            bool bad = false;
            std::size_t i0 = b * per, i1 = std::min<std::size_t>(n, i0 + per);
            for (std::size_t i = i0; i < i1 && !bad; ++i) {
                for (std::size_t oi = 0; oi < offs.size() && !bad; ++oi) {
                    double a = kd[oi];
                    std::size_t j = (i + static_cast<std::size_t>(offs[oi])) % n;
                    double dphi = phi.values[i] - phi.values[j];
                    double dpsi = psi.values[i] - psi.values[j];
                    for (int zi = 0; zi < zcount; ++zi) {
                        // both orientations of the pair (x,y)
                        double den1 = a * zphi[static_cast<std::size_t>(zi)] - dphi;
                        double den2 = a * zphi[static_cast<std::size_t>(zi)] + dphi;
                        if (den1 <= 0.0 || den2 <= 0.0) { bad = true; break; }
                        double r1 = (a * zpsi[static_cast<std::size_t>(zi)] - dpsi) / den1;
                        double r2 = (a * zpsi[static_cast<std::size_t>(zi)] + dpsi) / den2;
                        A = std::min(A, std::min(r1, r2));
                        B = std::max(B, std::max(r1, r2));
                    }
                }
            }
            blockA[b] = A;
            blockB[b] = B;
            blockBadDen[b] = bad ? 1 : 0;
        }
    });

    for (char c : blockBadDen)
        if (c) throw std::runtime_error("theta_metric: nonpositive denominator (cone violation)");
    ProjectiveDistance out;
    out.A = *std::min_element(blockA.begin(), blockA.end());
    out.B = *std::max_element(blockB.begin(), blockB.end());
    out.value = std::log(out.B / out.A);
    return out;
}

// Bracketing of Lemma-style bounds: A_k(phi,psi) <= inf(psi/phi) and
// B_k(phi,psi) >= sup(psi/phi) on the grid. (The extremal coefficients
// bracket the ratio of the second argument over the first.)
inline bool sandwich_check(const GridFunction& phi, const GridFunction& psi,
                           const ConeParams& params, int threads = 1) {
    ProjectiveDistance t = theta_metric(phi, psi, params, threads);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < phi.n; ++i) {
        double r = psi[i] / phi[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    double slack = 1e-12 * (1.0 + std::fabs(hi));
    return t.A <= lo + slack && t.B >= hi - slack;
}

} // namespace randeq
