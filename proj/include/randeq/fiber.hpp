// fiber.hpp -- degree-d circle local homeomorphisms given by monotone lifts.
//
// A fiber map is stored as a strictly increasing lift G with G(x+1) = G(x)+d
// together with its derivative. Branch inversion is exact bisection on the
// lift, so preimages come with guaranteed bracketing. The module also
// computes the local inverse-Lipschitz function L_w(x) and classifies the
// bad (weak-expansion) region A_w.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "randeq/circle.hpp"
#include "randeq/grid.hpp"

namespace randeq {

// ---------------------------------------------------------------------------
// FiberMap

struct FiberMap {
    int degree = 2;
    std::function<double(double)> lift;         // G, strictly increasing
    std::function<double(double)> derivative;   // G'
    std::string label;

    // Checks monotonicity and G(1)-G(0)=d on a validation grid.
    void validate(int check_n = 2048) const {
        if (degree < 2) throw std::invalid_argument("FiberMap: degree must be >= 2");
        if (!lift || !derivative) throw std::invalid_argument("FiberMap: missing lift");
        double d = lift(1.0) - lift(0.0);
        if (std::fabs(d - degree) > 1e-10)
            throw std::invalid_argument("FiberMap '" + label + "': G(1)-G(0) = " +
                                        std::to_string(d) + " != degree");
        double prev = lift(0.0);
        for (int i = 1; i <= check_n; ++i) {
            double x = static_cast<double>(i) / check_n;
            double cur = lift(x);
            if (!(cur > prev))
                throw std::invalid_argument("FiberMap '" + label +
                                            "': lift not strictly increasing near x=" +
                                            std::to_string(x));
            prev = cur;
            if (!(derivative(x) > 0.0))
                throw std::invalid_argument("FiberMap '" + label +
                                            "': nonpositive derivative at x=" +
                                            std::to_string(x));
        }
    }
};

inline double eval(const FiberMap& f, double x) { return wrap01(f.lift(wrap01(x))); }

// Invert the lift on [lo-margin, hi+margin] for a target value t in
// [G(lo), G(hi)]. Plain bisection: the lift is strictly increasing.
inline double invert_lift(const FiberMap& f, double t, double lo, double hi,
                          int iters = 80) {
    double glo = f.lift(lo), ghi = f.lift(hi);
    if (!(glo <= t && t <= ghi))
        throw std::runtime_error("invert_lift: target not bracketed (lift not monotone?)");
    for (int it = 0; it < iters; ++it) {
        double mid = 0.5 * (lo + hi);
        if (f.lift(mid) < t) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// All d preimages of x, sorted increasing in [0,1). One root per lift branch.
inline std::vector<double> preimages(const FiberMap& f, double x, double tol = 1e-12) {
    if (!(tol > 0.0)) throw std::invalid_argument("preimages: tol must be positive");
    x = wrap01(x);
    double g0 = f.lift(0.0);
    // smallest lift value >= G(0) congruent to x mod 1
    double t0 = x + std::ceil(g0 - x);
    std::vector<double> roots;
    roots.reserve(static_cast<std::size_t>(f.degree));
    for (int k = 0; k < f.degree; ++k) {
        double y = wrap01(invert_lift(f, t0 + k, 0.0, 1.0));
        if (circle_dist(eval(f, y), x) > tol)
            throw std::runtime_error("preimages: branch " + std::to_string(k) +
                                     " did not converge to tolerance");
        roots.push_back(y);
    }
    std::sort(roots.begin(), roots.end());
    for (std::size_t i = 1; i < roots.size(); ++i)
        if (!(roots[i] > roots[i - 1]))
            throw std::runtime_error("preimages: coincident branch roots");
    return roots;
}

// Local inverse Lipschitz constant L_w(x): max of 1/G' over a probe
// sub-grid of the branch neighborhood of x. Conservative upper estimate;
// monotone nondecreasing in the probe radius.
inline double expansion_constant(const FiberMap& f, double x, double probe_radius,
                                 int probe_points = 33) {
    if (!(probe_radius >= 0.0))
        throw std::invalid_argument("expansion_constant: negative probe radius");
    double best = 0.0;
    for (int i = 0; i < probe_points; ++i) {
        double u = x - probe_radius +
                   (2.0 * probe_radius * i) / (probe_points - 1);
        double g = f.derivative(wrap01(u));
        if (!(g > 0.0))
            throw std::runtime_error("expansion_constant: nonpositive derivative at probe point");
        best = std::max(best, 1.0 / g);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Expansion profile: bad region A_w and the covering count q_w

struct CircleInterval {
    double lo = 0.0;   // interval is [lo, hi] traversed forward; may wrap
    double hi = 0.0;

    double length() const {
        double len = hi - lo;
        return (len >= 0.0) ? len : len + 1.0;
    }

    bool contains(double x) const {
        x = wrap01(x);
        if (lo <= hi) return x >= lo && x <= hi;
        return x >= lo || x <= hi;   // wrapping interval
    }
};

struct ExpansionProfile {
    GridFunction L_of_x;                     // grid-sampled L_w(x)
    double sigma = 0.0;                      // sigma_w > 1
    double L_bound = 1.0;                    // L_w >= 1
    std::vector<CircleInterval> bad_region;  // disjoint intervals A_w
    int q = 1;                               // branches meeting A_w (1 if empty)
    int p = 0;                               // degree - q
    double probe_radius = 0.0;
    bool cond_I_ok = true;    // L(x) <= L_bound on A_w (off A_w holds by construction)
    bool cond_II_ok = true;   // q < degree

    bool in_bad_region(double x) const {
        for (const auto& iv : bad_region)
            if (iv.contains(x)) return true;
        return false;
    }

    double bad_measure() const {
        double s = 0.0;
        for (const auto& iv : bad_region) s += iv.length();
        return s;
    }
};

// Domain boundaries of the d monotone lift branches: b_k = G^{-1}(G(0)+k).
inline std::vector<double> branch_boundaries(const FiberMap& f) {
    std::vector<double> b(static_cast<std::size_t>(f.degree) + 1);
    b[0] = 0.0;
    for (int k = 1; k < f.degree; ++k)
        b[static_cast<std::size_t>(k)] =
            invert_lift(f, f.lift(0.0) + k, 0.0, 1.0);
    b[static_cast<std::size_t>(f.degree)] = 1.0;
    return b;
}

// Classify the bad region {x : L_w(x) >= 1/sigma} on the grid, pad by one
// cell on each side (overestimating A_w keeps the hypothesis checks
// conservative), and count the lift branches it touches.
inline ExpansionProfile build_expansion_profile(const FiberMap& f, double sigma,
                                                double L_bound, int grid_n) {
    if (!(sigma > 1.0)) throw std::invalid_argument("build_expansion_profile: sigma must be > 1");
    if (!(L_bound >= 1.0)) throw std::invalid_argument("build_expansion_profile: L_bound must be >= 1");
    if (grid_n < 16) throw std::invalid_argument("build_expansion_profile: grid too small");

    ExpansionProfile prof;
    prof.sigma = sigma;
    prof.L_bound = L_bound;
    prof.probe_radius = 2.0 / grid_n;
    prof.L_of_x = GridFunction(grid_n);

    std::vector<bool> bad(static_cast<std::size_t>(grid_n), false);
    // boundary-case equality (e.g. the doubling map at sigma = 2) counts as
    // expanding; the probed L is already an upper estimate
    double thresh = (1.0 / sigma) * (1.0 + 1e-12);
    for (int i = 0; i < grid_n; ++i) {
        double L = expansion_constant(f, static_cast<double>(i) / grid_n, prof.probe_radius);
        prof.L_of_x[i] = L;
        if (L >= thresh) bad[static_cast<std::size_t>(i)] = true;
    }

    // pad by one grid cell (closure)
    std::vector<bool> padded(bad);
    for (int i = 0; i < grid_n; ++i) {
        if (bad[static_cast<std::size_t>(i)]) {
            padded[static_cast<std::size_t>((i + 1) % grid_n)] = true;
            padded[static_cast<std::size_t>((i + grid_n - 1) % grid_n)] = true;
        }
    }

    // minimal list of disjoint maximal runs of padded-bad nodes
    bool all_bad = std::all_of(padded.begin(), padded.end(), [](bool b) { return b; });
    if (all_bad) {
        prof.bad_region.push_back({0.0, 1.0 - 1.0 / grid_n});
    } else {
        int start = 0;   // some good node exists; start runs after a good node
        while (padded[static_cast<std::size_t>(start)]) ++start;
        int i = start;
        do {
            int next = (i + 1) % grid_n;
            if (padded[static_cast<std::size_t>(next)] && !padded[static_cast<std::size_t>(i)]) {
                int runb = next;
                int rune = runb;
                while (padded[static_cast<std::size_t>((rune + 1) % grid_n)])
                    rune = (rune + 1) % grid_n;
                prof.bad_region.push_back({static_cast<double>(runb) / grid_n,
                                           static_cast<double>(rune) / grid_n});
                i = rune;
            } else {
                i = next;
            }
        } while (i != start);
    }
    // condition (I) on the bad region: L(x) <= L_bound there
    for (int i = 0; i < grid_n; ++i)
        if (padded[static_cast<std::size_t>(i)] && prof.L_of_x[i] > L_bound)
            prof.cond_I_ok = false;

    // q = minimal number of injectivity arcs covering the bad region
    // (1 if empty). An open arc is an injectivity domain iff its lift image
    // has length <= 1, so each bad interval I needs ceil(|G(I)|) arcs.
    if (prof.bad_region.empty()) {
        prof.q = 1;
    } else {
        int q = 0;
        for (const auto& iv : prof.bad_region) {
            double img_len = f.lift(iv.lo + iv.length()) - f.lift(iv.lo);
            q += std::max(1, static_cast<int>(std::ceil(img_len - 1e-9)));
        }
        prof.q = std::min(std::max(1, q), f.degree);
    }
    prof.p = f.degree - prof.q;
    prof.cond_II_ok = prof.q < f.degree;
    return prof;
}

// ---------------------------------------------------------------------------
// Potentials

struct PotentialFiber {
    std::function<double(double)> value;   // closed form on the circle
    GridFunction cache;                    // values at grid nodes, agrees exactly
    double holder_exponent = 1.0;          // alpha in (0,1]
    double eps_phi = 0.01;                 // small-variation budget
    double inf_value = 0.0;                // analytic inf over the circle
    double sup_value = 0.0;                // analytic sup
    std::string label;

    void build_cache(int grid_n) { cache = GridFunction(grid_n, value); }
};

inline PotentialFiber make_zero_potential(int grid_n, double alpha, double eps_phi) {
    PotentialFiber p;
    p.value = [](double) { return 0.0; };
    p.holder_exponent = alpha;
    p.eps_phi = eps_phi;
    p.inf_value = p.sup_value = 0.0;
    p.label = "zero";
    p.build_cache(grid_n);
    return p;
}

inline PotentialFiber make_constant_potential(int grid_n, double c, double alpha,
                                              double eps_phi) {
    PotentialFiber p;
    p.value = [c](double) { return c; };
    p.holder_exponent = alpha;
    p.eps_phi = eps_phi;
    p.inf_value = p.sup_value = c;
    p.label = "constant " + std::to_string(c);
    p.build_cache(grid_n);
    return p;
}

// amplitude * cos(2 pi freq x)
inline PotentialFiber make_cosine_potential(int grid_n, double amplitude, int freq,
                                            double alpha, double eps_phi) {
    PotentialFiber p;
    p.value = [amplitude, freq](double x) {
        return amplitude * std::cos(2.0 * std::numbers::pi * freq * x);
    };
    p.holder_exponent = alpha;
    p.eps_phi = eps_phi;
    p.inf_value = -std::fabs(amplitude);
    p.sup_value = std::fabs(amplitude);
    p.label = "cosine " + std::to_string(amplitude);
    p.build_cache(grid_n);
    return p;
}

struct FiberFamily {
    std::vector<FiberMap> maps;             // one per symbol
    std::vector<PotentialFiber> potentials; // one per symbol

    int symbols() const { return static_cast<int>(maps.size()); }

    int max_degree() const {
        int d = 0;
        for (const auto& m : maps) d = std::max(d, m.degree);
        return d;
    }

    void validate() const {
        if (maps.empty()) throw std::invalid_argument("FiberFamily: no maps");
        if (maps.size() != potentials.size())
            throw std::invalid_argument("FiberFamily: maps/potentials size mismatch");
        for (const auto& m : maps) m.validate();
    }
};

// ---------------------------------------------------------------------------
// Built-in map families

inline FiberMap make_linear_map(int d) {
    FiberMap f;
    f.degree = d;
    f.lift = [d](double x) { return d * x; };
    f.derivative = [d](double) { return static_cast<double>(d); };
    f.label = "linear " + std::to_string(d);
    return f;
}

// lift d*x + a*sin(2 pi x)/(2 pi); requires |a| < d for monotonicity
inline FiberMap make_sine_map(int d, double a) {
    FiberMap f;
    f.degree = d;
    f.lift = [d, a](double x) {
        return d * x + a * std::sin(2.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi);
    };
    f.derivative = [d, a](double x) {
        return d + a * std::cos(2.0 * std::numbers::pi * x);
    };
    f.label = "sine " + std::to_string(d) + " " + std::to_string(a);
    return f;
}

// Manneville-Pomeau with neutral fixed point at 0:
//   G(x) = x + 2^beta x^{1+beta} on [0,1/2], 2x on [1/2,1].
inline FiberMap make_manneville_map(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("make_manneville_map: beta must be in (0,1)");
    FiberMap f;
    f.degree = 2;
    double c = std::pow(2.0, beta);
    f.lift = [c, beta](double x) {
        double k = std::floor(x);
        double u = x - k;
        double v = (u <= 0.5) ? u + c * std::pow(u, 1.0 + beta) : 2.0 * u;
        return v + 2.0 * k;
    };
    f.derivative = [c, beta](double x) {
        double u = x - std::floor(x);
        return (u <= 0.5) ? 1.0 + c * (1.0 + beta) * std::pow(u, beta) : 2.0;
    };
    f.label = "manneville " + std::to_string(beta);
    return f;
}

// Map defined by a tabulated lift: rows (x, G(x), G'(x)) with x increasing
// over [0,1]; G and G' evaluate by linear interpolation of the table.
struct LiftTable {
    std::vector<double> x, g, dg;

    double interp(const std::vector<double>& col, double u) const {
        auto it = std::upper_bound(x.begin(), x.end(), u);
        std::size_t j = (it == x.begin()) ? 1 : static_cast<std::size_t>(it - x.begin());
        if (j >= x.size()) j = x.size() - 1;
        double t = (u - x[j - 1]) / (x[j] - x[j - 1]);
        return col[j - 1] + t * (col[j] - col[j - 1]);
    }
};

inline FiberMap make_tabulated_map(LiftTable table, const std::string& label) {
    if (table.x.size() < 3 || table.x.size() != table.g.size() ||
        table.x.size() != table.dg.size())
        throw std::invalid_argument("make_tabulated_map: bad table");
    if (std::fabs(table.x.front()) > 1e-12 || std::fabs(table.x.back() - 1.0) > 1e-12)
        throw std::invalid_argument("make_tabulated_map: x column must span [0,1]");
    int degree = static_cast<int>(std::llround(table.g.back() - table.g.front()));
    auto shared = std::make_shared<LiftTable>(std::move(table));
    FiberMap f;
    f.degree = degree;
    f.lift = [shared, degree](double x) {
        double k = std::floor(x);
        return shared->interp(shared->g, x - k) + degree * k;
    };
    f.derivative = [shared](double x) {
        return shared->interp(shared->dg, x - std::floor(x));
    };
    f.label = label;
    return f;
}

} // namespace randeq
