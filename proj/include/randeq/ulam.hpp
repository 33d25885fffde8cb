// ulam.hpp -- independent Ulam-type oracle for deterministic fibers.
//
// Hat-function collocation of the transfer operator on the grid:
//   B[i][j] = sum over preimages y of node x_i of e^{phi(y)} hat_j(y).
// The matrix is sparse (2 deg entries per row). Leading eigendata by power
// iteration; the right eigenvector approximates h, the left one nu. Used
// strictly as an oracle against the orbit method.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "randeq/fiber.hpp"
#include "randeq/grid.hpp"

namespace randeq {

struct UlamMatrix {
    int n = 0;
    int degree = 0;
    int symbol = 0;
    // row i holds 2*degree (col, weight) pairs
    std::vector<int> cols;
    std::vector<double> weights;

    std::size_t row_begin(int i) const {
        return static_cast<std::size_t>(i) * 2 * static_cast<std::size_t>(degree);
    }

    double row_sum(int i) const {
        double s = 0.0;
        for (std::size_t k = row_begin(i); k < row_begin(i + 1); ++k) s += weights[k];
        return s;
    }

    // v <- B v
    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = row_begin(i); k < row_begin(i + 1); ++k)
                acc += weights[k] * v[static_cast<std::size_t>(cols[k])];
            out[static_cast<std::size_t>(i)] = acc;
        }
    }

    // u <- B^T u
    void apply_transpose(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double ui = u[static_cast<std::size_t>(i)];
            if (ui == 0.0) continue;
            for (std::size_t k = row_begin(i); k < row_begin(i + 1); ++k)
                out[static_cast<std::size_t>(cols[k])] += weights[k] * ui;
        }
    }
};

inline UlamMatrix ulam_matrix(const FiberMap& f, const PotentialFiber& pot, int n,
                              double preimage_tol = 1e-12, int symbol = 0) {
    if (n < 16 || (n & (n - 1)) != 0 || n > (1 << 14))
        throw std::invalid_argument("ulam_matrix: n must be a power of two in [16, 2^14]");
    UlamMatrix B;
    B.n = n;
    B.degree = f.degree;
    B.symbol = symbol;
    B.cols.resize(static_cast<std::size_t>(n) * 2 * static_cast<std::size_t>(f.degree));
    B.weights.resize(B.cols.size());
    for (int i = 0; i < n; ++i) {
        auto ys = preimages(f, static_cast<double>(i) / n, preimage_tol);
        std::size_t k = B.row_begin(i);
        for (int b = 0; b < f.degree; ++b) {
            double y = ys[static_cast<std::size_t>(b)];
            double w = std::exp(pot.value(y));
            double u = wrap01(y) * n;
            int i0 = static_cast<int>(u);
            if (i0 >= n) i0 = n - 1;
            double frac = u - i0;
            B.cols[k] = i0;
            B.weights[k] = w * (1.0 - frac);
            ++k;
            B.cols[k] = (i0 + 1) % n;
            B.weights[k] = w * frac;
            ++k;
        }
    }
    return B;
}

struct UlamEigen {
    double lambda = 0.0;
    GridFunction h;               // right eigenvector, normalized nu(h) = 1
    std::vector<double> nu;       // left eigenvector, sums to 1
    int iterations = 0;
};

// Leading eigendata by power iteration to relative tolerance rel_tol.
inline UlamEigen ulam_leading_eigen(const UlamMatrix& B, double rel_tol = 1e-12,
                                    int max_iters = 100000) {
    int n = B.n;
    UlamEigen out;
    std::vector<double> v(static_cast<std::size_t>(n), 1.0), tmp;
    double lambda = 0.0;
    int it = 0;
    for (; it < max_iters; ++it) {
        B.apply(v, tmp);
        double sv = 0.0, st = 0.0;
        for (int i = 0; i < n; ++i) {
            sv += v[static_cast<std::size_t>(i)];
            st += tmp[static_cast<std::size_t>(i)];
        }
        double lam = st / sv;
        double scale = static_cast<double>(n) / st;
        double drift = 0.0;
        for (int i = 0; i < n; ++i) {
            double next = tmp[static_cast<std::size_t>(i)] * scale;
            drift = std::max(drift, std::fabs(next - v[static_cast<std::size_t>(i)]));
            v[static_cast<std::size_t>(i)] = next;
        }
        bool lam_ok = std::fabs(lam - lambda) <= rel_tol * std::fabs(lam);
        lambda = lam;
        if (lam_ok && drift <= rel_tol * 10.0) break;
    }
    if (it >= max_iters)
        throw std::runtime_error("ulam_leading_eigen: power iteration stagnated");

    std::vector<double> u(static_cast<std::size_t>(n), 1.0), utmp;
    for (int jt = 0; jt < max_iters; ++jt) {
        B.apply_transpose(u, utmp);
        double s = 0.0;
        for (double x : utmp) s += x;
        double drift = 0.0;
        for (int i = 0; i < n; ++i) {
            double next = utmp[static_cast<std::size_t>(i)] / s;
            drift = std::max(drift, std::fabs(next - u[static_cast<std::size_t>(i)]));
            u[static_cast<std::size_t>(i)] = next;
        }
        if (drift <= rel_tol * 10.0) break;
        if (jt + 1 >= max_iters)
            throw std::runtime_error("ulam_leading_eigen: adjoint iteration stagnated");
    }

    out.lambda = lambda;
    out.nu = std::move(u);
    out.h = GridFunction(n);
    double dot = 0.0;
    for (int i = 0; i < n; ++i) dot += out.nu[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) out.h[i] = v[static_cast<std::size_t>(i)] / dot;
    out.iterations = it + 1;
    return out;
}

} // namespace randeq
