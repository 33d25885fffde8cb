// base.hpp -- the ergodic base of the skew product.
//
// The base is a two-sided full shift on a finite alphabet with an i.i.d.
// symbol law. Orbits are finite windows indexed from -past to +future;
// index j labels the fiber over theta^j(w). Every operation states the
// window depth it needs and fails loudly past the window.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "randeq/rng.hpp"

namespace randeq {

struct BaseSystem {
    int alphabet_size = 1;
    std::vector<double> symbol_probabilities;   // sums to 1

    BaseSystem() : symbol_probabilities{1.0} {}

    BaseSystem(int s, std::vector<double> probs)
        : alphabet_size(s), symbol_probabilities(std::move(probs)) {
        validate();
    }

    void validate() const {
        if (alphabet_size < 1)
            throw std::invalid_argument("BaseSystem: alphabet_size must be >= 1");
        if (static_cast<int>(symbol_probabilities.size()) != alphabet_size)
            throw std::invalid_argument("BaseSystem: probability vector size mismatch");
        double sum = 0.0;
        for (double p : symbol_probabilities) {
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("BaseSystem: probability outside [0,1]");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("BaseSystem: probabilities must sum to 1 (got " +
                                        std::to_string(sum) + ")");
    }
};

// A finite window of base symbols around the origin fiber. symbols[0]
// corresponds to index -past, symbols[past] to the origin.
struct BaseOrbit {
    std::vector<int> symbols;
    int past = 0;
    int future = 0;
    std::uint64_t seed = 0;

    int length() const { return past + future + 1; }

    int symbol_at(int j) const {
        if (j < -past || j > future)
            throw std::out_of_range("BaseOrbit: index " + std::to_string(j) +
                                    " outside window [-" + std::to_string(past) + "," +
                                    std::to_string(future) + "]");
        return symbols[static_cast<std::size_t>(j + past)];
    }

    // Same window with the origin moved forward by `by` steps.
    BaseOrbit shifted(int by) const {
        if (by < -past || by > future)
            throw std::out_of_range("BaseOrbit::shifted: shift leaves window");
        BaseOrbit o = *this;
        o.past = past + by;
        o.future = future - by;
        return o;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(symbols.size());
        for (int sym : symbols)
            s += (sym < 10) ? static_cast<char>('0' + sym)
                            : static_cast<char>('a' + (sym - 10));
        return s;
    }
};

// Draw a window of i.i.d. symbols. Deterministic in (seed, past, future):
// index j of the window is the (j + past)-th counter draw of the stream.
inline BaseOrbit sample_orbit(const BaseSystem& base, std::uint64_t seed,
                              int past, int future) {
    base.validate();
    if (past < 0 || future < 0)
        throw std::invalid_argument("sample_orbit: window lengths must be nonnegative");
    if (past + future < 1)
        throw std::invalid_argument("sample_orbit: zero-length window");

    BaseOrbit orbit;
    orbit.past = past;
    orbit.future = future;
    orbit.seed = seed;
    orbit.symbols.resize(static_cast<std::size_t>(past + future + 1));
    for (int i = 0; i < past + future + 1; ++i) {
        double u = rng_uniform01(seed, static_cast<std::uint64_t>(i));
        double acc = 0.0;
        int sym = base.alphabet_size - 1;
        for (int s = 0; s < base.alphabet_size; ++s) {
            acc += base.symbol_probabilities[static_cast<std::size_t>(s)];
            if (u < acc) { sym = s; break; }
        }
        orbit.symbols[static_cast<std::size_t>(i)] = sym;
    }
    return orbit;
}

inline int symbol_at(const BaseOrbit& orbit, int j) { return orbit.symbol_at(j); }

// (1/n) sum_{j=0}^{n-1} values[symbol_at(j)].
inline double birkhoff_average(const BaseOrbit& orbit, std::span<const double> values,
                               int n) {
    if (n < 1) throw std::invalid_argument("birkhoff_average: n must be positive");
    if (n > orbit.future)
        throw std::out_of_range("birkhoff_average: n exceeds forward window");
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        int s = orbit.symbol_at(j);
        if (s < 0 || static_cast<std::size_t>(s) >= values.size())
            throw std::out_of_range("birkhoff_average: symbol without table entry");
        sum += values[static_cast<std::size_t>(s)];
    }
    return sum / static_cast<double>(n);
}

} // namespace randeq
