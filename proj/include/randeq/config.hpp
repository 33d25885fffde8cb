// config.hpp -- experiment configuration: parsing, validation, hashing.
//
// The native format is a sectioned key-value text file (diffable
// provenance); a JSON object with the same structure is accepted as an
// alternative encoding. Parse errors carry line/field diagnostics.

#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "randeq/base.hpp"
#include "randeq/cone.hpp"
#include "randeq/fiber.hpp"

namespace randeq {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 17 significant digits, the output precision used everywhere.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct MapSpec {
    std::string kind = "linear";   // linear | sine | manneville | csv
    int degree = 2;
    double a = 0.0;                // sine amplitude
    double beta = 0.5;             // manneville exponent
    std::string csv_path;
    double sigma = 1.5;            // proposed expansion constant off A_w
    double L_bound = 1.0;          // proposed bound on A_w
};

struct PotentialSpec {
    std::string kind = "zero";     // zero | constant | cosine
    double value = 0.0;            // constant level
    double amplitude = 0.0;        // cosine amplitude
    int frequency = 1;
};

// Observables are sums of harmonics, written "c<freq>:<amp>" or
// "s<freq>:<amp>" separated by spaces, e.g. "c1:1 c2:1".
struct ObservableSpec {
    struct Harmonic {
        bool sine = false;
        int freq = 1;
        double amp = 1.0;
    };
    std::vector<Harmonic> harmonics{{false, 1, 1.0}};
    std::string text = "c1:1";

    double operator()(double x) const {
        double s = 0.0;
        for (const auto& h : harmonics) {
            double arg = 2.0 * std::numbers::pi * h.freq * x;
            s += h.amp * (h.sine ? std::sin(arg) : std::cos(arg));
        }
        return s;
    }
};

inline ObservableSpec parse_observable(const std::string& text) {
    ObservableSpec obs;
    obs.text = text;
    obs.harmonics.clear();
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        ObservableSpec::Harmonic h;
        if (tok[0] == 'c') h.sine = false;
        else if (tok[0] == 's') h.sine = true;
        else throw ConfigError("observable term '" + tok + "' must start with c or s");
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw ConfigError("observable term '" + tok + "' missing ':<amp>'");
        try {
            h.freq = std::stoi(tok.substr(1, colon - 1));
            h.amp = std::stod(tok.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("observable term '" + tok + "' is not <c|s><freq>:<amp>");
        }
        if (h.freq < 1) throw ConfigError("observable frequency must be >= 1");
        obs.harmonics.push_back(h);
    }
    if (obs.harmonics.empty()) throw ConfigError("empty observable");
    return obs;
}

struct StabilitySpec {
    std::string parameter = "map_a";   // map_a | potential_scale
    std::vector<double> values;
    double reference = 0.0;
};

struct ExperimentConfig {
    // experiment
    std::uint64_t seed = 1;
    std::string out_dir = "runs";
    int threads = 1;
    // base
    int alphabet = 1;
    std::vector<double> probabilities{1.0};
    // fibers
    std::vector<MapSpec> maps{MapSpec{}};
    std::vector<PotentialSpec> potentials{PotentialSpec{}};
    double eps_phi = 0.01;
    // cone
    double alpha = 1.0;
    double delta = 0.05;
    double cone_k = 100.0;
    // numerics
    int grid = 4096;
    int nu_depth = 18;
    int past_depth = 30;
    int positions = 8;
    double anchor = 0.0;
    double preimage_tol = 1e-12;
    double c = 0.0;     // 0 -> default rule from the profiles
    double rho = 0.9;
    int orbit_past = 0;    // 0 -> auto
    int orbit_future = 0;  // 0 -> auto
    // pressure
    int pressure_n = 1024;
    int separated_n = 12;
    double separated_eps = 0.25;
    int balls_N = 12;
    double balls_eps = 0.45;
    int entropy_samples = 10000;
    int refinement_steps = 2;
    // gibbs
    double gibbs_x = 0.1234;
    double gibbs_eps = 0.05;
    int gibbs_span = 128;
    int gibbs_max_times = 10;
    // decay
    int decay_n_max = 10;
    ObservableSpec decay_psi;
    ObservableSpec decay_phi_obs;
    int decay_pairs = 32;
    // stability
    StabilitySpec stability;

    void validate() const {
        if (alphabet < 1) throw ConfigError("base.alphabet must be >= 1");
        if (static_cast<int>(probabilities.size()) != alphabet)
            throw ConfigError("base.probabilities must have one entry per symbol");
        double sum = 0.0;
        for (double p : probabilities) {
            if (p < 0.0 || p > 1.0) throw ConfigError("base.probabilities entries must be in [0,1]");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-12) throw ConfigError("base.probabilities must sum to 1");
        if (static_cast<int>(maps.size()) != alphabet)
            throw ConfigError("need one [map i] section per symbol (" +
                              std::to_string(maps.size()) + " given, alphabet " +
                              std::to_string(alphabet) + ")");
        if (static_cast<int>(potentials.size()) != alphabet)
            throw ConfigError("need one [potential i] section per symbol");
        for (const auto& m : maps) {
            if (!(m.sigma > 1.0)) throw ConfigError("map.sigma must be > 1");
            if (!(m.L_bound >= 1.0)) throw ConfigError("map.L_bound must be >= 1");
        }
        if (!(eps_phi > 0.0)) throw ConfigError("potential.eps_phi must be positive");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("cone.alpha must be in (0,1]");
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("cone.delta must be in (0, 1)");
        if (!(cone_k > 0.0)) throw ConfigError("cone.k must be positive");
        if (grid < 64 || (grid & (grid - 1)) != 0)
            throw ConfigError("numerics.grid must be a power of two >= 64");
        if (nu_depth < 1) throw ConfigError("numerics.nu_depth must be >= 1");
        if (past_depth < 1) throw ConfigError("numerics.past_depth must be >= 1");
        if (positions < 2) throw ConfigError("numerics.positions must be >= 2");
        if (!(preimage_tol > 0.0)) throw ConfigError("numerics.preimage_tol must be positive");
        if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("numerics.rho must be in (0,1)");
        if (c < 0.0) throw ConfigError("numerics.c must be >= 0 (0 selects the default)");
        if (pressure_n < 2) throw ConfigError("pressure.n must be >= 2");
        if (separated_n < 1 || separated_n > 16)
            throw ConfigError("pressure.separated_n must be in [1,16]");
        if (!(separated_eps > 0.0 && separated_eps < 0.5))
            throw ConfigError("pressure.separated_eps must be in (0, 0.5)");
        if (balls_N < 1) throw ConfigError("pressure.balls_N must be >= 1");
        if (!(balls_eps > 0.0 && balls_eps < 0.5))
            throw ConfigError("pressure.balls_eps must be in (0, 0.5)");
        if (entropy_samples < 1) throw ConfigError("pressure.entropy_samples must be >= 1");
        if (!(gibbs_eps > 0.0 && gibbs_eps < 0.5))
            throw ConfigError("gibbs.eps must be in (0, 0.5)");
        if (gibbs_span < 8) throw ConfigError("gibbs.span must be >= 8");
        if (decay_n_max < 1) throw ConfigError("decay.n_max must be >= 1");
        if (decay_pairs < 32) throw ConfigError("decay.pairs must be >= 32");
        if (stability.parameter != "map_a" && stability.parameter != "potential_scale")
            throw ConfigError("stability.parameter must be map_a or potential_scale");
        if (threads < 1) throw ConfigError("experiment.threads must be >= 1");
    }

    // Orbit window lengths needed by the enabled stages.
    int resolved_past() const { return orbit_past > 0 ? orbit_past : past_depth + 4; }
    int resolved_future() const {
        if (orbit_future > 0) return orbit_future;
        int need = positions + gibbs_span + 64;   // gibbs exactness reserve
        need = std::max(need, pressure_n + 1);
        need = std::max(need, decay_n_max + 1);
        need = std::max(need, std::max(separated_n, balls_N) + 1);
        return need + nu_depth + 8;
    }

    // Canonical flat rendering: sorted section.key=value lines. Used for
    // hashing and for the manifest snapshot.
    std::string canonical() const {
        std::map<std::string, std::string> kv;
        kv["experiment.seed"] = std::to_string(seed);
        kv["experiment.threads"] = std::to_string(threads);
        kv["base.alphabet"] = std::to_string(alphabet);
        for (std::size_t i = 0; i < probabilities.size(); ++i)
            kv["base.probabilities." + std::to_string(i)] = fmt17(probabilities[i]);
        for (std::size_t i = 0; i < maps.size(); ++i) {
            std::string p = "map." + std::to_string(i) + ".";
            const auto& m = maps[i];
            kv[p + "kind"] = m.kind;
            kv[p + "degree"] = std::to_string(m.degree);
            kv[p + "a"] = fmt17(m.a);
            kv[p + "beta"] = fmt17(m.beta);
            kv[p + "csv"] = m.csv_path;
            kv[p + "sigma"] = fmt17(m.sigma);
            kv[p + "L_bound"] = fmt17(m.L_bound);
        }
        for (std::size_t i = 0; i < potentials.size(); ++i) {
            std::string p = "potential." + std::to_string(i) + ".";
            const auto& q = potentials[i];
            kv[p + "kind"] = q.kind;
            kv[p + "value"] = fmt17(q.value);
            kv[p + "amplitude"] = fmt17(q.amplitude);
            kv[p + "frequency"] = std::to_string(q.frequency);
        }
        kv["potential.eps_phi"] = fmt17(eps_phi);
        kv["cone.alpha"] = fmt17(alpha);
        kv["cone.delta"] = fmt17(delta);
        kv["cone.k"] = fmt17(cone_k);
        kv["numerics.grid"] = std::to_string(grid);
        kv["numerics.nu_depth"] = std::to_string(nu_depth);
        kv["numerics.past_depth"] = std::to_string(past_depth);
        kv["numerics.positions"] = std::to_string(positions);
        kv["numerics.anchor"] = fmt17(anchor);
        kv["numerics.preimage_tol"] = fmt17(preimage_tol);
        kv["numerics.c"] = fmt17(c);
        kv["numerics.rho"] = fmt17(rho);
        kv["numerics.orbit_past"] = std::to_string(orbit_past);
        kv["numerics.orbit_future"] = std::to_string(orbit_future);
        kv["pressure.n"] = std::to_string(pressure_n);
        kv["pressure.separated_n"] = std::to_string(separated_n);
        kv["pressure.separated_eps"] = fmt17(separated_eps);
        kv["pressure.balls_N"] = std::to_string(balls_N);
        kv["pressure.balls_eps"] = fmt17(balls_eps);
        kv["pressure.entropy_samples"] = std::to_string(entropy_samples);
        kv["pressure.refinement_steps"] = std::to_string(refinement_steps);
        kv["gibbs.x"] = fmt17(gibbs_x);
        kv["gibbs.eps"] = fmt17(gibbs_eps);
        kv["gibbs.span"] = std::to_string(gibbs_span);
        kv["gibbs.max_times"] = std::to_string(gibbs_max_times);
        kv["decay.n_max"] = std::to_string(decay_n_max);
        kv["decay.psi"] = decay_psi.text;
        kv["decay.phi_obs"] = decay_phi_obs.text;
        kv["decay.pairs"] = std::to_string(decay_pairs);
        kv["stability.parameter"] = stability.parameter;
        for (std::size_t i = 0; i < stability.values.size(); ++i)
            kv["stability.values." + std::to_string(i)] = fmt17(stability.values[i]);
        kv["stability.reference"] = fmt17(stability.reference);
        std::string out;
        for (const auto& [k, v] : kv) {
            out += k;
            out += '=';
            out += v;
            out += '\n';
        }
        return out;
    }

    std::uint64_t hash() const {
        std::string text = canonical();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : text) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return h;
    }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parse_double_list(const std::string& v, const std::string& field) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError(field + ": '" + tok + "' is not a number");
        }
    }
    return out;
}

inline double parse_double(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (trim(v.substr(pos)).size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field + ": '" + v + "' is not a number");
    }
}

inline long long parse_int(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (trim(v.substr(pos)).size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(field + ": '" + v + "' is not an integer");
    }
}

} // namespace detail

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& section,
                               int section_index, const std::string& key,
                               const std::string& value, const std::string& where) {
    using detail::parse_double;
    using detail::parse_int;
    auto field = where + " [" + section + "] " + key;
    auto ensure_symbol = [&](std::vector<MapSpec>* ms, std::vector<PotentialSpec>* ps) {
        if (section_index < 0)
            throw ConfigError(field + ": section needs a symbol index");
        if (ms) while (static_cast<int>(ms->size()) <= section_index) ms->push_back({});
        if (ps) while (static_cast<int>(ps->size()) <= section_index) ps->push_back({});
    };

    if (section == "experiment") {
        if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(value, field));
        else if (key == "out") cfg.out_dir = value;
        else if (key == "threads") cfg.threads = static_cast<int>(parse_int(value, field));
        else throw ConfigError(field + ": unknown key");
    } else if (section == "base") {
        if (key == "alphabet") cfg.alphabet = static_cast<int>(parse_int(value, field));
        else if (key == "probabilities")
            cfg.probabilities = detail::parse_double_list(value, field);
        else throw ConfigError(field + ": unknown key");
    } else if (section == "map") {
        ensure_symbol(&cfg.maps, nullptr);
        MapSpec& m = cfg.maps[static_cast<std::size_t>(section_index)];
        if (key == "kind") m.kind = value;
        else if (key == "degree") m.degree = static_cast<int>(parse_int(value, field));
        else if (key == "a") m.a = parse_double(value, field);
        else if (key == "beta") m.beta = parse_double(value, field);
        else if (key == "csv") m.csv_path = value;
        else if (key == "sigma") m.sigma = parse_double(value, field);
        else if (key == "L_bound") m.L_bound = parse_double(value, field);
        else throw ConfigError(field + ": unknown key");
    } else if (section == "potential") {
        if (section_index < 0) {
            if (key == "eps_phi") cfg.eps_phi = parse_double(value, field);
            else throw ConfigError(field + ": unknown key (per-symbol keys need [potential i])");
        } else {
            ensure_symbol(nullptr, &cfg.potentials);
            PotentialSpec& p = cfg.potentials[static_cast<std::size_t>(section_index)];
            if (key == "kind") p.kind = value;
            else if (key == "value") p.value = parse_double(value, field);
            else if (key == "amplitude") p.amplitude = parse_double(value, field);
            else if (key == "frequency") p.frequency = static_cast<int>(parse_int(value, field));
            else throw ConfigError(field + ": unknown key");
        }
    } else if (section == "cone") {
        if (key == "alpha") cfg.alpha = parse_double(value, field);
        else if (key == "delta") cfg.delta = parse_double(value, field);
        else if (key == "k") cfg.cone_k = parse_double(value, field);
        else throw ConfigError(field + ": unknown key");
    } else if (section == "numerics") {
        if (key == "grid") cfg.grid = static_cast<int>(parse_int(value, field));
        else if (key == "nu_depth") cfg.nu_depth = static_cast<int>(parse_int(value, field));
        else if (key == "past_depth") cfg.past_depth = static_cast<int>(parse_int(value, field));
        else if (key == "positions") cfg.positions = static_cast<int>(parse_int(value, field));
        else if (key == "anchor") cfg.anchor = parse_double(value, field);
        else if (key == "preimage_tol") cfg.preimage_tol = parse_double(value, field);
        else if (key == "c") cfg.c = parse_double(value, field);
        else if (key == "rho") cfg.rho = parse_double(value, field);
        else if (key == "orbit_past") cfg.orbit_past = static_cast<int>(parse_int(value, field));
        else if (key == "orbit_future") cfg.orbit_future = static_cast<int>(parse_int(value, field));
        else throw ConfigError(field + ": unknown key");
    } else if (section == "pressure") {
        if (key == "n") cfg.pressure_n = static_cast<int>(parse_int(value, field));
        else if (key == "separated_n") cfg.separated_n = static_cast<int>(parse_int(value, field));
        else if (key == "separated_eps") cfg.separated_eps = parse_double(value, field);
        else if (key == "balls_N") cfg.balls_N = static_cast<int>(parse_int(value, field));
        else if (key == "balls_eps") cfg.balls_eps = parse_double(value, field);
        else if (key == "entropy_samples")
            cfg.entropy_samples = static_cast<int>(parse_int(value, field));
        else if (key == "refinement_steps")
            cfg.refinement_steps = static_cast<int>(parse_int(value, field));
        else throw ConfigError(field + ": unknown key");
    } else if (section == "gibbs") {
        if (key == "x") cfg.gibbs_x = parse_double(value, field);
        else if (key == "eps") cfg.gibbs_eps = parse_double(value, field);
        else if (key == "span") cfg.gibbs_span = static_cast<int>(parse_int(value, field));
        else if (key == "max_times") cfg.gibbs_max_times = static_cast<int>(parse_int(value, field));
        else throw ConfigError(field + ": unknown key");
    } else if (section == "decay") {
        if (key == "n_max") cfg.decay_n_max = static_cast<int>(parse_int(value, field));
        else if (key == "psi") cfg.decay_psi = parse_observable(value);
        else if (key == "phi_obs") cfg.decay_phi_obs = parse_observable(value);
        else if (key == "pairs") cfg.decay_pairs = static_cast<int>(parse_int(value, field));
        else throw ConfigError(field + ": unknown key");
    } else if (section == "stability") {
        if (key == "parameter") cfg.stability.parameter = value;
        else if (key == "values") cfg.stability.values = detail::parse_double_list(value, field);
        else if (key == "reference") cfg.stability.reference = parse_double(value, field);
        else throw ConfigError(field + ": unknown key");
    } else {
        throw ConfigError(where + ": unknown section [" + section + "]");
    }
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.maps.clear();
    cfg.potentials.clear();
    std::istringstream in(text);
    std::string line;
    std::string section;
    int section_index = -1;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = "line " + std::to_string(lineno);
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": unterminated section header");
            std::string inner = detail::trim(line.substr(1, line.size() - 2));
            std::istringstream hs(inner);
            hs >> section;
            section_index = -1;
            std::string idx;
            if (hs >> idx) section_index = static_cast<int>(detail::parse_int(idx, where));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(where + ": key outside a [section]");
        apply_config_entry(cfg, section, section_index, key, value, where);
    }
    if (cfg.maps.empty()) cfg.maps.push_back({});
    if (cfg.potentials.empty()) cfg.potentials.push_back({});
    cfg.validate();
    return cfg;
}

// JSON alternative encoding: sections become objects; [map i]/[potential i]
// become arrays "maps"/"potentials".
inline ExperimentConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    auto as_text = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
        std::ostringstream os;
        if (v.is_number_integer()) os << v.get<long long>();
        else if (v.is_number_unsigned()) os << v.get<unsigned long long>();
        else if (v.is_number_float()) os << fmt17(v.get<double>());
        else if (v.is_array()) {
            bool first = true;
            for (const auto& e : v) {
                if (!first) os << ' ';
                first = false;
                if (e.is_number_float()) os << fmt17(e.get<double>());
                else os << e.dump();
            }
        } else os << v.dump();
        return os.str();
    };
    ExperimentConfig cfg;
    cfg.maps.clear();
    cfg.potentials.clear();
    for (auto& [sec, body] : j.items()) {
        if (sec == "maps" || sec == "potentials") {
            if (!body.is_array()) throw ConfigError("JSON '" + sec + "' must be an array");
            int idx = 0;
            std::string section = (sec == "maps") ? "map" : "potential";
            for (const auto& entry : body) {
                for (auto& [k, v] : entry.items())
                    apply_config_entry(cfg, section, idx, k, as_text(v), "json " + sec);
                ++idx;
            }
        } else {
            if (!body.is_object())
                throw ConfigError("JSON section '" + sec + "' must be an object");
            for (auto& [k, v] : body.items())
                apply_config_entry(cfg, sec, -1, k, as_text(v), "json " + sec);
        }
    }
    if (cfg.maps.empty()) cfg.maps.push_back({});
    if (cfg.potentials.empty()) cfg.potentials.push_back({});
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch == '{') return parse_config_json(text);
        break;
    }
    return parse_config_text(text);
}

// ---------------------------------------------------------------------------
// Building runtime objects from the configuration

inline FiberMap build_map(const MapSpec& spec) {
    if (spec.kind == "linear") return make_linear_map(spec.degree);
    if (spec.kind == "sine") return make_sine_map(spec.degree, spec.a);
    if (spec.kind == "manneville") return make_manneville_map(spec.beta);
    if (spec.kind == "csv") {
        LiftTable table;
        FILE* fp = std::fopen(spec.csv_path.c_str(), "r");
        if (!fp) throw ConfigError("map.csv: cannot open '" + spec.csv_path + "'");
        double x, g, dg;
        while (std::fscanf(fp, "%lf , %lf , %lf", &x, &g, &dg) == 3) {
            table.x.push_back(x);
            table.g.push_back(g);
            table.dg.push_back(dg);
        }
        std::fclose(fp);
        return make_tabulated_map(std::move(table), "csv " + spec.csv_path);
    }
    throw ConfigError("map.kind '" + spec.kind + "' unknown (linear|sine|manneville|csv)");
}

inline PotentialFiber build_potential(const PotentialSpec& spec, int grid, double alpha,
                                      double eps_phi) {
    if (spec.kind == "zero") return make_zero_potential(grid, alpha, eps_phi);
    if (spec.kind == "constant")
        return make_constant_potential(grid, spec.value, alpha, eps_phi);
    if (spec.kind == "cosine")
        return make_cosine_potential(grid, spec.amplitude, spec.frequency, alpha, eps_phi);
    throw ConfigError("potential.kind '" + spec.kind + "' unknown (zero|constant|cosine)");
}

inline FiberFamily build_family(const ExperimentConfig& cfg) {
    FiberFamily fam;
    for (const auto& m : cfg.maps) fam.maps.push_back(build_map(m));
    for (const auto& p : cfg.potentials)
        fam.potentials.push_back(build_potential(p, cfg.grid, cfg.alpha, cfg.eps_phi));
    fam.validate();
    return fam;
}

} // namespace randeq
