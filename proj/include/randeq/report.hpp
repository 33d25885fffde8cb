// report.hpp -- deterministic JSON/CSV emission for every stage.
//
// Reports use a small JSON value type of our own so that every floating
// point number is printed with exactly 17 significant digits and key order
// is the insertion order; output bytes depend only on the report content.

#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "randeq/config.hpp"
#include "randeq/hypotheses.hpp"
#include "randeq/pipeline.hpp"
#include "randeq/thermo.hpp"

namespace randeq {

// ---------------------------------------------------------------------------
// Minimal ordered JSON value

class Json {
public:
    Json() : kind_(Kind::Null) {}
    static Json object() { Json j; j.kind_ = Kind::Object; return j; }
    static Json array() { Json j; j.kind_ = Kind::Array; return j; }
    Json(double v) : kind_(Kind::Number), num_(v) {}
    Json(int v) : kind_(Kind::Integer), int_(v) {}
    Json(long long v) : kind_(Kind::Integer), int_(v) {}
    Json(std::uint64_t v) : kind_(Kind::Integer), int_(static_cast<long long>(v)) {}
    Json(bool v) : kind_(Kind::Bool), bool_(v) {}
    Json(const char* v) : kind_(Kind::String), str_(v) {}
    Json(std::string v) : kind_(Kind::String), str_(std::move(v)) {}

    Json& set(const std::string& key, Json v) {
        require(Kind::Object, "set");
        members_.emplace_back(key, std::move(v));
        return *this;
    }
    Json& push(Json v) {
        require(Kind::Array, "push");
        elems_.push_back(std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out += '\n';
        return out;
    }

private:
    enum class Kind { Null, Object, Array, Number, Integer, Bool, String };

    void require(Kind k, const char* op) const {
        if (kind_ != k) throw std::logic_error(std::string("Json: bad ") + op);
    }

    static void escape(std::string& out, const std::string& s) {
        out += '"';
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default: out += c;
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent, int depth) const {
        std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        std::string padc(static_cast<std::size_t>(indent) * depth, ' ');
        switch (kind_) {
            case Kind::Null: out += "null"; break;
            case Kind::Bool: out += bool_ ? "true" : "false"; break;
            case Kind::Integer: out += std::to_string(int_); break;
            case Kind::Number:
                if (std::isfinite(num_)) out += fmt17(num_);
                else escape(out, num_ > 0 ? "inf" : (num_ < 0 ? "-inf" : "nan"));
                break;
            case Kind::String: escape(out, str_); break;
            case Kind::Object: {
                if (members_.empty()) { out += "{}"; break; }
                out += "{\n";
                for (std::size_t i = 0; i < members_.size(); ++i) {
                    out += pad;
                    escape(out, members_[i].first);
                    out += ": ";
                    members_[i].second.write(out, indent, depth + 1);
                    if (i + 1 < members_.size()) out += ',';
                    out += '\n';
                }
                out += padc;
                out += '}';
                break;
            }
            case Kind::Array: {
                if (elems_.empty()) { out += "[]"; break; }
                out += "[\n";
                for (std::size_t i = 0; i < elems_.size(); ++i) {
                    out += pad;
                    elems_[i].write(out, indent, depth + 1);
                    if (i + 1 < elems_.size()) out += ',';
                    out += '\n';
                }
                out += padc;
                out += ']';
                break;
            }
        }
    }

    Kind kind_;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::string str_;
    std::vector<std::pair<std::string, Json>> members_;
    std::vector<Json> elems_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string text = header + "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += fmt17(row[i]);
        }
        text += '\n';
    }
    write_text_file(path, text);
}

inline void write_grid_csv(const std::string& path, const GridFunction& g) {
    std::string text = "node,value\n";
    for (int i = 0; i < g.n; ++i) {
        text += std::to_string(i);
        text += ',';
        text += fmt17(g[i]);
        text += '\n';
    }
    write_text_file(path, text);
}

inline void write_weights_csv(const std::string& path, const std::vector<double>& w) {
    std::string text = "node,value\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        text += std::to_string(i);
        text += ',';
        text += fmt17(w[i]);
        text += '\n';
    }
    write_text_file(path, text);
}

// ---------------------------------------------------------------------------
// Stage reports

inline Json json_hypotheses(const HypothesisReport& rep) {
    Json j = Json::object();
    j.set("eps_phi", rep.eps_phi)
        .set("eps_0", rep.eps_0)
        .set("gamma", rep.gamma)
        .set("c", rep.c)
        .set("rho", rep.rho)
        .set("L_tilde", rep.L_tilde)
        .set("sigma_tilde", rep.sigma_tilde)
        .set("vi_lhs", rep.vi_lhs)
        .set("vi_rhs", rep.vi_rhs)
        .set("delta_c", rep.delta_c)
        .set("q_hat", rep.q_hat)
        .set("q_bar", rep.q_bar)
        .set("p_hat", rep.p_hat);
    Json flags = Json::object();
    flags.set("I", rep.pass_I)
        .set("II", rep.pass_II)
        .set("III", rep.pass_III)
        .set("IV", rep.pass_IV)
        .set("V", rep.pass_V)
        .set("VI", rep.pass_VI)
        .set("all", rep.all_pass());
    j.set("pass", std::move(flags));
    Json per = Json::array();
    for (const auto& sc : rep.per_symbol) {
        Json s = Json::object();
        s.set("symbol", sc.symbol)
            .set("degree", sc.degree)
            .set("sigma", sc.sigma)
            .set("L_bound", sc.L_bound)
            .set("probe_radius", sc.probe_radius)
            .set("q", sc.q)
            .set("p", sc.p)
            .set("gamma_w", sc.gamma_w)
            .set("iv_margin", sc.iv_margin)
            .set("holder_exp_phi", sc.holder_exp_phi)
            .set("iv_holder_rhs", sc.iv_holder_rhs)
            .set("pass_I", sc.pass_I)
            .set("pass_II", sc.pass_II)
            .set("pass_IV", sc.pass_IV);
        per.push(std::move(s));
    }
    j.set("per_symbol", std::move(per));
    Json ex = Json::array();
    for (const auto& e : rep.exactness) {
        Json s = Json::object();
        s.set("position", e.position).set("x", e.x).set("eps", e.eps).set("n_tilde", e.n_tilde);
        ex.push(std::move(s));
    }
    j.set("exactness_samples", std::move(ex));
    return j;
}

inline Json json_equilibrium(const TransferContext& ctx, const EquilibriumData& eq,
                             const std::vector<double>& pushforward_defects) {
    Json j = Json::object();
    j.set("positions", eq.positions())
        .set("pressure_lambda", eq.pressure)
        .set("residual_h", eq.residual_h)
        .set("R_bound", eq.R_bound);
    Json lam = Json::array();
    bool bounds_ok = true;
    for (int p = 0; p < eq.positions(); ++p) {
        Json row = Json::object();
        bool ok = eigenvalue_bounds_ok(ctx, eq.j_lo + p, eq.lambda(eq.j_lo + p));
        bounds_ok = bounds_ok && ok;
        row.set("position", p)
            .set("symbol", ctx.symbol(eq.j_lo + p))
            .set("lambda", eq.lambda(eq.j_lo + p))
            .set("log_lambda", std::log(eq.lambda(eq.j_lo + p)))
            .set("bounds_ok", ok)
            .set("h_min", eq.h(eq.j_lo + p).min())
            .set("h_max", eq.h(eq.j_lo + p).max());
        lam.push(std::move(row));
    }
    j.set("eigen_bounds_ok", bounds_ok);
    j.set("per_position", std::move(lam));
    Json pf = Json::array();
    for (double d : pushforward_defects) pf.push(d);
    j.set("pushforward_defects", std::move(pf));
    return j;
}

inline Json json_pressure(const PressureResult& pr) {
    const PressureEstimate& est = pr.estimate;
    Json j = Json::object();
    j.set("lambda_route", est.lambda_route)
        .set("separated_route", est.separated_route)
        .set("balls_route", est.balls_route)
        .set("n_used", est.n_used)
        .set("eps_used", est.eps_used)
        .set("balls_N", est.balls_N)
        .set("balls_eps", est.balls_eps)
        .set("discrepancy_separated", est.separated_route - est.lambda_route)
        .set("discrepancy_balls", est.balls_route - est.lambda_route)
        .set("entropy", pr.window.entropy.value)
        .set("entropy_std_error", pr.window.entropy.std_error)
        .set("entropy_samples", pr.window.entropy.samples)
        .set("mean_phi", pr.window.mean_phi)
        .set("variational_gap", pr.window.variational_gap);
    Json sep = Json::array();
    for (const auto& [eps, val] : est.separated_refinement) {
        Json row = Json::object();
        row.set("eps", eps).set("value", val);
        sep.push(std::move(row));
    }
    j.set("separated_refinement", std::move(sep));
    Json bal = Json::array();
    for (const auto& [eps, val] : est.balls_refinement) {
        Json row = Json::object();
        row.set("eps", eps).set("value", val);
        bal.push(std::move(row));
    }
    j.set("balls_refinement", std::move(bal));
    return j;
}

inline Json json_gibbs(const GibbsReport& rep) {
    Json j = Json::object();
    j.set("x", rep.x)
        .set("eps", rep.eps)
        .set("c", rep.c)
        .set("K_eps", rep.K_eps)
        .set("gamma_eps_min", rep.gamma_eps_min)
        .set("all_in_band", rep.all_in_band)
        .set("hyperbolic_times_used", static_cast<int>(rep.rows.size()));
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json row = Json::object();
        row.set("n", r.n)
            .set("ball_lo", r.ball_lo)
            .set("ball_hi", r.ball_hi)
            .set("nu_mass", r.nu_mass)
            .set("sn_phi", r.sn_phi)
            .set("log_lambda_n", r.log_lambda_n)
            .set("ratio", r.ratio)
            .set("gamma_lower", r.gamma_lower)
            .set("in_band", r.in_band);
        rows.push(std::move(row));
    }
    j.set("rows", std::move(rows));
    return j;
}

inline Json json_decay(const DecayReport& rep, const DecayConstants& dc) {
    Json j = Json::object();
    j.set("psi", rep.psi_name)
        .set("phi_obs", rep.phi_name)
        .set("fitted_rate", rep.fitted_rate)
        .set("fit_points", rep.fit_points)
        .set("tau_hat", dc.tau_hat)
        .set("delta_hat", dc.delta_hat)
        .set("delta_hat_note", "sampled lower bound; tau_hat = 1 - exp(-delta_hat)")
        .set("theta_sampling_grid", dc.grid)
        .set("theta_sampling_z_subgrid", dc.z_subgrid)
        .set("theta_pairs", dc.pairs)
        .set("rate_within_envelope", rep.rate_within_envelope)
        .set("noise_floor_at", rep.noise_floor_at);
    Json rows = Json::array();
    for (const auto& [n, c] : rep.rows) {
        Json row = Json::object();
        row.set("n", n).set("C_n", c);
        rows.push(std::move(row));
    }
    j.set("rows", std::move(rows));
    return j;
}

inline Json json_stability(const StabilityReport& rep) {
    Json j = Json::object();
    j.set("reference", rep.s_reference)
        .set("strictly_decreasing", rep.strictly_decreasing());
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json row = Json::object();
        row.set("s", r.s)
            .set("dlambda_sup", r.dlambda_sup)
            .set("dh_sup", r.dh_sup)
            .set("dpressure", r.dpressure)
            .set("hypotheses_passed", r.hypotheses_passed);
        rows.push(std::move(row));
    }
    j.set("rows", std::move(rows));
    return j;
}

} // namespace randeq
