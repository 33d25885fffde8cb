// runner.hpp -- experiment orchestration: stages, gating, manifest.
//
// A run lives in <out>/<confighash>-<seed>/. The manifest is written before
// any long stage begins and finalized at exit; equilibrium-type stages
// refuse to run when the hypothesis report fails, unless the override flag
// is set (the override is recorded in the manifest). Exit codes: 0 success,
// 1 internal error, 2 hypothesis failure, 3 config error.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "randeq/config.hpp"
#include "randeq/pipeline.hpp"
#include "randeq/report.hpp"

namespace randeq {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitHypotheses = 2,
    kExitConfig = 3,
};

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class Runner {
public:
    Runner(ExperimentConfig cfg, bool override_hypotheses, std::string out_override = "")
        : cfg_(std::move(cfg)), override_(override_hypotheses) {
        std::string root = out_override.empty() ? cfg_.out_dir : out_override;
        dir_ = std::filesystem::path(root) /
               (hash_hex(cfg_.hash()).substr(0, 16) + "-" + std::to_string(cfg_.seed));
        std::filesystem::create_directories(dir_);
        started_ = iso_timestamp();

        family_ = build_family(cfg_);
        base_ = BaseSystem(cfg_.alphabet, cfg_.probabilities);
        orbit_ = sample_orbit(base_, cfg_.seed, cfg_.resolved_past(), cfg_.resolved_future());
        ctx_ = std::make_unique<TransferContext>(family_, orbit_, cfg_.grid,
                                                 cfg_.preimage_tol, cfg_.threads);
        for (int s = 0; s < family_.symbols(); ++s)
            profiles_.push_back(build_expansion_profile(
                family_.maps[static_cast<std::size_t>(s)],
                cfg_.maps[static_cast<std::size_t>(s)].sigma,
                cfg_.maps[static_cast<std::size_t>(s)].L_bound, cfg_.grid));
        cone_ = ConeParams(cfg_.alpha, cfg_.delta, cfg_.cone_k);
        c_ = cfg_.c > 0.0 ? cfg_.c : default_hyperbolicity_c(profiles_, cfg_.rho);
        hyp_ = check_conditions(family_, profiles_, cone_, c_, cfg_.rho, cfg_.threads);
        probe_exactness(*ctx_, hyp_, 0.1);
        write_manifest("running");
        emit_json("hypotheses.json", json_hypotheses(hyp_));
    }

    const std::filesystem::path& dir() const { return dir_; }
    const HypothesisReport& hypotheses() const { return hyp_; }
    const TransferContext& context() const { return *ctx_; }
    double c() const { return c_; }

    int cmd_check() {
        stage_done("check", hyp_.all_pass() ? "pass" : "fail");
        write_manifest("finished");
        return hyp_.all_pass() ? kExitOk : kExitHypotheses;
    }

    int cmd_equilibrium() { return gated("equilibrium", [this] { run_equilibrium(); }); }
    int cmd_pressure() { return gated("pressure", [this] { run_pressure(); }); }
    int cmd_gibbs() { return gated("gibbs", [this] { run_gibbs(); }); }
    int cmd_decay() { return gated("decay", [this] { run_decay(); }); }
    int cmd_stability() { return gated("stability", [this] { run_stability(); }); }

    int cmd_all() {
        stage_done("check", hyp_.all_pass() ? "pass" : "fail");
        if (!hyp_.all_pass() && !override_) {
            write_manifest("blocked: hypotheses failed");
            return kExitHypotheses;
        }
        int rc = kExitOk;
        for (auto [name, fn] : std::initializer_list<
                 std::pair<const char*, void (Runner::*)()>>{
                 {"equilibrium", &Runner::run_equilibrium},
                 {"pressure", &Runner::run_pressure},
                 {"gibbs", &Runner::run_gibbs},
                 {"decay", &Runner::run_decay},
                 {"stability", &Runner::run_stability}}) {
            try {
                auto t0 = std::chrono::steady_clock::now();
                (this->*fn)();
                stage_done(name, "ok", seconds_since(t0));
            } catch (const std::exception& e) {
                stage_done(name, std::string("error: ") + e.what());
                write_manifest("failed");
                return kExitInternal;
            }
            write_manifest("running");
        }
        write_manifest("finished");
        return rc;
    }

private:
    template <typename Fn>
    int gated(const char* name, Fn&& fn) {
        stage_done("check", hyp_.all_pass() ? "pass" : "fail");
        if (!hyp_.all_pass() && !override_) {
            write_manifest("blocked: hypotheses failed");
            return kExitHypotheses;
        }
        try {
            auto t0 = std::chrono::steady_clock::now();
            fn();
            stage_done(name, "ok", seconds_since(t0));
        } catch (const std::exception& e) {
            stage_done(name, std::string("error: ") + e.what());
            write_manifest("failed");
            return kExitInternal;
        }
        write_manifest("finished");
        return kExitOk;
    }

    static double seconds_since(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    EquilibriumOptions eq_options(int positions) const {
        EquilibriumOptions eo;
        eo.positions = positions;
        eo.nu_depth = cfg_.nu_depth;
        eo.past_depth = cfg_.past_depth;
        eo.anchor = cfg_.anchor;
        eo.cone = cone_;
        return eo;
    }

    void run_equilibrium() {
        EquilibriumData eq = compute_equilibrium(*ctx_, eq_options(cfg_.positions));
        std::vector<double> defects;
        const std::function<double(double)> observables[] = {
            [](double x) { return std::cos(2 * std::numbers::pi * x); },
            [](double x) { return std::sin(2 * std::numbers::pi * x); },
            [](double x) { return std::cos(4 * std::numbers::pi * x); },
            [](double x) { return std::sin(4 * std::numbers::pi * x); },
            [](double x) { return std::cos(6 * std::numbers::pi * x); },
        };
        for (int j = 0; j < eq.positions(); ++j) {
            auto mu = invariant_measure(eq.h(j), eq.nu(j));
            auto mu_next = invariant_measure(eq.h(j + 1), eq.nu(j + 1));
            double d = 0.0;
            for (const auto& g : observables)
                d = std::max(d, pushforward_defect(*ctx_, j, mu, mu_next, g));
            defects.push_back(d);
        }
        emit_json("equilibrium.json", json_equilibrium(*ctx_, eq, defects));
        for (int j = 0; j <= eq.positions(); ++j) {
            emit_grid("h_pos" + std::to_string(j) + ".csv", eq.h(j));
            emit_weights("nu_pos" + std::to_string(j) + ".csv", eq.nu(j));
        }
    }

    void run_pressure() {
        PressureOptions po;
        po.n = cfg_.pressure_n;
        po.separated_n = cfg_.separated_n;
        po.separated_eps = cfg_.separated_eps;
        po.balls_N = cfg_.balls_N;
        po.balls_eps = cfg_.balls_eps;
        po.refinement_steps = cfg_.refinement_steps;
        po.window.nu_depth = cfg_.nu_depth;
        po.window.past_depth = cfg_.past_depth;
        po.window.anchor = cfg_.anchor;
        po.window.entropy_samples = cfg_.entropy_samples;
        po.window.seed = rng_substream(cfg_.seed, 0xEB7);
        po.window.cone = cone_;
        PressureResult pr = compute_pressure(*ctx_, po);
        emit_json("pressure.json", json_pressure(pr));
        std::vector<std::vector<double>> rows;
        for (std::size_t j = 0; j < pr.window.lambdas.size(); ++j)
            rows.push_back({static_cast<double>(j), pr.window.lambdas[j],
                            std::log(pr.window.lambdas[j])});
        emit_csv("lambda_series.csv", "position,lambda,log_lambda", rows);
    }

    void run_gibbs() {
        EquilibriumData eq = compute_equilibrium(*ctx_, eq_options(cfg_.gibbs_span));
        GibbsReport rep = gibbs_check(*ctx_, cfg_.gibbs_x, cfg_.gibbs_eps, c_, eq,
                                      cfg_.gibbs_max_times);
        emit_json("gibbs.json", json_gibbs(rep));
        std::vector<std::vector<double>> rows;
        for (const auto& r : rep.rows)
            rows.push_back({static_cast<double>(r.n), r.ball_lo, r.ball_hi, r.nu_mass,
                            r.sn_phi, r.log_lambda_n, r.ratio, r.gamma_lower});
        emit_csv("gibbs_rows.csv",
                 "n,ball_lo,ball_hi,nu_mass,sn_phi,log_lambda_n,ratio,gamma_lower", rows);
    }

    void run_decay() {
        EquilibriumData eq = compute_equilibrium(*ctx_, eq_options(cfg_.decay_n_max + 1));
        DecayConstants dc = decay_constants_estimate();
        GridFunction psi(cfg_.grid, [&](double x) { return cfg_.decay_psi(x); });
        GridFunction phio(cfg_.grid, [&](double x) { return cfg_.decay_phi_obs(x); });
        DecayReport rep = decay_correlations(*ctx_, eq, psi, phio, cfg_.decay_n_max,
                                             dc.tau_hat);
        rep.psi_name = cfg_.decay_psi.text;
        rep.phi_name = cfg_.decay_phi_obs.text;
        emit_json("decay.json", json_decay(rep, dc));
        std::vector<std::vector<double>> rows;
        for (const auto& [n, cn] : rep.rows)
            rows.push_back({static_cast<double>(n), cn});
        emit_csv("decay_rows.csv", "n,C_n", rows);
    }

    // Cone pairs for the contraction constants live on a coarser grid; the
    // sampled Delta is an empirical lower bound either way.
    DecayConstants decay_constants_estimate() {
        int tg = std::min(cfg_.grid, 1024);
        TransferContext tctx(family_, orbit_, tg, cfg_.preimage_tol, cfg_.threads);
        auto pairs = sample_cone_pairs(tg, cfg_.decay_pairs, rng_substream(cfg_.seed, 0xC0E));
        return estimate_decay_constants(tctx, 0, cone_, pairs);
    }

    void run_stability() {
        if (cfg_.stability.values.empty()) {
            stage_done("stability", "skipped: no sweep values");
            return;
        }
        StabilityOptions so;
        so.values = cfg_.stability.values;
        so.reference = cfg_.stability.reference;
        so.eq = eq_options(cfg_.positions);
        auto context_of_s = [this](double s) {
            ExperimentConfig c2 = cfg_;
            apply_stability_parameter(c2, s);
            FiberFamily fam = build_family(c2);
            return TransferContext(fam, orbit_, cfg_.grid, cfg_.preimage_tol, cfg_.threads);
        };
        auto check_of_s = [this](const TransferContext& ctx) {
            ExperimentConfig c2 = cfg_;
            std::vector<ExpansionProfile> profs;
            for (int s = 0; s < ctx.family().symbols(); ++s)
                profs.push_back(build_expansion_profile(
                    ctx.family().maps[static_cast<std::size_t>(s)],
                    c2.maps[static_cast<std::size_t>(s)].sigma,
                    c2.maps[static_cast<std::size_t>(s)].L_bound, c2.grid));
            return check_conditions(ctx.family(), profs, cone_, c_, cfg_.rho, cfg_.threads);
        };
        StabilityReport rep = stability_sweep(context_of_s, check_of_s, so);
        emit_json("stability.json", json_stability(rep));
        std::vector<std::vector<double>> rows;
        for (const auto& r : rep.rows)
            rows.push_back({r.s, r.dlambda_sup, r.dh_sup, r.dpressure,
                            r.hypotheses_passed ? 1.0 : 0.0});
        emit_csv("stability_rows.csv", "s,dlambda_sup,dh_sup,dpressure,hypotheses_passed",
                 rows);
    }

    void apply_stability_parameter(ExperimentConfig& c2, double s) const {
        if (cfg_.stability.parameter == "map_a") {
            for (auto& m : c2.maps)
                if (m.kind == "sine") m.a = s;
        } else {   // potential_scale
            for (auto& p : c2.potentials) {
                if (p.kind == "cosine") p.amplitude = s;
                if (p.kind == "constant") p.value = s;
            }
        }
    }

    // deterministic cone pairs: small harmonic perturbations of 1
    static std::vector<std::pair<GridFunction, GridFunction>>
    sample_cone_pairs(int grid, int count, std::uint64_t seed) {
        std::vector<std::pair<GridFunction, GridFunction>> pairs;
        pairs.reserve(static_cast<std::size_t>(count));
        for (int p = 0; p < count; ++p) {
            auto mk = [&](std::uint64_t tag) {
                double a1 = 0.02 + 0.08 * rng_uniform01(seed, 8 * static_cast<std::uint64_t>(p) + tag);
                double ph1 = rng_uniform01(seed, 8 * static_cast<std::uint64_t>(p) + tag + 1);
                double a2 = 0.05 * rng_uniform01(seed, 8 * static_cast<std::uint64_t>(p) + tag + 2);
                double ph2 = rng_uniform01(seed, 8 * static_cast<std::uint64_t>(p) + tag + 3);
                return GridFunction(grid, [&](double x) {
                    return 1.0 + a1 * std::cos(2 * std::numbers::pi * (x + ph1)) +
                           a2 * std::sin(4 * std::numbers::pi * (x + ph2));
                });
            };
            pairs.emplace_back(mk(0), mk(4));
        }
        return pairs;
    }

    void emit_json(const std::string& name, const Json& j) {
        write_text_file((dir_ / name).string(), j.dump());
        note_file(name);
    }
    void emit_csv(const std::string& name, const std::string& header,
                  const std::vector<std::vector<double>>& rows) {
        write_csv((dir_ / name).string(), header, rows);
        note_file(name);
    }
    void emit_grid(const std::string& name, const GridFunction& g) {
        write_grid_csv((dir_ / name).string(), g);
        note_file(name);
    }
    void emit_weights(const std::string& name, const std::vector<double>& w) {
        write_weights_csv((dir_ / name).string(), w);
        note_file(name);
    }
    void note_file(const std::string& name) {
        for (const auto& f : files_)
            if (f == name) return;
        files_.push_back(name);
    }

    void stage_done(const std::string& name, const std::string& status, double secs = 0.0) {
        for (auto& st : stages_)
            if (st.name == name) {
                st.status = status;
                st.seconds = secs;
                return;
            }
        stages_.push_back({name, status, secs});
    }

    void write_manifest(const std::string& status) {
        Json j = Json::object();
        j.set("tool", "randeq")
            .set("version", kToolVersion)
            .set("status", status)
            .set("started", started_)
            .set("updated", iso_timestamp())
            .set("seed", cfg_.seed)
            .set("config_hash", hash_hex(cfg_.hash()))
            .set("override_hypotheses", override_)
            .set("hypotheses_pass", hyp_.all_pass())
            .set("c_effective", c_)
            .set("orbit_past", orbit_.past)
            .set("orbit_future", orbit_.future)
            .set("orbit_symbols", orbit_.to_string());
        Json st = Json::array();
        for (const auto& s : stages_) {
            Json row = Json::object();
            row.set("name", s.name).set("status", s.status).set("seconds", s.seconds);
            st.push(std::move(row));
        }
        j.set("stages", std::move(st));
        Json fl = Json::array();
        fl.push(std::string("manifest.json"));
        for (const auto& f : files_) fl.push(f);
        j.set("files", std::move(fl));
        j.set("config", cfg_.canonical());
        write_text_file((dir_ / "manifest.json").string(), j.dump());
    }

    struct StageStatus {
        std::string name;
        std::string status;
        double seconds = 0.0;
    };

    ExperimentConfig cfg_;
    bool override_ = false;
    std::filesystem::path dir_;
    std::string started_;
    FiberFamily family_;
    BaseSystem base_;
    BaseOrbit orbit_;
    std::unique_ptr<TransferContext> ctx_;
    std::vector<ExpansionProfile> profiles_;
    ConeParams cone_;
    double c_ = 0.0;
    HypothesisReport hyp_;
    std::vector<StageStatus> stages_;
    std::vector<std::string> files_;
};

} // namespace randeq
