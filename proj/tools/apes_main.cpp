// apes: pseudo-spectral solver and verification harness for the anisotropic
// primitive equations on (0,1)^2 x (-h,h).
//
// Subcommands: run, check-inequalities, gronwall-demo, residuals, twin,
// halfdomain. Exit codes: 0 success, 2 validation error, 3 blow-up,
// 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include <apes/consistency.hpp>
#include <apes/dynamics.hpp>
#include <apes/errors.hpp>
#include <apes/halfdomain.hpp>
#include <apes/inequalities.hpp>
#include <apes/io.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace apes;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonFlags {
    std::string config;
    std::vector<int> resolution;
    std::optional<double> epsilon, dt, t_final;
    std::optional<std::uint64_t> seed;
    std::optional<int> monitor_stride, checkpoint_every;
    std::string output_dir;
    std::string q_list;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "plain-text key = value configuration file");
    cmd->add_option("--resolution", f.resolution, "NX NY NZ")->expected(3);
    cmd->add_option("--epsilon", f.epsilon, "regularization epsilon in [0,1)");
    cmd->add_option("--dt", f.dt, "time step");
    cmd->add_option("--t-final", f.t_final, "final time");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--output-dir", f.output_dir, "output directory");
    cmd->add_option("--monitor-stride", f.monitor_stride, "steps between records");
    cmd->add_option("--checkpoint-every", f.checkpoint_every,
                    "steps between checkpoints (0 = off)");
    cmd->add_option("--q-list", f.q_list, "comma-separated Lq exponents");
}

Params resolve_params(const CommonFlags& f) {
    Params p = f.config.empty() ? Params{} : io::read_config(f.config);
    std::vector<std::pair<std::string, std::string>> kv;
    if (!f.resolution.empty()) {
        kv.emplace_back("nx", std::to_string(f.resolution[0]));
        kv.emplace_back("ny", std::to_string(f.resolution[1]));
        kv.emplace_back("nz", std::to_string(f.resolution[2]));
    }
    if (f.epsilon) kv.emplace_back("epsilon", fmt17(*f.epsilon));
    if (f.dt) kv.emplace_back("dt", fmt17(*f.dt));
    if (f.t_final) kv.emplace_back("t_final", fmt17(*f.t_final));
    if (f.seed) kv.emplace_back("seed", std::to_string(*f.seed));
    if (f.monitor_stride)
        kv.emplace_back("monitor_stride", std::to_string(*f.monitor_stride));
    if (f.checkpoint_every)
        kv.emplace_back("checkpoint_every", std::to_string(*f.checkpoint_every));
    if (!f.output_dir.empty()) kv.emplace_back("output_dir", f.output_dir);
    if (!f.q_list.empty()) kv.emplace_back("q_list", f.q_list);
    p = io::apply_config_pairs(p, kv);
    p.validate();
    return p;
}

fs::path ensure_output_dir(const Params& p) {
    fs::path dir = p.output_dir.empty() ? fs::path(".") : fs::path(p.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::exists(dir)) throw IoError("cannot create output dir: " + dir.string());
    return dir;
}

int cmd_run(const CommonFlags& flags, const std::string& resume) {
    Params p = resolve_params(flags);
    const fs::path dir = ensure_output_dir(p);

    io::Manifest man;
    man.config = io::params_to_kv(p);
    man.seed = p.seed;
    man.start_time = io::iso8601_now();

    std::ofstream csv(dir / "monitors.csv", std::ios::binary);
    if (!csv) throw IoError("cannot open monitors.csv for writing");
    csv << MonitorRecord::csv_header(p.q_list) << "\n";
    man.files.push_back((dir / "monitors.csv").string());

    RunHooks hooks;
    hooks.on_record = [&](const MonitorRecord& r) {
        csv << r.csv_row() << "\n";
        csv.flush();
    };
    hooks.on_checkpoint = [&](const State& s, const Tendency* mem, long n) {
        char name[64];
        std::snprintf(name, sizeof(name), "checkpoint_%08ld.apes", n);
        const fs::path path = dir / name;
        io::write_snapshot(path.string(), s, mem, n);
        man.files.push_back(path.string());
    };
    hooks.on_snapshot = [&](const State& s, long n) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%08ld.apes", n);
        const fs::path path = dir / name;
        io::write_snapshot(path.string(), s, nullptr, n);
        man.files.push_back(path.string());
    };

    try {
        std::optional<Stepper> stepper;
        if (!resume.empty()) {
            io::Snapshot snap = io::read_snapshot(resume);
            if (snap.state.grid() != p.make_grid())
                throw ValidationError("resume snapshot grid does not match config");
            stepper.emplace(p, snap.state);
            if (snap.ab2) stepper->restore_memory(std::move(*snap.ab2), snap.step_index);
        } else {
            stepper.emplace(p, make_initial_data(p));
        }
        if (stepper->step_index() == 0 && p.snapshot_every > 0)
            hooks.on_snapshot(stepper->state(), 0);

        RunResult res = run_from(*stepper, p.t_final, hooks);

        const fs::path last = dir / "state_final.apes";
        io::write_snapshot(last.string(), res.final_state,
                           stepper->has_memory() ? &stepper->memory() : nullptr,
                           res.steps);
        man.files.push_back(last.string());
        man.fitted_energy_exponent = res.fitted_energy_exponent;
        man.fitted_scheme_constant = res.fitted_scheme_constant;
        man.status = "ok";
        man.end_time = io::iso8601_now();
        io::write_manifest((dir / "manifest.json").string(), man);
        std::cout << "run: " << res.steps << " steps to t = " << res.final_state.t
                  << ", " << res.records.size() << " records, output in " << dir
                  << "\n";
        return 0;
    } catch (const BlowUpError& e) {
        csv.flush();
        man.status = "blowup";
        man.blowup_time = e.t;
        man.end_time = io::iso8601_now();
        io::write_manifest((dir / "manifest.json").string(), man);
        std::cerr << "blow-up: " << e.what() << "\n";
        return 3;
    }
}

int cmd_check_inequalities(const std::string& names_csv, int count,
                           std::uint64_t seed, int resolution,
                           const std::string& output) {
    std::vector<std::string> names;
    if (names_csv.empty() || names_csv == "all") {
        names = {"lad",      "ineqlad",  "ineqlad1", "lem2_3_a", "lem2_3_b",
                 "lem2_3_c", "lem2_3_d", "zt4",      "ht4",      "log_sobolev",
                 "bgw",      "bkm"};
    } else {
        std::stringstream ss(names_csv);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
    }

    std::ostringstream out;
    out << "name,seed,lhs,rhs_structural,ratio\n";
    bool ok = true;
    for (const auto& name : names) {
        EnsembleSpec spec;
        spec.seed = seed;
        spec.count = count;
        spec.resolution = resolution;
        EnsembleReport rep = empirical_constant(name, spec);
        for (std::size_t i = 0; i < rep.cases.size(); ++i) {
            const auto& c = rep.cases[i];
            out << c.name << "," << seed << "," << fmt17(c.lhs) << ","
                << fmt17(c.rhs_structural) << "," << fmt17(c.ratio) << "\n";
        }
        if (inequality_has_explicit_constant(name) && rep.max_ratio > 1.0 + 1e-6) {
            std::cerr << name << ": explicit-constant inequality violated, max ratio "
                      << rep.max_ratio << "\n";
            ok = false;
        }
    }
    if (output.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw IoError("cannot open output file: " + output);
        f << out.str();
    }
    return ok ? 0 : 2;
}

int cmd_gronwall_demo(int count, std::uint64_t seed, const std::string& output) {
    std::ostringstream out;
    out << "seed,A0,K,alpha,horizon,beta,Q,log_bound,A_end,intB_end,holds\n";
    bool all_hold = true;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed + i;
        GronwallClosure c = random_gronwall_closure(s);
        GronwallOracleResult r = gronwall_oracle(c);
        all_hold = all_hold && r.holds;
        out << s << "," << fmt17(c.A0) << "," << fmt17(c.K) << "," << fmt17(c.alpha)
            << "," << fmt17(c.horizon) << "," << fmt17(c.beta) << ","
            << fmt17(r.bound_at_end.Q) << "," << fmt17(r.bound_at_end.log_bound)
            << "," << fmt17(r.A.back()) << "," << fmt17(r.intB.back()) << ","
            << (r.holds ? 1 : 0) << "\n";
    }
    if (output.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw IoError("cannot open output file: " + output);
        f << out.str();
    }
    return all_hold ? 0 : 2;
}

int cmd_residuals(const CommonFlags& flags, const std::string& dirpath,
                  const std::string& output) {
    fs::path dir(dirpath);
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dirpath);

    Params p;
    if (!flags.config.empty()) {
        p = resolve_params(flags);
    } else if (fs::exists(dir / "manifest.json")) {
        std::ifstream mf(dir / "manifest.json");
        json man = json::parse(mf, nullptr, false);
        if (man.is_discarded()) throw IoError("unreadable manifest.json");
        std::vector<std::pair<std::string, std::string>> kv;
        for (auto& [k, v] : man["config"].items())
            kv.emplace_back(k, v.get<std::string>());
        p = io::apply_config_pairs(Params{}, kv);
    } else {
        throw ValidationError("residuals: provide --config or a manifest.json");
    }

    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snapshot_", 0) == 0 && name.find(".apes") != std::string::npos)
            snaps.push_back(e.path());
    }
    std::sort(snaps.begin(), snaps.end());
    if (snaps.size() < 3)
        throw ValidationError("residuals: need at least three snapshots");

    json out = json::array();
    for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
        io::Snapshot a = io::read_snapshot(snaps[i - 1].string());
        io::Snapshot b = io::read_snapshot(snaps[i].string());
        io::Snapshot c = io::read_snapshot(snaps[i + 1].string());
        ResidualNorms rn = compute_residuals(a.state, b.state, c.state, p);
        AppendixAResiduals ar = appendix_a_check(b.state, p);
        json rec;
        rec["t"] = b.state.t;
        rec["abs"] = rn.abs;
        rec["rel"] = rn.rel;
        rec["appendix_a"] = {{"eta_rel", ar.eta_rel}, {"theta_rel", ar.theta_rel}};
        out.push_back(rec);
    }

    const std::string path =
        output.empty() ? (dir / "residuals.json").string() : output;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f << out.dump(2) << "\n";
    std::cout << "residuals: " << out.size() << " triples -> " << path << "\n";
    return 0;
}

int cmd_twin(const CommonFlags& flags, double delta, double horizon) {
    Params p = resolve_params(flags);
    const fs::path dir = ensure_output_dir(p);
    TwinRunReport rep = continuous_dependence_experiment(p, delta, horizon);
    json j;
    j["delta"] = delta;
    j["horizon"] = horizon;
    j["times"] = rep.times;
    j["delta_l2"] = rep.delta_l2;
    j["growth_exponent"] = rep.growth_exponent;
    j["base_l2"] = rep.base_l2;
    j["perturbation_l2"] = rep.perturbation_l2;
    std::ofstream f(dir / "twin.json", std::ios::binary);
    if (!f) throw IoError("cannot write twin.json");
    f << j.dump(2) << "\n";
    std::cout << "twin: growth exponent " << rep.growth_exponent << " -> "
              << (dir / "twin.json") << "\n";
    return 0;
}

int cmd_halfdomain(const CommonFlags& flags, int steps) {
    Params p = resolve_params(flags);
    const fs::path dir = ensure_output_dir(p);

    State s0 = make_initial_data(p);
    Stepper full(p, s0);
    HalfDomainStepper half(p, restrict_state(full.state()));

    json series = json::array();
    double worst = 0.0;
    for (int i = 0; i < steps; ++i) {
        full.advance();
        half.advance();
        HalfState hf = restrict_state(full.state());
        const HalfState& hh = half.state();
        double disc = 0.0;
        for (std::size_t k = 0; k < hf.v1.v.size(); ++k) {
            disc = std::max(disc, std::abs(hf.v1.v[k] - hh.v1.v[k]));
            disc = std::max(disc, std::abs(hf.v2.v[k] - hh.v2.v[k]));
            disc = std::max(disc, std::abs(hf.T.v[k] - hh.T.v[k]));
        }
        worst = std::max(worst, disc);
        if ((i + 1) % p.monitor_stride == 0 || i + 1 == steps)
            series.push_back({{"step", i + 1}, {"max_discrepancy", disc}});
    }
    json j;
    j["steps"] = steps;
    j["max_discrepancy"] = worst;
    j["series"] = series;
    std::ofstream f(dir / "halfdomain.json", std::ios::binary);
    if (!f) throw IoError("cannot write halfdomain.json");
    f << j.dump(2) << "\n";
    std::cout << "halfdomain: max discrepancy " << worst << " over " << steps
              << " steps -> " << (dir / "halfdomain.json") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral primitive-equations solver and verification harness"};
    app.set_version_flag("--version", io::kCodeVersion);
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string resume;
    auto* run_cmd = app.add_subcommand("run", "integrate the system per config");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--resume", resume, "continue from a checkpoint snapshot");

    std::string ineq_names = "all", ineq_out;
    int ineq_count = 500, ineq_res = 2;
    std::uint64_t ineq_seed = 0;
    auto* ineq_cmd =
        app.add_subcommand("check-inequalities", "functional-inequality ensembles");
    ineq_cmd->add_option("--names", ineq_names, "comma list or 'all'");
    ineq_cmd->add_option("--count", ineq_count, "ensemble size");
    ineq_cmd->add_option("--seed", ineq_seed, "ensemble seed");
    ineq_cmd->add_option("--resolution", ineq_res, "quadrature oversampling factor");
    ineq_cmd->add_option("--output", ineq_out, "CSV file (default stdout)");

    int gd_count = 100;
    std::uint64_t gd_seed = 0;
    std::string gd_out;
    auto* gd_cmd =
        app.add_subcommand("gronwall-demo", "random logarithmic-Gronwall instances");
    gd_cmd->add_option("--count", gd_count, "number of instances");
    gd_cmd->add_option("--seed", gd_seed, "base seed");
    gd_cmd->add_option("--output", gd_out, "CSV file (default stdout)");

    CommonFlags res_flags;
    std::string res_dir, res_out;
    auto* res_cmd = app.add_subcommand(
        "residuals", "derived-equation residuals over a saved trajectory");
    add_common(res_cmd, res_flags);
    res_cmd->add_option("--dir", res_dir, "run output directory with snapshots")
        ->required();
    res_cmd->add_option("--output", res_out, "JSON file (default <dir>/residuals.json)");

    CommonFlags twin_flags;
    double twin_delta = 1e-6, twin_horizon = 0.2;
    auto* twin_cmd =
        app.add_subcommand("twin", "continuous-dependence twin experiment");
    add_common(twin_cmd, twin_flags);
    twin_cmd->add_option("--delta", twin_delta, "perturbation amplitude");
    twin_cmd->add_option("--horizon", twin_horizon, "experiment horizon");

    CommonFlags half_flags;
    int half_steps = 100;
    auto* half_cmd =
        app.add_subcommand("halfdomain", "half/full-domain reflection equivalence");
    add_common(half_cmd, half_flags);
    half_cmd->add_option("--steps", half_steps, "number of steps to compare");

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(run_flags, resume);
        if (ineq_cmd->parsed())
            return cmd_check_inequalities(ineq_names, ineq_count, ineq_seed, ineq_res,
                                          ineq_out);
        if (gd_cmd->parsed()) return cmd_gronwall_demo(gd_count, gd_seed, gd_out);
        if (res_cmd->parsed()) return cmd_residuals(res_flags, res_dir, res_out);
        if (twin_cmd->parsed()) return cmd_twin(twin_flags, twin_delta, twin_horizon);
        if (half_cmd->parsed()) return cmd_halfdomain(half_flags, half_steps);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
