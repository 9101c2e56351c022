// cli.cpp — subcommand wiring and deterministic CSV emission.
#include "bridgewalk/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bridgewalk/bridge.hpp"
#include "bridgewalk/config.hpp"
#include "bridgewalk/csv.hpp"
#include "bridgewalk/kernels.hpp"
#include "bridgewalk/range_stats.hpp"
#include "bridgewalk/walk_model.hpp"

namespace bridgewalk {

namespace {

std::vector<int> parse_jumps(const std::string& text) {
    std::vector<int> jumps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) fail(errc::usage, "malformed --jumps list");
        try {
            jumps.push_back(std::stoi(item));
        } catch (const std::exception&) {
            fail(errc::usage, "malformed --jumps entry '" + item + "'");
        }
    }
    if (jumps.empty()) fail(errc::usage, "empty --jumps list");
    return jumps;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io, "cannot open output file '" + path + "'");
    return out;
}

struct ModelFlags {
    std::string model;
    int b = 2;
    int dim = 1;
    std::string jumps;

    ModelSpec spec() const {
        if (model != "tree" && model != "lattice" && model != "lamplighter")
            fail(errc::usage, "unknown model '" + model + "' (expected tree, lattice, or lamplighter)");
        ModelSpec s;
        s.kind = model;
        if (model == "tree") s.b = b;
        if (model != "tree") s.dim = dim;
        if (!jumps.empty()) s.jumps = parse_jumps(jumps);
        return s;
    }
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
    cmd->add_option("--model", mf.model, "tree | lattice | lamplighter")->required();
    cmd->add_option("--b", mf.b, "tree branching factor");
    cmd->add_option("--dim", mf.dim, "lattice / lamplighter dimension");
    cmd->add_option("--jumps", mf.jumps, "comma-separated jump magnitudes (lattice, dim 1)");
}

void write_kernels_csv(const std::string& path, const ReturnSequence& u, const FirstReturnSequence& f) {
    auto out = open_out(path);
    out << "n,u,log_u,f,F_partial\n";
    for (int n = 0; n <= u.nmax(); ++n) {
        out << n << ',' << csv_double17(u.u[n]) << ',' << csv_double17(u.log_u[n]) << ','
            << csv_double17(n >= 1 ? f.f[n] : 0.0) << ',' << csv_double17(f.F_partial[n]) << '\n';
    }
}

void write_mc_kernels_csv(const std::string& path, const ReturnSequence& u) {
    auto out = open_out(path);
    out << "n,u,log_u,se\n";
    for (int n = 0; n <= u.nmax(); ++n)
        out << n << ',' << csv_double17(u.u[n]) << ',' << csv_double17(u.log_u[n]) << ','
            << csv_double17(u.se[n]) << '\n';
}

void write_summary_header(std::ofstream& out) {
    out << "model,n,mode,trials,seed,mean_range,var_range,ci95,mean_maxdist\n";
}

void write_summary_row(std::ofstream& out, const RangeSummary& s) {
    out << s.model_id << ',' << s.n << ',' << range_mode_name(s.mode) << ',' << s.trials << ','
        << s.seed << ',' << csv_double(s.mean_range) << ',' << csv_double(s.var_range) << ','
        << csv_double(s.ci95) << ',' << csv_double(s.mean_maxdist) << '\n';
}

// Re-derives the exact per-trial paths from the experiment's streams, so a
// dump matches what the summary averaged over.
void dump_bridge_paths(const std::string& path, const WalkModel& model, int n, int64_t trials,
                       uint64_t seed, int64_t max_attempts = 1'000'000) {
    auto out = open_out(path);
    out << "trial,n,seed,range,max_distance,path\n";
    std::unique_ptr<BackwardTable> table;
    std::unique_ptr<LamplighterBridgeSampler> lamp;
    if (model.kind() == ModelKind::lamplighter)
        lamp = std::make_unique<LamplighterBridgeSampler>(
            LamplighterBridgeSampler::build(model.dim(), n, max_attempts));
    else
        table = std::make_unique<BackwardTable>(BackwardTable::build(model, n));
    const bool want_dist = model.distance_supported();
    for (int64_t t = 0; t < trials; ++t) {
        SplitRng rng(seed, static_cast<uint64_t>(t));
        std::vector<Vertex> states;
        if (lamp) {
            states = lamp->sample(rng).states;
        } else {
            states = sample_bridge(model, *table, rng).states;
        }
        int64_t range = range_of_path(model, std::span<const Vertex>(states));
        double maxd = want_dist
                          ? static_cast<double>(max_distance_of_path(model, std::span<const Vertex>(states)))
                          : std::nan("");
        out << t << ',' << n << ',' << seed << ',' << range << ',' << csv_double(maxd) << ',';
        for (size_t k = 0; k < states.size(); ++k)
            out << (k ? ";" : "") << key_to_hex(model.canonical_key(states[k]));
        out << '\n';
    }
}

int cmd_kernels(const ModelFlags& mf, int nmax, const std::string& out_path, int64_t mc_trials,
                uint64_t seed) {
    WalkModel model = make_model(mf.spec());
    if (mc_trials > 0) {
        ReturnSequence u = mc_return_probabilities(model, nmax, mc_trials, seed);
        write_mc_kernels_csv(out_path, u);
        std::cout << "wrote " << out_path << " (" << nmax + 1 << " rows, monte carlo)\n";
        return 0;
    }
    ReturnSequence u = return_probabilities(model, nmax);
    FirstReturnSequence f = first_return_probabilities(u);
    write_kernels_csv(out_path, u, f);
    std::cout << "wrote " << out_path << " (" << nmax + 1 << " rows)\n";
    return 0;
}

int cmd_bridge(const ModelFlags& mf, int n, int64_t trials, uint64_t seed, const std::string& out_path,
               const std::string& dump, int workers) {
    WalkModel model = make_model(mf.spec());
    RangeSummary summary = mc_range_experiment(model, n, trials, RangeMode::bridge, seed, workers);
    auto out = open_out(out_path);
    write_summary_header(out);
    write_summary_row(out, summary);
    if (!dump.empty()) dump_bridge_paths(dump, model, n, trials, seed);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    WalkModel model = make_model(cfg.model);
    RangeMode mode = cfg.mode == "bridge" ? RangeMode::bridge : RangeMode::unconditioned;
    std::cout << "config (validated, defaults filled):\n" << config_to_json_text(cfg);

    std::vector<RangeSummary> rows;
    for (int n : cfg.n_grid)
        rows.push_back(mc_range_experiment(model, n, cfg.trials, mode, cfg.seed, cfg.workers,
                                           cfg.max_attempts.value_or(1'000'000)));
    std::sort(rows.begin(), rows.end(), [](const RangeSummary& a, const RangeSummary& b) {
        return a.model_id != b.model_id ? a.model_id < b.model_id : a.n < b.n;
    });
    auto out = open_out(cfg.out);
    write_summary_header(out);
    for (const auto& r : rows) write_summary_row(out, r);
    if (cfg.dump_paths && mode == RangeMode::bridge)
        for (int n : cfg.n_grid)
            dump_bridge_paths(cfg.n_grid.size() == 1 ? *cfg.dump_paths
                                                     : *cfg.dump_paths + ".n" + std::to_string(n),
                              model, n, cfg.trials, cfg.seed,
                              cfg.max_attempts.value_or(1'000'000));
    std::cout << "wrote " << cfg.out << " (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_lamplighter(int dim, int nmax, const std::string& out_path) {
    if (dim != 1) fail(errc::unsupported, "the projection table is exact for --dim 1 only");
    ProjectionCurve curve = projection_range_curve(nmax);
    auto out = open_out(out_path);
    out << "n,r,q,pmf,expected_range\n";
    for (int n = 2; n <= nmax; n += 2) {
        const ProjectionRangeTable& t = curve.by_n[n];
        std::vector<double> pmf = lamplighter_projection_pmf(t);
        double expected = expected_projection_range(t);
        for (size_t r = 1; r < t.q.size(); ++r) {
            if (t.q[r] == 0.0) continue;
            out << n << ',' << r << ',' << csv_double(t.q[r]) << ',' << csv_double(pmf[r]) << ','
                << csv_double(expected) << '\n';
        }
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_volume(const ModelFlags& mf, int nmax, const std::string& out_path) {
    WalkModel model = make_model(mf.spec());
    VolumeCurve curve = model.ball_volume(nmax);
    auto out = open_out(out_path);
    out << "n,volume\n";
    for (size_t n = 0; n < curve.counts.size(); ++n) out << n << ',' << curve.counts[n] << '\n';
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
    try {
        CLI::App app{"random-walk bridge kernels, samplers, and range experiments"};
        app.require_subcommand(1);

        ModelFlags kf;
        int k_nmax = 0;
        std::string k_out;
        int64_t k_mc_trials = 0;
        uint64_t k_seed = 0;
        auto* kernels = app.add_subcommand("kernels", "return / first-return kernel tables");
        add_model_flags(kernels, kf);
        kernels->add_option("--nmax", k_nmax, "window length")->required();
        kernels->add_option("--out", k_out, "output CSV")->required();
        kernels->add_option("--mc-trials", k_mc_trials, "Monte Carlo fallback trial count");
        kernels->add_option("--seed", k_seed, "Monte Carlo seed");

        ModelFlags bf;
        int b_n = 0, b_workers = 0;
        int64_t b_trials = 0;
        uint64_t b_seed = 0;
        std::string b_out, b_dump;
        auto* bridge = app.add_subcommand("bridge", "bridge range experiment");
        add_model_flags(bridge, bf);
        bridge->add_option("--n", b_n, "bridge length")->required();
        bridge->add_option("--trials", b_trials, "trial count")->required();
        bridge->add_option("--seed", b_seed, "master seed")->required();
        bridge->add_option("--out", b_out, "output CSV")->required();
        bridge->add_option("--dump-paths", b_dump, "per-trial path dump CSV");
        bridge->add_option("--workers", b_workers, "worker threads (0 = auto)");

        std::string e_config;
        auto* experiment = app.add_subcommand("experiment", "config-driven experiment");
        experiment->add_option("--config", e_config, "JSON config path")->required();

        int l_dim = 1, l_nmax = 0;
        std::string l_out;
        auto* lamp = app.add_subcommand("lamplighter", "projection range tables and pmf");
        lamp->add_option("--dim", l_dim, "dimension (must be 1)");
        lamp->add_option("--nmax", l_nmax, "largest bridge length")->required();
        lamp->add_option("--out", l_out, "output CSV")->required();

        ModelFlags vf;
        int v_nmax = 0;
        std::string v_out;
        auto* volume = app.add_subcommand("volume", "exact ball volumes");
        add_model_flags(volume, vf);
        volume->add_option("--nmax", v_nmax, "largest radius")->required();
        volume->add_option("--out", v_out, "output CSV")->required();

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {  // --help
                std::cout << app.help();
                return 0;
            }
            fail(errc::usage, e.what());
        }

        if (kernels->parsed()) return cmd_kernels(kf, k_nmax, k_out, k_mc_trials, k_seed);
        if (bridge->parsed()) return cmd_bridge(bf, b_n, b_trials, b_seed, b_out, b_dump, b_workers);
        if (experiment->parsed()) return cmd_experiment(e_config);
        if (lamp->parsed()) return cmd_lamplighter(l_dim, l_nmax, l_out);
        if (volume->parsed()) return cmd_volume(vf, v_nmax, v_out);
        fail(errc::usage, "missing subcommand");
    } catch (const Error& e) {
        std::cerr << "ERROR " << errc_name(e.code()) << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "ERROR internal: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bridgewalk
