#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "ddpole/bench.hpp"
#include "ddpole/io.hpp"

namespace {

using namespace ddpole;

int cmd_pe_check(const std::string& trajectory_path, Index order) {
    const Trajectory traj = io::read_trajectory_csv(trajectory_path);
    const auto report = signals::is_persistently_exciting(traj.inputs, order);
    std::cout << "order " << order << ": Hankel matrix " << report.rows << "x" << report.cols
              << ", rank " << report.rank << " of required " << report.required_rank << "\n";
    if (!report.enough_columns) {
        std::cout << "too few columns: need T - L + 1 >= L * m\n";
    }
    std::cout << (report.persistently_exciting ? "persistently exciting\n"
                                               : "NOT persistently exciting\n");
    return report.persistently_exciting ? 0 : 3;
}

int cmd_place(const std::string& trajectory_path, const std::string& poles_path,
              const std::string& eigvecs_path, const std::string& out_path,
              std::uint64_t seed) {
    const Trajectory traj = io::read_trajectory_csv(trajectory_path);
    const DataMatrices dm = signals::extract_data_matrices(traj);
    PoleSpec spec = io::read_pole_spec(poles_path);
    if (!eigvecs_path.empty()) {
        const PoleSpec with_x = io::read_pole_spec(eigvecs_path);
        spec.eigenvectors = with_x.eigenvectors;
        if (!spec.eigenvectors) {
            throw Error(ErrorKind::invalid_input, "--eigvecs file carries no \"X\" matrix");
        }
    }
    const GainResult result = spec.eigenvectors
                                  ? synthesis::assign_eigenstructure(dm, spec)
                                  : synthesis::place_poles(dm, spec, {}, seed);
    io::write_json(io::gain_result_to_json(result), out_path);
    std::cout << "gain written to " << out_path << " (placement residual "
              << io::format_double(result.placement_error) << ")\n";
    return 0;
}

int cmd_simulate(const std::string& system_path, Index T, double noise, std::uint64_t seed,
                 const std::string& out_path) {
    const LtiSystem sys = io::read_system(system_path);
    SimulationConfig cfg;
    cfg.T = T;
    cfg.noise_variance = noise;
    cfg.seed = seed;
    io::write_trajectory_csv(plant::simulate(sys, cfg), out_path);
    std::cout << "trajectory written to " << out_path << "\n";
    return 0;
}

int cmd_identify(const std::string& trajectory_path, const std::string& out_path) {
    const Trajectory traj = io::read_trajectory_csv(trajectory_path);
    const DataMatrices dm = signals::extract_data_matrices(traj);
    const IdentifiedModel model = baselines::identify_least_squares(dm);
    io::write_json(io::identified_model_to_json(model), out_path);
    std::cout << "model written to " << out_path << " (residual "
              << io::format_double(model.residual) << ")\n";
    return 0;
}

ExperimentConfig config_from_file(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) {
        return cfg;
    }
    const auto j = io::read_json(path);
    if (j.contains("T_values")) cfg.T_values = j["T_values"].get<std::vector<Index>>();
    if (j.contains("n_values")) cfg.n_values = j["n_values"].get<std::vector<Index>>();
    if (j.contains("noise_variances"))
        cfg.noise_variances = j["noise_variances"].get<std::vector<double>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seeds_per_T")) cfg.seeds_per_T = j["seeds_per_T"].get<int>();
    if (j.contains("mc_T")) cfg.mc_T = j["mc_T"].get<Index>();
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    return cfg;
}

int cmd_bench(const std::string& which, const std::string& config_path,
              const std::string& out_dir) {
    const ExperimentConfig cfg = config_from_file(config_path);
    if (which == "reactor") {
        const ReactorReport report = bench::run_reactor(cfg.master_seed);
        nlohmann::json j;
        j["K"] = io::matrix_to_json(report.K);
        j["achieved_spectrum"] = nlohmann::json::array();
        for (Index i = 0; i < report.achieved_spectrum.size(); ++i) {
            j["achieved_spectrum"].push_back({{"re", report.achieved_spectrum(i).real()},
                                              {"im", report.achieved_spectrum(i).imag()}});
        }
        j["placement_error"] = report.placement_error;
        j["final_state_norm"] = report.final_state_norm;
        std::filesystem::create_directories(out_dir);
        io::write_json(j, out_dir + "/reactor.json");
        std::cout << "placement error " << io::format_double(report.placement_error)
                  << ", final state norm " << io::format_double(report.final_state_norm) << "\n";
        return 0;
    }
    std::vector<TrialRecord> records;
    if (which == "vary-t") {
        records = bench::run_vary_t(cfg);
    } else if (which == "montecarlo") {
        records = bench::run_montecarlo(cfg);
    } else {
        std::cerr << "unknown experiment: " << which << "\n";
        return 1;
    }
    bench::emit_results(records, cfg, which, out_dir);
    int failed = 0;
    for (const auto& r : records) {
        failed += r.ok() ? 0 : 1;
    }
    std::cout << records.size() << " records written to " << out_dir << " (" << failed
              << " failed)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven pole placement and eigenstructure assignment"};
    app.require_subcommand(1);

    std::string trajectory_path, poles_path, eigvecs_path, out_path, system_path, config_path;
    Index order = 1, horizon = 10;
    double noise = 0.0;
    std::uint64_t seed = 0;

    auto* pe = app.add_subcommand("pe-check", "Persistence-of-excitation rank report");
    pe->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
    pe->add_option("--order", order, "PE order L")->required();

    auto* place = app.add_subcommand("place", "Compute a feedback gain from data");
    place->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
    place->add_option("--poles", poles_path, "pole spec JSON")->required();
    place->add_option("--eigvecs", eigvecs_path, "eigenvector matrix JSON");
    place->add_option("--out", out_path, "output gain JSON")->required();
    place->add_option("--seed", seed, "selection seed");

    auto* sim = app.add_subcommand("simulate", "Simulate a system to a trajectory CSV");
    sim->add_option("--system", system_path, "system JSON")->required();
    sim->add_option("--T", horizon, "horizon")->required();
    sim->add_option("--noise", noise, "process noise variance");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--out", out_path, "output CSV")->required();

    auto* identify = app.add_subcommand("identify", "Least-squares model fit");
    identify->add_option("--trajectory", trajectory_path, "trajectory CSV")->required();
    identify->add_option("--out", out_path, "output model JSON")->required();

    auto* benchcmd = app.add_subcommand("bench", "Run an experiment harness");
    std::string experiment;
    benchcmd->add_option("experiment", experiment, "reactor | vary-t | montecarlo")->required();
    benchcmd->add_option("--config", config_path, "experiment config JSON");
    benchcmd->add_option("--out", out_path, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (pe->parsed()) {
            return cmd_pe_check(trajectory_path, order);
        }
        if (place->parsed()) {
            return cmd_place(trajectory_path, poles_path, eigvecs_path, out_path, seed);
        }
        if (sim->parsed()) {
            return cmd_simulate(system_path, horizon, noise, seed, out_path);
        }
        if (identify->parsed()) {
            return cmd_identify(trajectory_path, out_path);
        }
        if (benchcmd->parsed()) {
            return cmd_bench(experiment, config_path, out_path);
        }
    } catch (const ddpole::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 1;
}
