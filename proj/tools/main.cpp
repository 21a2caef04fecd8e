// Copyright 2026 Tempest Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempest/estimators.hpp"
#include "tempest/harness.hpp"
#include "tempest/io.hpp"
#include "tempest/model.hpp"
#include "tempest/reference.hpp"
#include "tempest/sampling.hpp"
#include "tempest/topology.hpp"
#include "tempest/version.hpp"

namespace fs = std::filesystem;
using namespace tempest;

namespace {

Coloring coloring_for_model(const LoadedInstance& instance) {
    if (instance.topology) return two_coloring(build_chimera(*instance.topology));
    return greedy_coloring(instance.model);
}

int cmd_generate(const std::string& cls, int rows, int cols, int shore,
                 const std::vector<int>& dead_qubits, const std::string& dead_couplers,
                 std::uint64_t seed, const std::string& output) {
    ChimeraSpec spec{rows, cols, shore, dead_qubits, {}};
    if (!dead_couplers.empty()) {
        std::stringstream ss(dead_couplers);
        std::string pair;
        while (std::getline(ss, pair, ';')) {
            const auto dash = pair.find('-');
            if (dash == std::string::npos)
                throw std::runtime_error("--dead-couplers expects i-j;k-l");
            spec.dead_couplers.emplace_back(std::stoi(pair.substr(0, dash)),
                                            std::stoi(pair.substr(dash + 1)));
        }
    }
    TopologyGraph graph = build_chimera(spec);
    IsingModel model = cls == "ac3" ? gen_ac3(graph, seed) : gen_ran1(graph, seed);
    write_instance(output, model, &spec);
    std::printf("wrote %s: %d spins, %zu edges\n", output.c_str(), model.n_spins(),
                model.edges().size());
    return 0;
}

int cmd_sample(const std::string& instance_path, const std::string& sampler, double beta_t,
               double beta, int sweeps, int n_samples, std::uint64_t seed,
               const std::string& output, double pp_beta, int pp_sweeps, int threads,
               int pt_spe, int pt_exchanges, int pt_burn_in) {
    LoadedInstance instance = read_instance(instance_path);
    const Coloring coloring = coloring_for_model(instance);
    SampleSet samples("", 1);
    if (sampler == "sta") {
        samples = run_sta(instance.model, AnnealSchedule::linear(beta_t, sweeps), n_samples,
                          coloring, seed, threads);
    } else if (sampler == "gibbs") {
        samples = run_sta(instance.model, AnnealSchedule::constant(beta, sweeps), n_samples,
                          coloring, seed, threads);
        samples.meta().sampler = "gibbs";
    } else if (sampler == "pt") {
        std::vector<double> ladder = default_pt_ladder(beta);
        PtResult result = run_parallel_tempering(instance.model, ladder, pt_spe, pt_exchanges,
                                                 pt_burn_in, seed, coloring);
        samples = std::move(result.per_beta.back());
        for (std::size_t p = 0; p < result.diagnostics.acceptance_rate.size(); ++p)
            std::printf("pt pair %zu: acceptance %.3f\n", p,
                        result.diagnostics.acceptance_rate[p]);
    } else {
        throw std::runtime_error("unknown sampler: " + sampler);
    }
    if (pp_sweeps > 0) {
        samples = postprocess(samples, instance.model, pp_beta, pp_sweeps, coloring,
                              seed ^ 0x50505050ULL, threads);
    }
    write_samples(output, samples);
    std::printf("wrote %s: %d samples x %d spins\n", output.c_str(), samples.size(),
                samples.n_spins());
    return 0;
}

int cmd_reference(const std::string& instance_path, const std::string& method,
                  double grid_step, double grid_max, double beta_t, int enum_cap, int width_cap,
                  int pt_rounds, std::uint64_t seed, const std::string& output) {
    LoadedInstance instance = read_instance(instance_path);
    const double top = grid_max > 0 ? grid_max : 1.5 * beta_t;
    std::vector<double> grid;
    for (double b = 0.0; b <= top + 1e-9; b += grid_step) grid.push_back(b);
    ReferenceStatistics ref;
    const RefMethod m = ref_method_from_name(method);
    if (m == RefMethod::exact_enum) {
        ref = exact_stats_enumeration(instance.model, grid, enum_cap);
    } else if (m == RefMethod::exact_dp) {
        DpOptions options;
        options.width_cap = width_cap;
        ref = exact_stats_dp(instance.model, grid, options);
    } else {
        PtStatsOptions options;
        options.rounds = pt_rounds;
        ref = pt_stats(instance.model, grid, options, seed);
    }
    std::string out = output;
    if (out.empty())
        out = reference_cache_stem(ref) + ".json";
    write_reference(out, ref);
    std::printf("wrote %s (%s)\n", out.c_str(), ref.method_detail.c_str());
    return 0;
}

int cmd_estimate(const std::string& samples_path, const std::string& instance_path,
                 const std::string& reference_path, const std::string& methods,
                 const std::string& postprocess_mode, int pp_sweeps,
                 const std::string& output_prefix) {
    LoadedInstance instance = read_instance(instance_path);
    SampleSet samples = read_samples(samples_path);
    ReferenceStatistics ref = read_reference(reference_path);
    if (ref.model_hash != instance.model.content_hash())
        std::fprintf(stderr, "warning: reference was built for a different instance\n");
    const Coloring coloring = coloring_for_model(instance);

    ExperimentConfig config;
    config.estimators.clear();
    {
        std::stringstream ss(methods);
        std::string m;
        while (std::getline(ss, m, ',')) config.estimators.push_back(m);
    }
    config.postprocess = postprocess_mode;
    config.postprocess_sweeps = pp_sweeps;

    std::ostringstream rows, curves;
    rows << "method,beta_hat,objective_at_min,se,bias,sentinel_flag\n";
    curves << "method,beta,value,se\n";
    for (const std::string& method : config.estimators) {
        EstimatorReport report;
        const bool coupled = postprocess_mode == "coupled";
        const SampleSet* active = &samples;
        SampleSet processed("", 1);
        if (postprocess_mode.rfind("fixed:", 0) == 0) {
            const double beta = std::stod(postprocess_mode.substr(6));
            processed = postprocess(samples, instance.model, beta, pp_sweeps, coloring,
                                    samples.meta().seed ^ 0x70705050ULL);
            active = &processed;
        }
        if (method == "ml") {
            report = estimate_ml(instance.model, *active, ref);
        } else if (method == "mlpl") {
            report = estimate_mlpl(instance.model, *active);
            for (double b : ref.beta_grid)
                report.objective_curve.push_back(
                    {b, mlpl_energy_matching(instance.model, *active, b), 0.0 / 0.0});
        } else if (method == "min-mse") {
            ObjectiveCurve curve =
                coupled ? curve_with_postprocessing(instance.model, samples, ref, coloring,
                                                    pp_sweeps, samples.meta().seed ^ 0xC0FFEEULL,
                                                    CurveObjective::mse)
                        : mse_curve(instance.model, *active, ref, true);
            report = estimate_min_mse(curve,
                                      coupled ? MinMode::rightmost_local : MinMode::global);
        } else if (method == "min-kl") {
            ObjectiveCurve curve =
                coupled
                    ? curve_with_postprocessing(instance.model, samples, ref, coloring,
                                                pp_sweeps, samples.meta().seed ^ 0xC0FFEEULL,
                                                CurveObjective::kl)
                    : kl_curve(instance.model, EmpiricalDistribution::from_samples(*active),
                               ref);
            report = estimate_min_kl(curve);
        } else {
            throw std::runtime_error("unknown estimator: " + method);
        }
        rows << report.method << ","
             << (report.is_finite() ? format17(report.beta_hat) : "") << ","
             << (std::isnan(report.objective_at_min) ? "" : format17(report.objective_at_min))
             << "," << (std::isnan(report.bootstrap_se) ? "" : format17(report.bootstrap_se))
             << ","
             << (std::isnan(report.jackknife_bias) ? "" : format17(report.jackknife_bias))
             << "," << (report.is_finite() ? "" : sentinel_name(report.sentinel)) << "\n";
        for (const auto& p : report.objective_curve)
            curves << report.method << "," << format17(p.beta) << "," << format17(p.value)
                   << "," << (std::isnan(p.se) ? "" : format17(p.se)) << "\n";
    }
    atomic_write(output_prefix + "_estimates.csv", rows.str());
    atomic_write(output_prefix + "_curves.csv", curves.str());
    std::printf("wrote %s_estimates.csv and %s_curves.csv\n", output_prefix.c_str(),
                output_prefix.c_str());
    return 0;
}

ExperimentConfig load_config(const std::string& config_path,
                             const std::vector<std::string>& overrides, bool seed_set,
                             std::uint64_t seed) {
    ExperimentConfig config;
    if (!config_path.empty()) config = ExperimentConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--set expects key=value");
        config.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed_set) config.sampler_seed_base = seed;
    return config;
}

void print_manifest(const Manifest& manifest) {
    for (const auto& stage : manifest.stages)
        std::printf("stage %-18s %s%s%s\n", stage.name.c_str(), stage.status.c_str(),
                    stage.message.empty() ? "" : ": ", stage.message.c_str());
    std::printf("manifest hash: %016llx\n",
                static_cast<unsigned long long>(manifest.manifest_hash));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tempest: spin-glass sampling and inverse-temperature estimation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "generate a RAN1/AC3 Chimera instance");
    std::string g_class = "ran1", g_dead_couplers, g_output = "instance.json";
    int g_rows = 2, g_cols = 2, g_shore = 4;
    std::vector<int> g_dead_qubits;
    std::uint64_t g_seed = 0;
    generate->add_option("--class", g_class, "ran1 | ac3")
        ->check(CLI::IsMember({"ran1", "ac3"}));
    generate->add_option("--rows", g_rows);
    generate->add_option("--cols", g_cols);
    generate->add_option("--shore", g_shore);
    generate->add_option("--dead-qubits", g_dead_qubits, "ideal node indices to delete");
    generate->add_option("--dead-couplers", g_dead_couplers, "i-j;k-l pairs to delete");
    generate->add_option("--seed", g_seed)->required();
    generate->add_option("-o,--output", g_output);

    // sample
    auto* sample = app.add_subcommand("sample", "draw heuristic samples");
    std::string s_instance, s_sampler = "sta", s_output = "samples.csv";
    double s_beta_t = 3.54, s_beta = 3.54, s_pp_beta = 0.0;
    int s_sweeps = 2000, s_n = 10000, s_pp_sweeps = 0, s_threads = 1;
    int s_pt_spe = 2, s_pt_exchanges = 4000, s_pt_burn_in = 1000;
    std::uint64_t s_seed = 0;
    sample->add_option("-i,--instance", s_instance)->required();
    sample->add_option("--sampler", s_sampler)->check(CLI::IsMember({"sta", "gibbs", "pt"}));
    sample->add_option("--beta-t", s_beta_t, "terminal beta for sta");
    sample->add_option("--beta", s_beta, "fixed beta for gibbs / target beta for pt");
    sample->add_option("--sweeps", s_sweeps);
    sample->add_option("-n,--n-samples", s_n);
    sample->add_option("--seed", s_seed)->required();
    sample->add_option("-o,--output", s_output, ".csv for text, anything else binary");
    sample->add_option("--pp-beta", s_pp_beta, "post-process at this beta");
    sample->add_option("--pp-sweeps", s_pp_sweeps, "post-processing sweeps (0 = off)");
    sample->add_option("--threads", s_threads);
    sample->add_option("--pt-sweeps-per-exchange", s_pt_spe);
    sample->add_option("--pt-exchanges", s_pt_exchanges);
    sample->add_option("--pt-burn-in", s_pt_burn_in);

    // reference
    auto* reference = app.add_subcommand("reference", "compute Boltzmann reference statistics");
    std::string r_instance, r_method = "dp", r_output;
    double r_grid_step = 0.05, r_grid_max = -1, r_beta_t = 3.54;
    int r_enum_cap = 28, r_width_cap = 20, r_pt_rounds = 6000;
    std::uint64_t r_seed = 12345;
    reference->add_option("-i,--instance", r_instance)->required();
    reference->add_option("--method", r_method)->check(CLI::IsMember({"enum", "dp", "pt"}));
    reference->add_option("--grid-step", r_grid_step);
    reference->add_option("--grid-max", r_grid_max, "default 1.5 * beta-t");
    reference->add_option("--beta-t", r_beta_t);
    reference->add_option("--enum-cap", r_enum_cap);
    reference->add_option("--width-cap", r_width_cap);
    reference->add_option("--pt-rounds", r_pt_rounds);
    reference->add_option("--seed", r_seed, "pt only");
    reference->add_option("-o,--output", r_output, "output .json path");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "estimate beta from samples");
    std::string e_samples, e_instance, e_reference, e_methods = "ml,mlpl,min-mse,min-kl";
    std::string e_postprocess = "off", e_prefix = "estimate";
    int e_pp_sweeps = 1;
    estimate->add_option("-s,--samples", e_samples)->required();
    estimate->add_option("-i,--instance", e_instance)->required();
    estimate->add_option("-r,--reference", e_reference)->required();
    estimate->add_option("--methods", e_methods, "comma list of ml,mlpl,min-mse,min-kl");
    estimate->add_option("--postprocess", e_postprocess, "off | fixed:<beta> | coupled");
    estimate->add_option("--pp-sweeps", e_pp_sweeps);
    estimate->add_option("-o,--output-prefix", e_prefix);

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a preset experiment");
    std::string x_preset, x_config;
    std::vector<std::string> x_overrides;
    std::uint64_t x_seed = 0;
    bool x_seed_set = false;
    experiment->add_option("--preset", x_preset)
        ->required()
        ->check(CLI::IsMember({"rescaling-sweep", "mse-scan", "estimator-scatter"}));
    experiment->add_option("-c,--config", x_config);
    experiment->add_option("--set", x_overrides, "key=value overrides");
    experiment->add_option("--seed", x_seed)->each([&](const std::string&) { x_seed_set = true; });

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "full generate/reference/sample/estimate run");
    std::string p_config;
    std::vector<std::string> p_overrides;
    std::uint64_t p_seed = 0;
    bool p_seed_set = false;
    pipeline->add_option("-c,--config", p_config);
    pipeline->add_option("--set", p_overrides, "key=value overrides");
    pipeline->add_option("--seed", p_seed)->each([&](const std::string&) { p_seed_set = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(g_class, g_rows, g_cols, g_shore, g_dead_qubits,
                                g_dead_couplers, g_seed, g_output);
        if (sample->parsed())
            return cmd_sample(s_instance, s_sampler, s_beta_t, s_beta, s_sweeps, s_n, s_seed,
                              s_output, s_pp_beta, s_pp_sweeps, s_threads, s_pt_spe,
                              s_pt_exchanges, s_pt_burn_in);
        if (reference->parsed())
            return cmd_reference(r_instance, r_method, r_grid_step, r_grid_max, r_beta_t,
                                 r_enum_cap, r_width_cap, r_pt_rounds, r_seed, r_output);
        if (estimate->parsed())
            return cmd_estimate(e_samples, e_instance, e_reference, e_methods, e_postprocess,
                                e_pp_sweeps, e_prefix);
        if (experiment->parsed()) {
            ExperimentConfig config = load_config(x_config, x_overrides, x_seed_set, x_seed);
            Manifest manifest;
            if (x_preset == "rescaling-sweep") manifest = run_rescaling_sweep(config);
            else if (x_preset == "mse-scan") manifest = run_mse_beta_scan(config);
            else manifest = run_estimator_scatter(config);
            print_manifest(manifest);
            return manifest.ok ? 0 : 1;
        }
        if (pipeline->parsed()) {
            ExperimentConfig config = load_config(p_config, p_overrides, p_seed_set, p_seed);
            Manifest manifest = run_full_pipeline(config);
            print_manifest(manifest);
            return manifest.ok ? 0 : 1;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
