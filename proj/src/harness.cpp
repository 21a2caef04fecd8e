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

#include "tempest/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tempest/io.hpp"
#include "tempest/sampling.hpp"
#include "tempest/version.hpp"

namespace tempest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        config.apply_override(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void ExperimentConfig::apply_override(const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(value)); };
    auto as_double = [&] { return std::stod(value); };
    if (key == "class") problem_class = value;
    else if (key == "rows") rows = as_int();
    else if (key == "cols") cols = as_int();
    else if (key == "shore") shore = as_int();
    else if (key == "dead_qubits") {
        dead_qubits.clear();
        for (const auto& q : split(value, ',')) dead_qubits.push_back(std::stoi(q));
    } else if (key == "dead_couplers") {
        dead_couplers.clear();
        for (const auto& pair : split(value, ';')) {
            auto parts = split(pair, '-');
            if (parts.size() != 2) throw std::runtime_error("dead_couplers: expected i-j pairs");
            dead_couplers.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]));
        }
    } else if (key == "n_instances") n_instances = as_int();
    else if (key == "instance_seed_base") instance_seed_base = as_u64();
    else if (key == "beta_t") beta_t = as_double();
    else if (key == "sweeps") sweeps = as_int();
    else if (key == "n_samples") n_samples = as_int();
    else if (key == "sampler_seed_base" || key == "seed") sampler_seed_base = as_u64();
    else if (key == "reference_method") reference_method = value;
    else if (key == "grid_step") grid_step = as_double();
    else if (key == "grid_max") grid_max = as_double();
    else if (key == "enum_cap") enum_cap = as_int();
    else if (key == "dp_width_cap") dp_width_cap = as_int();
    else if (key == "pt_rounds") pt_rounds = as_int();
    else if (key == "estimators") estimators = split(value, ',');
    else if (key == "postprocess") postprocess = value;
    else if (key == "postprocess_sweeps") postprocess_sweeps = as_int();
    else if (key == "fractions") {
        fractions.clear();
        for (const auto& f : split(value, ',')) fractions.push_back(std::stod(f));
    } else if (key == "sweep_set") {
        sweep_set.clear();
        for (const auto& s : split(value, ',')) sweep_set.push_back(std::stoi(s));
    } else if (key == "out_dir") out_dir = value;
    else if (key == "threads") threads = as_int();
    else throw std::runtime_error("unknown config key: " + key);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "class=" << problem_class << "\nrows=" << rows << "\ncols=" << cols
        << "\nshore=" << shore << "\ndead_qubits=";
    for (int q : dead_qubits) out << q << ",";
    out << "\ndead_couplers=";
    for (auto [a, b] : dead_couplers) out << a << "-" << b << ";";
    out << "\nn_instances=" << n_instances << "\ninstance_seed_base=" << instance_seed_base
        << "\nbeta_t=" << format17(beta_t) << "\nsweeps=" << sweeps
        << "\nn_samples=" << n_samples << "\nsampler_seed_base=" << sampler_seed_base
        << "\nreference_method=" << reference_method << "\ngrid_step=" << format17(grid_step)
        << "\ngrid_max=" << format17(grid_max) << "\nenum_cap=" << enum_cap
        << "\ndp_width_cap=" << dp_width_cap << "\npt_rounds=" << pt_rounds << "\nestimators=";
    for (const auto& e : estimators) out << e << ",";
    out << "\npostprocess=" << postprocess << "\npostprocess_sweeps=" << postprocess_sweeps
        << "\nfractions=";
    for (double f : fractions) out << format17(f) << ",";
    out << "\nsweep_set=";
    for (int s : sweep_set) out << s << ",";
    out << "\nthreads=" << threads << "\n";
    return out.str();
}

std::uint64_t ExperimentConfig::config_hash() const { return fnv1a64_string(canonical()); }

std::vector<double> ExperimentConfig::beta_grid() const {
    const double top = grid_max < 0 ? 1.5 * beta_t : grid_max;
    const int count = std::max(1, static_cast<int>(std::ceil(top / grid_step - 1e-9))) + 1;
    std::vector<double> grid(count);
    for (int k = 0; k < count; ++k) grid[k] = k * grid_step;
    return grid;
}

ChimeraSpec ExperimentConfig::chimera_spec() const {
    return ChimeraSpec{rows, cols, shore, dead_qubits, dead_couplers};
}

std::string ExperimentConfig::size_tag() const {
    if (rows == cols) return "c" + std::to_string(rows);
    return "c" + std::to_string(rows) + "x" + std::to_string(cols);
}

IsingModel generate_instance(const ExperimentConfig& config, int index) {
    const TopologyGraph graph = build_chimera(config.chimera_spec());
    const std::uint64_t seed = config.instance_seed_base + static_cast<std::uint64_t>(index);
    if (config.problem_class == "ran1") return gen_ran1(graph, seed);
    if (config.problem_class == "ac3") return gen_ac3(graph, seed);
    throw std::runtime_error("unknown problem class: " + config.problem_class);
}

// ---------------------------------------------------------------------------
// manifest plumbing

void finalize_manifest(Manifest& manifest) {
    std::string blob = manifest.version + "\n" + manifest.config_text + "\n";
    for (const auto& [file, hash] : manifest.file_hashes)
        blob += file + ":" + std::to_string(hash) + "\n";
    manifest.manifest_hash = fnv1a64_string(blob);
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
    json doc;
    doc["format"] = "tempest-manifest";
    doc["version"] = manifest.version;
    doc["config_hash"] = manifest.config_hash;
    doc["config"] = manifest.config_text;
    doc["manifest_hash"] = manifest.manifest_hash;
    doc["ok"] = manifest.ok;
    json stages = json::array();
    for (const auto& s : manifest.stages) {
        json stage;
        stage["name"] = s.name;
        stage["status"] = s.status;
        stage["files"] = s.files;
        if (!s.message.empty()) stage["message"] = s.message;
        stages.push_back(std::move(stage));
    }
    doc["stages"] = std::move(stages);
    json files = json::object();
    for (const auto& [file, hash] : manifest.file_hashes) files[file] = hash;
    doc["files"] = std::move(files);
    atomic_write(path, doc.dump(2) + "\n");
}

namespace {

std::uint64_t hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64_string(ss.str());
}

Manifest make_manifest(const ExperimentConfig& config) {
    Manifest manifest;
    manifest.version = kVersion;
    manifest.config_text = config.canonical();
    manifest.config_hash = config.config_hash();
    return manifest;
}

void note_file(Manifest& manifest, StageStatus& stage, const fs::path& path) {
    stage.files.push_back(path.string());
    manifest.file_hashes[path.filename().string()] = hash_file(path);
}

// caches keyed purely by file name; name encodes everything that matters
bool cached(const fs::path& path) { return fs::exists(path); }

struct PipelinePaths {
    fs::path root, instances, references, samples, estimates;
    explicit PipelinePaths(const ExperimentConfig& config) : root(config.out_dir) {
        instances = root / "instances";
        references = root / "references";
        samples = root / "samples";
        estimates = root / "estimates";
    }
};

Coloring coloring_for(const ExperimentConfig& config) {
    return two_coloring(build_chimera(config.chimera_spec()));
}

}  // namespace

ReferenceStatistics reference_for(const ExperimentConfig& config, const IsingModel& model,
                                  const std::vector<double>& grid, StageStatus* status) {
    const RefMethod method = ref_method_from_name(config.reference_method);
    const fs::path dir = fs::path(config.out_dir) / "references";
    const fs::path path = dir / (reference_cache_stem(model.content_hash(), grid, method) +
                                 std::string(".json"));
    if (cached(path)) {
        if (status) status->status = "cached";
        return read_reference(path);
    }
    ReferenceStatistics ref;
    switch (method) {
        case RefMethod::exact_enum:
            ref = exact_stats_enumeration(model, grid, config.enum_cap);
            break;
        case RefMethod::exact_dp: {
            DpOptions options;
            options.width_cap = config.dp_width_cap;
            ref = exact_stats_dp(model, grid, options);
            break;
        }
        case RefMethod::pt: {
            PtStatsOptions options;
            options.rounds = config.pt_rounds;
            ref = pt_stats(model, grid, options, model.metadata().seed ^ 0x9d2c5680ULL);
            break;
        }
    }
    write_reference(path, ref);
    if (status) status->status = "computed";
    return ref;
}

// ---------------------------------------------------------------------------
// estimate rows

namespace {

struct ResultRow {
    std::string instance;
    std::string size;
    std::string sampler;
    std::string method;
    const EstimatorReport* report;
    std::string postprocess;
};

void append_row(std::ostringstream& out, const ResultRow& row) {
    const EstimatorReport& r = *row.report;
    out << row.instance << "," << row.size << "," << row.sampler << "," << row.method << ",";
    // beta_hat and sentinel are mutually exclusive columns
    out << (r.is_finite() ? format17(r.beta_hat) : "") << ","
        << (r.is_finite() ? "" : sentinel_name(r.sentinel)) << ","
        << (std::isnan(r.objective_at_min) ? "" : format17(r.objective_at_min)) << ","
        << (std::isnan(r.bootstrap_se) ? "" : format17(r.bootstrap_se)) << ","
        << (std::isnan(r.jackknife_bias) ? "" : format17(r.jackknife_bias)) << ","
        << row.postprocess << "\n";
}

constexpr const char* kResultHeader =
    "instance,size,sampler,method,beta_hat,sentinel,objective_at_min,se,bias,postprocess\n";

void append_curve(std::ostringstream& out, const std::string& instance,
                  const std::string& method, const std::string& tag,
                  const ObjectiveCurve& curve) {
    for (const auto& p : curve) {
        out << instance << "," << method << "," << tag << "," << format17(p.beta) << ","
            << format17(p.value) << "," << (std::isnan(p.se) ? "" : format17(p.se)) << "\n";
    }
}

constexpr const char* kCurveHeader = "instance,method,tag,beta,value,se\n";

struct EstimateOutput {
    std::vector<EstimatorReport> reports;
    std::string postprocess_tag;
};

// Runs the configured estimators on one sample set. In coupled mode the
// curve objectives get beta-coupled post-processing (min-mse switches to the
// rightmost-local rule); ml/mlpl stay on the raw samples and keep their
// plain interpretation.
EstimateOutput run_estimators(const ExperimentConfig& config, const IsingModel& model,
                              const SampleSet& samples, const ReferenceStatistics& ref,
                              const Coloring& coloring) {
    EstimateOutput out;
    out.postprocess_tag = config.postprocess;
    const SampleSet* active = &samples;
    SampleSet processed("", 1);
    if (config.postprocess.rfind("fixed:", 0) == 0) {
        const double beta = std::stod(config.postprocess.substr(6));
        processed = postprocess(samples, model, beta, config.postprocess_sweeps, coloring,
                                samples.meta().seed ^ 0x70705050ULL, config.threads);
        active = &processed;
    }
    const bool coupled = config.postprocess == "coupled";
    for (const std::string& method : config.estimators) {
        if (method == "ml") {
            out.reports.push_back(estimate_ml(model, *active, ref));
        } else if (method == "mlpl") {
            out.reports.push_back(estimate_mlpl(model, *active));
        } else if (method == "min-mse") {
            ObjectiveCurve curve =
                coupled ? curve_with_postprocessing(model, samples, ref, coloring,
                                                    config.postprocess_sweeps,
                                                    samples.meta().seed ^ 0xC0FFEEULL,
                                                    CurveObjective::mse)
                        : mse_curve(model, *active, ref);
            out.reports.push_back(estimate_min_mse(
                curve, coupled ? MinMode::rightmost_local : MinMode::global));
        } else if (method == "min-kl") {
            ObjectiveCurve curve =
                coupled ? curve_with_postprocessing(model, samples, ref, coloring,
                                                    config.postprocess_sweeps,
                                                    samples.meta().seed ^ 0xC0FFEEULL,
                                                    CurveObjective::kl)
                        : kl_curve(model, EmpiricalDistribution::from_samples(*active), ref);
            out.reports.push_back(estimate_min_kl(curve));
        } else {
            throw std::runtime_error("unknown estimator: " + method);
        }
        if (config.postprocess != "off") {
            out.reports.back().postprocessed = true;
            out.reports.back().postprocess_mode = config.postprocess;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// full pipeline

Manifest run_full_pipeline(const ExperimentConfig& config) {
    Manifest manifest = make_manifest(config);
    PipelinePaths paths(config);
    const Coloring coloring = coloring_for(config);
    const std::vector<double> grid = config.beta_grid();

    // Each stage either completes (all outputs written atomically) or is
    // marked "error" and every dependent stage is skipped; a failed run still
    // writes its manifest.
    auto run_stage = [&](const char* name, auto&& body) {
        if (!manifest.ok) {
            manifest.stages.push_back({name, "skipped", {}, "earlier stage failed"});
            return;
        }
        StageStatus stage{name, "cached", {}, ""};
        try {
            body(stage);
        } catch (const std::exception& err) {
            stage.status = "error";
            stage.message = err.what();
            manifest.ok = false;
        }
        manifest.stages.push_back(std::move(stage));
    };

    std::vector<IsingModel> models;
    run_stage("generate", [&](StageStatus& stage) {
        bool any_computed = false;
        for (int k = 0; k < config.n_instances; ++k) {
            IsingModel model = generate_instance(config, k);
            const fs::path path = paths.instances / (model.metadata().label + ".json");
            if (!cached(path)) {
                ChimeraSpec spec = config.chimera_spec();
                write_instance(path, model, &spec);
                any_computed = true;
            }
            note_file(manifest, stage, path);
            models.push_back(std::move(model));
        }
        if (any_computed) stage.status = "computed";
    });

    std::vector<ReferenceStatistics> refs;
    run_stage("reference", [&](StageStatus& stage) {
        bool any_computed = false;
        for (const IsingModel& model : models) {
            StageStatus one;
            refs.push_back(reference_for(config, model, grid, &one));
            if (one.status == "computed") any_computed = true;
            const fs::path path =
                paths.references /
                (reference_cache_stem(model.content_hash(), grid,
                                      ref_method_from_name(config.reference_method)) +
                 std::string(".json"));
            note_file(manifest, stage, path);
        }
        if (any_computed) stage.status = "computed";
    });

    std::vector<SampleSet> sample_sets;
    run_stage("sample", [&](StageStatus& stage) {
        bool any_computed = false;
        for (int k = 0; k < config.n_instances; ++k) {
            const std::uint64_t seed =
                config.sampler_seed_base + static_cast<std::uint64_t>(k);
            char name[160];
            std::snprintf(name, sizeof name, "%s_sta%d_n%d_s%llu.csv",
                          models[k].metadata().label.c_str(), config.sweeps, config.n_samples,
                          static_cast<unsigned long long>(seed));
            const fs::path path = paths.samples / name;
            if (cached(path)) {
                sample_sets.push_back(read_samples(path));
            } else {
                sample_sets.push_back(run_sta(models[k],
                                              AnnealSchedule::linear(config.beta_t, config.sweeps),
                                              config.n_samples, coloring, seed, config.threads));
                write_samples(path, sample_sets.back());
                any_computed = true;
            }
            note_file(manifest, stage, path);
        }
        if (any_computed) stage.status = "computed";
    });

    run_stage("estimate", [&](StageStatus& stage) {
        stage.status = "computed";
        std::ostringstream rows, curves;
        rows << kResultHeader;
        curves << kCurveHeader;
        for (int k = 0; k < config.n_instances; ++k) {
            EstimateOutput result =
                run_estimators(config, models[k], sample_sets[k], refs[k], coloring);
            for (const EstimatorReport& report : result.reports) {
                append_row(rows, {models[k].metadata().label, config.size_tag(), "sta",
                                  report.method, &report, result.postprocess_tag});
                if (!report.objective_curve.empty())
                    append_curve(curves, models[k].metadata().label, report.method,
                                 result.postprocess_tag, report.objective_curve);
            }
        }
        const fs::path rows_path = paths.estimates / "results.csv";
        const fs::path curves_path = paths.estimates / "curves.csv";
        atomic_write(rows_path, rows.str());
        atomic_write(curves_path, curves.str());
        note_file(manifest, stage, rows_path);
        note_file(manifest, stage, curves_path);
    });

    finalize_manifest(manifest);
    write_manifest(paths.root / "manifest.json", manifest);
    return manifest;
}

// ---------------------------------------------------------------------------
// presets

QuartileSummary quartiles(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("quartiles of nothing");
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const double pos = q * (static_cast<double>(values.size()) - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double t = pos - static_cast<double>(lo);
        return values[lo] * (1 - t) + values[hi] * t;
    };
    return {at(0.25), at(0.5), at(0.75)};
}

Manifest run_rescaling_sweep(const ExperimentConfig& config) {
    Manifest manifest = make_manifest(config);
    PipelinePaths paths(config);
    const Coloring coloring = coloring_for(config);
    const std::vector<double> grid = config.beta_grid();

    StageStatus stage{"rescaling-sweep", "computed", {}, ""};
    std::ostringstream rows, quart;
    rows << "instance,fraction,method,beta_hat,sentinel,se\n";
    quart << "fraction,method,q1,median,q3\n";

    std::vector<IsingModel> models;
    std::vector<ReferenceStatistics> refs;
    for (int k = 0; k < config.n_instances; ++k) {
        models.push_back(generate_instance(config, k));
        refs.push_back(reference_for(config, models.back(), grid, nullptr));
    }
    for (double fraction : config.fractions) {
        const double beta_t = fraction * config.beta_t;
        std::vector<double> ml_values, mlpl_values;
        for (int k = 0; k < config.n_instances; ++k) {
            const std::uint64_t seed = config.sampler_seed_base +
                                       static_cast<std::uint64_t>(k) +
                                       static_cast<std::uint64_t>(1000003.0 * fraction);
            SampleSet samples = run_sta(models[k], AnnealSchedule::linear(beta_t, config.sweeps),
                                        config.n_samples, coloring, seed, config.threads);
            EstimatorReport ml = estimate_ml(models[k], samples, refs[k]);
            EstimatorReport mlpl = estimate_mlpl(models[k], samples);
            for (const EstimatorReport* r : {&ml, &mlpl}) {
                rows << models[k].metadata().label << "," << format17(fraction) << ","
                     << r->method << "," << (r->is_finite() ? format17(r->beta_hat) : "") << ","
                     << (r->is_finite() ? "" : sentinel_name(r->sentinel)) << ","
                     << (std::isnan(r->bootstrap_se) ? "" : format17(r->bootstrap_se)) << "\n";
            }
            // out-of-grid maximum-likelihood results enter the quartiles at
            // the clamped grid edge
            if (ml.is_finite()) ml_values.push_back(ml.beta_hat);
            else ml_values.push_back(ml.sentinel == Sentinel::below_grid ? grid.front()
                                                                         : grid.back());
            if (mlpl.is_finite()) mlpl_values.push_back(mlpl.beta_hat);
        }
        const QuartileSummary mlq = quartiles(ml_values);
        quart << format17(fraction) << ",ml," << format17(mlq.q1) << "," << format17(mlq.median)
              << "," << format17(mlq.q3) << "\n";
        if (!mlpl_values.empty()) {
            const QuartileSummary plq = quartiles(mlpl_values);
            quart << format17(fraction) << ",mlpl," << format17(plq.q1) << ","
                  << format17(plq.median) << "," << format17(plq.q3) << "\n";
        }
    }
    const fs::path rows_path = paths.root / "rescaling_rows.csv";
    const fs::path quart_path = paths.root / "rescaling_quartiles.csv";
    atomic_write(rows_path, rows.str());
    atomic_write(quart_path, quart.str());
    note_file(manifest, stage, rows_path);
    note_file(manifest, stage, quart_path);
    manifest.stages.push_back(std::move(stage));
    finalize_manifest(manifest);
    write_manifest(paths.root / "manifest_rescaling.json", manifest);
    return manifest;
}

Manifest run_mse_beta_scan(const ExperimentConfig& config) {
    Manifest manifest = make_manifest(config);
    PipelinePaths paths(config);
    const Coloring coloring = coloring_for(config);
    const std::vector<double> grid = config.beta_grid();

    StageStatus stage{"mse-scan", "computed", {}, ""};
    std::ostringstream curves;
    curves << "instance,sweeps,tag,beta,value,se\n";
    for (int k = 0; k < config.n_instances; ++k) {
        IsingModel model = generate_instance(config, k);
        ReferenceStatistics ref = reference_for(config, model, grid, nullptr);
        for (int sweeps : config.sweep_set) {
            const std::uint64_t seed = config.sampler_seed_base +
                                       static_cast<std::uint64_t>(k) * 1000 +
                                       static_cast<std::uint64_t>(sweeps);
            SampleSet samples = run_sta(model, AnnealSchedule::linear(config.beta_t, sweeps),
                                        config.n_samples, coloring, seed, config.threads);
            ObjectiveCurve raw = mse_curve(model, samples, ref);
            // paired: the post-processed curve reuses the same sampler seed
            ObjectiveCurve pp =
                curve_with_postprocessing(model, samples, ref, coloring,
                                          config.postprocess_sweeps, seed ^ 0xC0FFEEULL,
                                          CurveObjective::mse);
            for (const auto& p : raw)
                curves << model.metadata().label << "," << sweeps << ",raw,"
                       << format17(p.beta) << "," << format17(p.value) << ",\n";
            for (const auto& p : pp)
                curves << model.metadata().label << "," << sweeps << ",pp,"
                       << format17(p.beta) << "," << format17(p.value) << ",\n";
        }
    }
    const fs::path path = paths.root / "mse_scan_curves.csv";
    atomic_write(path, curves.str());
    note_file(manifest, stage, path);
    manifest.stages.push_back(std::move(stage));
    finalize_manifest(manifest);
    write_manifest(paths.root / "manifest_mse_scan.json", manifest);
    return manifest;
}

Manifest run_estimator_scatter(const ExperimentConfig& config) {
    Manifest manifest = make_manifest(config);
    PipelinePaths paths(config);
    const Coloring coloring = coloring_for(config);
    const std::vector<double> grid = config.beta_grid();

    StageStatus stage{"estimator-scatter", "computed", {}, ""};
    std::ostringstream rows;
    rows << "instance,sampler,tag,beta_min_mse,beta_ml,ml_sentinel,mse_at_min\n";
    for (int k = 0; k < config.n_instances; ++k) {
        IsingModel model = generate_instance(config, k);
        ReferenceStatistics ref = reference_for(config, model, grid, nullptr);
        const std::uint64_t seed = config.sampler_seed_base + static_cast<std::uint64_t>(k);
        SampleSet samples = run_sta(model, AnnealSchedule::linear(config.beta_t, config.sweeps),
                                    config.n_samples, coloring, seed, config.threads);
        char sampler_tag[48];
        std::snprintf(sampler_tag, sizeof sampler_tag, "sta%d", config.sweeps);

        EstimatorReport ml = estimate_ml(model, samples, ref);
        EstimatorReport mse = estimate_min_mse(mse_curve(model, samples, ref), MinMode::global);
        rows << model.metadata().label << "," << sampler_tag << ",raw,"
             << format17(mse.beta_hat) << ","
             << (ml.is_finite() ? format17(ml.beta_hat) : "") << ","
             << (ml.is_finite() ? "" : sentinel_name(ml.sentinel)) << ","
             << format17(mse.objective_at_min) << "\n";

        ObjectiveCurve pp_curve =
            curve_with_postprocessing(model, samples, ref, coloring, config.postprocess_sweeps,
                                      seed ^ 0xC0FFEEULL, CurveObjective::mse);
        EstimatorReport mse_pp = estimate_min_mse(pp_curve, MinMode::rightmost_local);
        SampleSet pp_at_hat = postprocess(
            samples, model, mse_pp.beta_hat, config.postprocess_sweeps, coloring,
            seed ^ 0x50505050ULL, config.threads);
        EstimatorReport ml_pp = estimate_ml(model, pp_at_hat, ref);
        rows << model.metadata().label << "," << sampler_tag << ",pp,"
             << format17(mse_pp.beta_hat) << ","
             << (ml_pp.is_finite() ? format17(ml_pp.beta_hat) : "") << ","
             << (ml_pp.is_finite() ? "" : sentinel_name(ml_pp.sentinel)) << ","
             << format17(mse_pp.objective_at_min) << "\n";
    }
    const fs::path path = paths.root / "estimator_scatter.csv";
    atomic_write(path, rows.str());
    note_file(manifest, stage, path);
    manifest.stages.push_back(std::move(stage));
    finalize_manifest(manifest);
    write_manifest(paths.root / "manifest_scatter.json", manifest);
    return manifest;
}

}  // namespace tempest
