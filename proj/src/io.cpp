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

#include "tempest/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tempest {

using nlohmann::json;

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint64_t fnv1a64_string(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// instances

void write_instance(const std::filesystem::path& path, const IsingModel& model,
                    const ChimeraSpec* topology) {
    json doc;
    doc["format"] = "tempest-instance";
    doc["version"] = 1;
    doc["n_spins"] = model.n_spins();
    json edges = json::array();
    for (const Edge& e : model.edges()) edges.push_back({e.i, e.j, e.weight});
    doc["edges"] = std::move(edges);
    json fields = json::array();
    for (int i = 0; i < model.n_spins(); ++i)
        if (model.fields()[i] != 0.0) fields.push_back({i, model.fields()[i]});
    doc["fields"] = std::move(fields);
    json meta;
    meta["label"] = model.metadata().label;
    meta["generator"] = model.metadata().generator;
    meta["seed"] = model.metadata().seed;
    if (topology) {
        json topo;
        topo["rows"] = topology->rows;
        topo["cols"] = topology->cols;
        topo["shore"] = topology->shore;
        topo["dead_qubits"] = topology->dead_qubits;
        json dc = json::array();
        for (auto [a, b] : topology->dead_couplers) dc.push_back({a, b});
        topo["dead_couplers"] = std::move(dc);
        meta["topology"] = std::move(topo);
    }
    doc["metadata"] = std::move(meta);
    atomic_write(path, doc.dump(2) + "\n");
}

LoadedInstance read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    json doc = json::parse(in);
    if (doc.value("format", "") != "tempest-instance")
        throw std::runtime_error(path.string() + " is not a tempest instance file");
    const int n = doc.at("n_spins").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges"))
        edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    std::vector<double> fields(n, 0.0);
    for (const auto& f : doc.at("fields")) fields[f.at(0).get<int>()] = f.at(1).get<double>();
    ModelMetadata meta;
    if (doc.contains("metadata")) {
        const auto& m = doc["metadata"];
        meta.label = m.value("label", "");
        meta.generator = m.value("generator", "file");
        meta.seed = m.value("seed", std::uint64_t{0});
    }
    if (meta.label.empty()) meta.label = path.stem().string();
    LoadedInstance out{IsingModel(n, std::move(edges), std::move(fields), std::move(meta)), {}};
    if (doc.contains("metadata") && doc["metadata"].contains("topology")) {
        const auto& t = doc["metadata"]["topology"];
        ChimeraSpec spec;
        spec.rows = t.value("rows", 1);
        spec.cols = t.value("cols", 1);
        spec.shore = t.value("shore", 4);
        spec.dead_qubits = t.value("dead_qubits", std::vector<int>{});
        if (t.contains("dead_couplers"))
            for (const auto& dc : t["dead_couplers"])
                spec.dead_couplers.emplace_back(dc.at(0).get<int>(), dc.at(1).get<int>());
        out.topology = std::move(spec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// sample sets

namespace {

json sample_meta_to_json(const SampleSet& samples) {
    json h;
    h["model_label"] = samples.model_label();
    h["n_spins"] = samples.n_spins();
    h["sampler"] = samples.meta().sampler;
    h["schedule"] = samples.meta().schedule_summary;
    h["seed"] = samples.meta().seed;
    if (samples.meta().postprocess) {
        h["postprocess_beta"] = samples.meta().postprocess->beta;
        h["postprocess_sweeps"] = samples.meta().postprocess->sweeps;
    }
    return h;
}

SampleMeta sample_meta_from_json(const json& h) {
    SampleMeta meta;
    meta.sampler = h.value("sampler", "");
    meta.schedule_summary = h.value("schedule", "");
    meta.seed = h.value("seed", std::uint64_t{0});
    if (h.contains("postprocess_beta"))
        meta.postprocess = PostProcessRecord{h["postprocess_beta"].get<double>(),
                                             h.value("postprocess_sweeps", 0)};
    return meta;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples) {
    std::ostringstream out;
    out << "# tempest-samples v1\n";
    json h = sample_meta_to_json(samples);
    for (auto it = h.begin(); it != h.end(); ++it)
        out << "# " << it.key() << ": "
            << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
            << "\n";
    for (int k = 0; k < samples.size(); ++k) {
        auto row = samples.state(k);
        for (int i = 0; i < samples.n_spins(); ++i) {
            if (i) out << ',';
            out << (row[i] > 0 ? "+1" : "-1");
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample file " + path.string());
    std::string line;
    json header;
    std::vector<std::int8_t> data;
    int n_spins = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos && line.size() > 2) {
                std::string key = line.substr(2, colon - 2);
                while (!key.empty() && key.back() == ' ') key.pop_back();
                std::string value = line.substr(colon + 1);
                while (!value.empty() && value.front() == ' ') value.erase(value.begin());
                if (key == "n_spins" || key == "seed" || key == "postprocess_sweeps")
                    header[key] = std::stoll(value);
                else if (key == "postprocess_beta")
                    header[key] = std::stod(value);
                else if (!key.empty() && key.find(' ') == std::string::npos)
                    header[key] = value;
            }
            continue;
        }
        std::vector<std::int8_t> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const int v = std::stoi(cell);
            if (v != 1 && v != -1)
                throw std::runtime_error("sample entries must be +1 or -1 in " + path.string());
            row.push_back(static_cast<std::int8_t>(v));
        }
        if (n_spins < 0) n_spins = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != n_spins)
            throw std::runtime_error("ragged sample rows in " + path.string());
        data.insert(data.end(), row.begin(), row.end());
    }
    if (n_spins <= 0) throw std::runtime_error("no samples in " + path.string());
    if (header.contains("n_spins") && header["n_spins"].get<int>() != n_spins)
        throw std::runtime_error("header n_spins disagrees with rows in " + path.string());
    SampleSet out(header.value("model_label", std::string{}), n_spins,
                  sample_meta_from_json(header));
    out.raw() = std::move(data);
    return out;
}

namespace {
constexpr char kSampleMagic[4] = {'T', 'S', 'B', 'M'};
}

void write_samples_binary(const std::filesystem::path& path, const SampleSet& samples) {
    const std::string header = sample_meta_to_json(samples).dump();
    const int n = samples.n_spins();
    const std::size_t stride = static_cast<std::size_t>((n + 7) / 8);
    std::string out;
    out.reserve(16 + header.size() + stride * samples.size());
    out.append(kSampleMagic, 4);
    auto put_u32 = [&](std::uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); };
    auto put_u64 = [&](std::uint64_t v) { out.append(reinterpret_cast<const char*>(&v), 8); };
    put_u32(1);  // version
    put_u32(static_cast<std::uint32_t>(header.size()));
    out += header;
    put_u32(static_cast<std::uint32_t>(n));
    put_u64(static_cast<std::uint64_t>(samples.size()));
    for (int k = 0; k < samples.size(); ++k) {
        auto row = samples.state(k);
        std::string packed(stride, '\0');
        for (int i = 0; i < n; ++i)
            if (row[i] > 0) packed[i / 8] |= static_cast<char>(1 << (i % 8));
        out += packed;
    }
    atomic_write(path, out);
}

SampleSet read_samples_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open sample file " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kSampleMagic, 4) != 0)
        throw std::runtime_error(path.string() + " is not a tempest binary sample file");
    auto get_u32 = [&] {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&] {
        std::uint64_t v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != 1) throw std::runtime_error("unsupported sample file version");
    const std::uint32_t header_len = get_u32();
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    const int n = static_cast<int>(get_u32());
    const std::uint64_t n_samples = get_u64();
    if (!in) throw std::runtime_error("truncated sample file " + path.string());
    const json header = json::parse(header_str);
    SampleSet out(header.value("model_label", std::string{}), n,
                  sample_meta_from_json(header));
    const std::size_t stride = static_cast<std::size_t>((n + 7) / 8);
    std::string packed(stride, '\0');
    out.reserve(static_cast<int>(n_samples));
    std::vector<std::int8_t> row(n);
    for (std::uint64_t k = 0; k < n_samples; ++k) {
        in.read(packed.data(), static_cast<std::streamsize>(stride));
        if (!in) throw std::runtime_error("truncated sample file " + path.string());
        for (int i = 0; i < n; ++i)
            row[i] = (packed[i / 8] >> (i % 8)) & 1 ? 1 : -1;
        out.append(row);
    }
    return out;
}

void write_samples(const std::filesystem::path& path, const SampleSet& samples) {
    if (path.extension() == ".csv")
        write_samples_csv(path, samples);
    else
        write_samples_binary(path, samples);
}

SampleSet read_samples(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return read_samples_csv(path);
    return read_samples_binary(path);
}

// ---------------------------------------------------------------------------
// reference statistics

std::string reference_cache_stem(std::uint64_t model_hash, const std::vector<double>& grid,
                                 RefMethod method) {
    std::string grid_desc;
    for (double b : grid) grid_desc += format17(b) + ",";
    char buf[64];
    std::snprintf(buf, sizeof buf, "ref_%016llx_%016llx_%s",
                  static_cast<unsigned long long>(model_hash),
                  static_cast<unsigned long long>(fnv1a64_string(grid_desc)),
                  ref_method_name(method).c_str());
    return buf;
}

std::string reference_cache_stem(const ReferenceStatistics& ref) {
    return reference_cache_stem(ref.model_hash, ref.beta_grid, ref.method);
}

void write_reference(const std::filesystem::path& json_path, const ReferenceStatistics& ref) {
    json doc;
    doc["format"] = "tempest-reference";
    doc["version"] = 1;
    doc["method"] = ref_method_name(ref.method);
    doc["method_detail"] = ref.method_detail;
    doc["model_label"] = ref.model_label;
    doc["model_hash"] = ref.model_hash;
    json edges = json::array();
    for (const Edge& e : ref.edges) edges.push_back({e.i, e.j, e.weight});
    doc["edges"] = std::move(edges);
    doc["has_se"] = !ref.mean_energy_se.empty();
    doc["csv"] = json_path.stem().string() + ".csv";

    std::ostringstream csv;
    csv << "beta,mean_energy,log_z";
    for (const Edge& e : ref.edges) csv << ",c" << e.i << "_" << e.j;
    const int n_spins = ref.magnetizations.empty()
                            ? 0
                            : static_cast<int>(ref.magnetizations.front().size());
    for (int i = 0; i < n_spins; ++i) csv << ",m" << i;
    if (!ref.mean_energy_se.empty()) {
        csv << ",mean_energy_se,log_z_se";
        for (const Edge& e : ref.edges) csv << ",c" << e.i << "_" << e.j << "_se";
    }
    csv << "\n";
    for (std::size_t b = 0; b < ref.beta_grid.size(); ++b) {
        csv << format17(ref.beta_grid[b]) << "," << format17(ref.mean_energy[b]) << ","
            << format17(ref.log_z[b]);
        for (double c : ref.edge_correlations[b]) csv << "," << format17(c);
        if (n_spins)
            for (double m : ref.magnetizations[b]) csv << "," << format17(m);
        if (!ref.mean_energy_se.empty()) {
            csv << "," << format17(ref.mean_energy_se[b]) << "," << format17(ref.log_z_se[b]);
            for (double c : ref.corr_se[b]) csv << "," << format17(c);
        }
        csv << "\n";
    }
    std::filesystem::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    atomic_write(csv_path, csv.str());
    atomic_write(json_path, doc.dump(2) + "\n");
}

ReferenceStatistics read_reference(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open reference file " + json_path.string());
    json doc = json::parse(in);
    if (doc.value("format", "") != "tempest-reference")
        throw std::runtime_error(json_path.string() + " is not a tempest reference file");
    ReferenceStatistics ref;
    ref.method = ref_method_from_name(doc.at("method").get<std::string>());
    ref.method_detail = doc.value("method_detail", "");
    ref.model_label = doc.value("model_label", "");
    ref.model_hash = doc.value("model_hash", std::uint64_t{0});
    for (const auto& e : doc.at("edges"))
        ref.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    const bool has_se = doc.value("has_se", false);

    std::filesystem::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open reference csv " + csv_path.string());
    std::string line;
    std::getline(csv, line);  // header
    int n_spins = 0;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ','))
            if (!col.empty() && col[0] == 'm' && col.find('_') == std::string::npos) ++n_spins;
    }
    const std::size_t n_edges = ref.edges.size();
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        std::size_t want = 3 + n_edges + n_spins + (has_se ? 2 + n_edges : 0);
        if (row.size() != want)
            throw std::runtime_error("malformed reference csv row in " + csv_path.string());
        std::size_t at = 0;
        ref.beta_grid.push_back(row[at++]);
        ref.mean_energy.push_back(row[at++]);
        ref.log_z.push_back(row[at++]);
        ref.edge_correlations.emplace_back(row.begin() + at, row.begin() + at + n_edges);
        at += n_edges;
        if (n_spins) {
            ref.magnetizations.emplace_back(row.begin() + at, row.begin() + at + n_spins);
            at += n_spins;
        }
        if (has_se) {
            ref.mean_energy_se.push_back(row[at++]);
            ref.log_z_se.push_back(row[at++]);
            ref.corr_se.emplace_back(row.begin() + at, row.begin() + at + n_edges);
        }
    }
    return ref;
}

}  // namespace tempest
