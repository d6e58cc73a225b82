#include "calgeo/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace calgeo::io {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_sidecar(const GridPtr& grid, const std::filesystem::path& csv_path) {
    json meta = {{"topology", topology_name(grid->topology)},
                 {"resolution", grid->resolution},
                 {"convention_version", convention_version}};
    std::ofstream out(csv_path.string() + ".json");
    out << meta.dump(2) << "\n";
}

GridPtr read_sidecar(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path.string() + ".json");
    if (!in) throw std::runtime_error("missing sidecar: " + csv_path.string() + ".json");
    json meta = json::parse(in);
    if (meta.at("convention_version").get<int>() != convention_version)
        throw std::runtime_error("unsupported convention_version");
    return GridSpec::make(topology_from_name(meta.at("topology").get<std::string>()),
                          meta.at("resolution").get<int>());
}

void write_table(const GridPtr& grid, const std::filesystem::path& path,
                 const std::vector<std::string>& value_names,
                 const std::vector<const std::vector<double>*>& columns,
                 std::size_t values_per_node) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (int a = 0; a < grid->coord_dim; ++a) out << "x" << a << ",";
    for (std::size_t c = 0; c < value_names.size(); ++c)
        out << value_names[c] << (c + 1 < value_names.size() ? "," : "\n");
    for (std::size_t p = 0; p < grid->nodes; ++p) {
        for (int a = 0; a < grid->coord_dim; ++a)
            out << fmt17(grid->coord(p, a)) << ",";
        for (std::size_t c = 0; c < values_per_node; ++c) {
            out << fmt17((*columns[0])[p * values_per_node + c]);
            out << (c + 1 < values_per_node ? "," : "\n");
        }
    }
    write_sidecar(grid, path);
}

std::vector<double> read_values(const GridPtr& grid,
                                const std::filesystem::path& path,
                                std::size_t values_per_node) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values(grid->nodes * values_per_node);
    for (std::size_t p = 0; p < grid->nodes; ++p) {
        if (!std::getline(in, line))
            throw std::runtime_error("truncated CSV: " + path.string());
        std::istringstream ss(line);
        std::string cell;
        for (int a = 0; a < grid->coord_dim; ++a) std::getline(ss, cell, ',');
        for (std::size_t c = 0; c < values_per_node; ++c) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("short row in " + path.string());
            values[p * values_per_node + c] = std::stod(cell);
        }
    }
    return values;
}

} // namespace

void save_scalar(const ScalarField& f, const std::filesystem::path& path) {
    write_table(f.grid, path, {"value"}, {&f.v}, 1);
}

ScalarField load_scalar(const std::filesystem::path& path) {
    GridPtr grid = read_sidecar(path);
    ScalarField f(grid);
    f.v = read_values(grid, path, 1);
    return f;
}

void save_density(const Density& mu, const std::filesystem::path& path) {
    write_table(mu.grid, path, {"ratio"}, {&mu.ratio}, 1);
}

Density load_density(const std::filesystem::path& path) {
    GridPtr grid = read_sidecar(path);
    Density mu(grid);
    mu.ratio = read_values(grid, path, 1);
    mu.recompute_total();
    return mu;
}

void save_tensor(const SymTensorField& h, const std::filesystem::path& path) {
    std::vector<std::string> names;
    for (int a = 0; a < h.d; ++a)
        for (int b = 0; b < h.d; ++b)
            names.push_back("g" + std::to_string(a) + std::to_string(b));
    write_table(h.grid, path, names, {&h.v}, std::size_t(h.d) * h.d);
}

SymTensorField load_tensor(const std::filesystem::path& path) {
    GridPtr grid = read_sidecar(path);
    SymTensorField h(grid);
    h.v = read_values(grid, path, std::size_t(h.d) * h.d);
    return h;
}

void save_metric_path(const MetricPath& path, const std::filesystem::path& dir,
                      const std::string& generator) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["generator"] = generator;
    manifest["grid"] = {{"topology", topology_name(path.grid->topology)},
                        {"resolution", path.grid->resolution}};
    manifest["times"] = json::array();
    manifest["samples"] = json::array();
    for (std::size_t j = 0; j < path.times.size(); ++j) {
        manifest["times"].push_back(path.times[j]);
        const std::string name = "sample_" + std::to_string(j) + ".csv";
        manifest["samples"].push_back(name);
        save_tensor(path.metrics[j], dir / name);
    }
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
}

MetricPath load_metric_path(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("missing manifest in " + dir.string());
    json manifest = json::parse(in);
    MetricPath path;
    for (std::size_t j = 0; j < manifest.at("times").size(); ++j) {
        path.times.push_back(manifest["times"][j].get<double>());
        path.metrics.push_back(
            load_tensor(dir / manifest["samples"][j].get<std::string>()));
    }
    if (!path.metrics.empty()) path.grid = path.metrics.front().grid;
    return path;
}

} // namespace calgeo::io
