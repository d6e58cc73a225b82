#pragma once

#include "calgeo/field.hpp"

#include <filesystem>
#include <string>

namespace calgeo::io {

/// CSV with a header row (coordinates..., value) at full double precision
/// (17 significant digits, bit-exact round trip) plus a sidecar JSON
/// metadata file `<path>.json` with {topology, resolution, convention_version}.
void save_scalar(const ScalarField& f, const std::filesystem::path& csv_path);
ScalarField load_scalar(const std::filesystem::path& csv_path);

void save_density(const Density& mu, const std::filesystem::path& csv_path);
Density load_density(const std::filesystem::path& csv_path);

void save_tensor(const SymTensorField& h, const std::filesystem::path& csv_path);
SymTensorField load_tensor(const std::filesystem::path& csv_path);

/// One CSV per time sample plus a JSON manifest {times, grid, generator}.
void save_metric_path(const MetricPath& path, const std::filesystem::path& dir,
                      const std::string& generator);
MetricPath load_metric_path(const std::filesystem::path& dir);

inline constexpr int convention_version = 1;

} // namespace calgeo::io
