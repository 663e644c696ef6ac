#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "witness/detector.hpp"
#include "witness/interference.hpp"
#include "witness/mesh.hpp"
#include "witness/unitary.hpp"

namespace witness {

using Json = nlohmann::json;

// Matrix files: {"dim": N, "re": [[...]], "im": [[...]]}, row-major.
Json to_json(const InterferometerMatrix& u);
InterferometerMatrix matrix_from_json(const Json& j);

// Gram files: {"n": n, "re": [[...]], "im": [[...]]}.
Json to_json(const DistinguishabilityGram& s);
DistinguishabilityGram gram_from_json(const Json& j);

// Mesh files: {"dim": N, "cells": [{"layer", "modes": [a, b], "theta", "phi"}],
// "output_phases": [...]}.
Json to_json(const MeshProgram& program);
MeshProgram mesh_from_json(const Json& j);

Json to_json(const DetectorBank& bank);
DetectorBank bank_from_json(const Json& j, std::size_t modes);

/// "1-1-1-0" style pattern labels used in CSV files.
std::string pattern_label(const OccupationPattern& pattern);
OccupationPattern parse_pattern_label(const std::string& label);

/// CSV with columns pattern,probability.
void write_distribution_csv(std::ostream& out, const OutputDistribution& dist);

/// CSV with columns pattern,count.
void write_counts_csv(std::ostream& out, const CountsTable& counts);
CountsTable read_counts_csv(std::istream& in, std::size_t photons, double integration_time,
                            std::uint64_t total_trials);

/// counts.csv plus counts.json sidecar (seed, rate, time, bank).
void save_counts(const std::filesystem::path& csv_path, const CountsTable& counts, Seed seed, double event_rate,
                 const DetectorBank& bank);
CountsTable load_counts(const std::filesystem::path& csv_path);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace witness
