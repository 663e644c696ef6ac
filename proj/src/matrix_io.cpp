#include <fstream>
#include <sstream>

#include "witness/error.hpp"
#include "witness/io.hpp"

namespace witness {
namespace {

void complex_to_json(const ComplexMatrix& m, Json& re, Json& im) {
  re = Json::array();
  im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
}

ComplexMatrix complex_from_json(const Json& j, std::size_t dim) {
  const Json& re = j.at("re");
  const Json& im = j.at("im");
  if (re.size() != dim || im.size() != dim) throw InvalidArgument("matrix JSON rows do not match its dimension");
  const auto n = static_cast<Eigen::Index>(dim);
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& rr = re.at(static_cast<std::size_t>(r));
    const Json& ri = im.at(static_cast<std::size_t>(r));
    if (rr.size() != dim || ri.size() != dim) throw InvalidArgument("matrix JSON row has the wrong length");
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = Complex(rr.at(static_cast<std::size_t>(c)).get<double>(), ri.at(static_cast<std::size_t>(c)).get<double>());
    }
  }
  return m;
}

}  // namespace

Json to_json(const InterferometerMatrix& u) {
  Json j;
  j["dim"] = u.dim();
  complex_to_json(u.entries(), j["re"], j["im"]);
  return j;
}

InterferometerMatrix matrix_from_json(const Json& j) {
  const auto dim = j.at("dim").get<std::size_t>();
  return InterferometerMatrix(complex_from_json(j, dim));
}

Json to_json(const DistinguishabilityGram& s) {
  Json j;
  j["n"] = s.photons();
  complex_to_json(s.entries(), j["re"], j["im"]);
  return j;
}

DistinguishabilityGram gram_from_json(const Json& j) {
  const auto n = j.at("n").get<std::size_t>();
  return DistinguishabilityGram(complex_from_json(j, n));
}

Json to_json(const MeshProgram& program) {
  Json j;
  j["dim"] = program.dim;
  j["cells"] = Json::array();
  for (const auto& cell : program.cells) {
    j["cells"].push_back(
        {{"layer", cell.layer}, {"modes", {cell.mode, cell.mode + 1}}, {"theta", cell.theta}, {"phi", cell.phi}});
  }
  j["output_phases"] = program.output_phases;
  return j;
}

MeshProgram mesh_from_json(const Json& j) {
  MeshProgram program;
  program.dim = j.at("dim").get<std::size_t>();
  for (const Json& c : j.at("cells")) {
    const Json& modes = c.at("modes");
    const auto a = modes.at(0).get<std::size_t>();
    const auto b = modes.at(1).get<std::size_t>();
    if (b != a + 1) throw InvalidArgument("mesh cells must couple adjacent modes (a, a + 1)");
    program.cells.push_back(MeshCell{c.value("layer", 0), a, c.at("theta").get<double>(), c.at("phi").get<double>()});
  }
  program.output_phases = j.at("output_phases").get<std::vector<double>>();
  return program;
}

Json to_json(const DetectorBank& bank) {
  Json j;
  j["transmission"] = bank.transmission();
  j["dark_count_probability"] = bank.dark_count_probability();
  j["modes"] = Json::array();
  for (const auto& d : bank.mode_detectors()) {
    j["modes"].push_back({{"ratios", d.ratios}, {"efficiency", d.efficiency}});
  }
  return j;
}

DetectorBank bank_from_json(const Json& j, std::size_t modes) {
  const double transmission = j.value("transmission", 1.0);
  const double dark = j.value("dark_count_probability", 0.0);
  std::vector<ModeDetector> detectors(modes);
  if (j.contains("modes")) {
    const Json& list = j.at("modes");
    if (list.size() != modes) throw InvalidArgument("detector bank lists the wrong number of modes");
    for (std::size_t m = 0; m < modes; ++m) {
      detectors[m].ratios = list[m].at("ratios").get<std::array<double, 3>>();
      detectors[m].efficiency = list[m].value("efficiency", 1.0);
    }
  }
  return DetectorBank(std::move(detectors), transmission, dark);
}

std::string pattern_label(const OccupationPattern& pattern) {
  std::ostringstream out;
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    if (k) out << '-';
    out << pattern[k];
  }
  return out.str();
}

OccupationPattern parse_pattern_label(const std::string& label) {
  OccupationPattern pattern;
  std::istringstream in(label);
  std::string field;
  while (std::getline(in, field, '-')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size() || field.empty() || v < 0) {
      throw InvalidArgument("malformed occupation pattern '" + label + "'");
    }
    pattern.push_back(v);
  }
  if (pattern.empty()) throw InvalidArgument("empty occupation pattern");
  return pattern;
}

void write_distribution_csv(std::ostream& out, const OutputDistribution& dist) {
  out << "pattern,probability\n";
  out.precision(17);
  for (const auto& [pattern, p] : dist.probabilities()) out << pattern_label(pattern) << ',' << p << '\n';
}

void write_counts_csv(std::ostream& out, const CountsTable& counts) {
  out << "pattern,count\n";
  for (const auto& [pattern, c] : counts.events) out << pattern_label(pattern) << ',' << c << '\n';
}

CountsTable read_counts_csv(std::istream& in, std::size_t photons, double integration_time,
                            std::uint64_t total_trials) {
  CountsTable table;
  table.photons = photons;
  table.integration_time = integration_time;
  table.total_trials = total_trials;
  std::string line;
  if (!std::getline(in, line) || line.rfind("pattern,count", 0) != 0) {
    throw InvalidArgument("counts CSV must start with a 'pattern,count' header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("malformed counts CSV line: " + line);
    const OccupationPattern pattern = parse_pattern_label(line.substr(0, comma));
    if (table.modes == 0) table.modes = pattern.size();
    if (pattern.size() != table.modes) throw InvalidArgument("counts CSV mixes pattern lengths");
    table.events[pattern] += std::stoull(line.substr(comma + 1));
  }
  return table;
}

void save_counts(const std::filesystem::path& csv_path, const CountsTable& counts, Seed seed, double event_rate,
                 const DetectorBank& bank) {
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot write " + csv_path.string());
  write_counts_csv(out, counts);
  Json sidecar;
  sidecar["seed"] = seed;
  sidecar["event_rate"] = event_rate;
  sidecar["integration_time"] = counts.integration_time;
  sidecar["total_trials"] = counts.total_trials;
  sidecar["photons"] = counts.photons;
  sidecar["modes"] = counts.modes;
  sidecar["bank"] = to_json(bank);
  std::filesystem::path side = csv_path;
  side.replace_extension(".json");
  write_json_file(side, sidecar);
}

CountsTable load_counts(const std::filesystem::path& csv_path) {
  std::filesystem::path side = csv_path;
  side.replace_extension(".json");
  const Json meta = read_json_file(side);
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot read " + csv_path.string());
  CountsTable table = read_counts_csv(in, meta.at("photons").get<std::size_t>(),
                                      meta.at("integration_time").get<double>(),
                                      meta.at("total_trials").get<std::uint64_t>());
  table.modes = meta.at("modes").get<std::size_t>();
  return table;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace witness
