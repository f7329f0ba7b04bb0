#include "qbsim/trace_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace qbsim {

std::string format_real(Real x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TraceMetadata describe_run(const SystemParams& params, const LatticeEnvironment& env,
                           const ProtocolSchedule& schedule) {
  return {
      {"omega_b", format_real(params.omega_b())},
      {"omega_c", format_real(params.omega_c())},
      {"kappa", format_real(params.kappa())},
      {"N", std::to_string(env.N())},
      {"varpi", format_real(env.varpi())},
      {"q", format_real(env.q())},
      {"g", format_real(env.g())},
      {"tau_c", format_real(schedule.tau_c())},
      {"tau_s", format_real(schedule.tau_s())},
      {"tau_d", format_real(schedule.tau_d())},
      {"code_version", library_version()},
  };
}

void CsvTable::add_row(std::vector<Real> row) {
  if (row.size() != columns.size()) throw DomainError("CSV row width does not match header");
  rows.push_back(std::move(row));
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  std::string line;
  for (const auto& row : table.rows) {
    line.clear();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) line += ',';
      line += format_real(row[i]);
    }
    out << line << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& trace) {
  CsvTable table{{"t", "energy"}, {}};
  table.rows.reserve(trace.times.size());
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    table.rows.push_back({trace.times[i], trace.energies[i]});
  }
  write_csv(path, table);
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_metadata(const std::filesystem::path& csv_path, const TraceMetadata& metadata) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) j[k] = v;
  std::ofstream out(metadata_path(csv_path));
  if (!out) throw std::runtime_error("cannot write metadata for " + csv_path.string());
  out << j.dump(2) << '\n';
}

const char* library_version() noexcept { return QBSIM_VERSION; }

}  // namespace qbsim
