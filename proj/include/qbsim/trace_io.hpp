#ifndef QBSIM_TRACE_IO_HPP
#define QBSIM_TRACE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "qbsim/dynamics.hpp"

namespace qbsim {

/// Shortest round-trip text for a double: 17 significant digits.
std::string format_real(Real x);

/// Physical parameters of a run as metadata entries.
TraceMetadata describe_run(const SystemParams& params, const LatticeEnvironment& env,
                           const ProtocolSchedule& schedule);

/// Column-major table written as CSV with a header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Real>> rows;

  void add_row(std::vector<Real> row);
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// `t,energy` CSV.
void write_trace_csv(const std::filesystem::path& path, const EnergyTrace& trace);

/// JSON sidecar next to a CSV file: <name>.meta.json.
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);
void write_metadata(const std::filesystem::path& csv_path, const TraceMetadata& metadata);

const char* library_version() noexcept;

}  // namespace qbsim

#endif  // QBSIM_TRACE_IO_HPP
