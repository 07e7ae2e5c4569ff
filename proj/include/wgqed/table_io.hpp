#pragma once

// Plot-ready CSV tables. Every file starts with optional "# key = value"
// metadata lines followed by a header row; numbers are written with 17
// significant digits so that re-reading reproduces them exactly.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wgqed/core.hpp"

namespace wgqed::io {

using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string format_number(double v);

struct CsvTable {
  Metadata metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  // source line of each row

  /// Value of a metadata key, or empty.
  std::string meta(const std::string& key) const;
};

/// Throws DataError with file and line on malformed input.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Columns power_uW, detuning_GHz, I_t, counts; one block per power.
void write_intensity(const std::filesystem::path& path, const std::vector<IntensityScan>& scans,
                     const Metadata& metadata = {});
std::vector<IntensityScan> read_intensity(const std::filesystem::path& path);

/// Columns pair, tau_ns, g2, coincidences; all records of one file share the
/// drive power and detuning given in the metadata.
void write_g2(const std::filesystem::path& path, const std::vector<G2Record>& records, const Metadata& metadata = {});
std::vector<G2Record> read_g2(const std::filesystem::path& path);

/// intensity.csv plus every g2*.csv in `dir`, in file-name order.
MeasurementSet read_measurement_set(const std::filesystem::path& dir);

/// Columns detuning_GHz, re, im, modulus, phase_deg.
void write_spectrum(const std::filesystem::path& path, const ComplexSpectrum& spectrum, const Metadata& metadata = {});
/// Columns delta_GHz, re_T, im_T (T in ns).
void write_sector(const std::filesystem::path& path, const TwoPhotonSector& sector, const Metadata& metadata = {});

}  // namespace wgqed::io
