#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ksmix/diagnostics.hpp"
#include "ksmix/field.hpp"

namespace ksmix {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kCsvHeader =
    "t,mass,l2_dev,h1,h1_paper,hm1,linf_dev,min_val,pn_low,criterion_integral,dt_used";

/// %.17g formatting.
std::string format_real(double x);

/// Header plus one LF-terminated row per record.
std::string records_csv(const std::vector<DiagnosticsRecord>& records);

/// Binary snapshot: "KSMX", u32 version 1, u32 dim, u32 n, f64 time, f64 mean,
/// then the values row-major, all little-endian.
std::string encode_snapshot(const ScalarField& f, double time);

struct SnapshotData {
  ScalarField field;
  double time = 0.0;
  double mean = 0.0;
};

SnapshotData decode_snapshot(std::string_view bytes);

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time);
SnapshotData read_snapshot(const std::filesystem::path& path);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

struct OutputFile {
  std::string name;
  std::string bytes;
};

struct Verdict {
  std::string name;
  bool pass = false;
  /// Measured values and the tolerance used.
  std::string detail;
};

/// "PASS name: detail" or "FAIL name: detail".
std::string verdict_line(const Verdict& v);

inline constexpr const char* kManifestName = "MANIFEST.sha256";

/// Writes every file into dir (created if needed), overwriting, then a manifest
/// with one "hash  name" line per file sorted by name.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

/// series.csv plus one snapshot file per named field.
void write_outputs(const std::filesystem::path& dir, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::pair<std::string, SnapshotData>>& snapshots);

std::string read_file(const std::filesystem::path& path);

}  // namespace ksmix
