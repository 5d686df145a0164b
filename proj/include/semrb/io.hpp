#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semrb/discretization.hpp"
#include "semrb/flow_field.hpp"
#include "semrb/kovasznay.hpp"
#include "semrb/pod.hpp"
#include "semrb/rom.hpp"
#include "semrb/solver.hpp"

namespace semrb {

enum class ArtifactKind : std::uint32_t { snapshots = 1, rom = 2, field = 3 };

inline constexpr std::uint32_t kFormatVersion = 1;

/// Every binary file starts with: "SEMRB" (5 bytes), version (u32),
/// fingerprint (u64), kind (u32). All integers and doubles little-endian.
struct ArtifactHeader {
  std::uint32_t version = kFormatVersion;
  std::uint64_t fingerprint = 0;
  ArtifactKind kind = ArtifactKind::snapshots;
};

/// Throws CorruptArtifact on a short read or bad magic, VersionMismatch on a
/// foreign version.
ArtifactHeader read_header(const std::string& path);

void save_snapshots(const std::string& path, const SnapshotSet& set);
/// With an expected fingerprint, a mismatch throws FingerprintMismatch.
SnapshotSet load_snapshots(const std::string& path,
                           std::optional<std::uint64_t> expected_fingerprint = {});

void save_rom(const std::string& path, const RomOperators& ops);
RomOperators load_rom(const std::string& path,
                      std::optional<std::uint64_t> expected_fingerprint = {});

void save_field(const std::string& path, const Discretization& disc, const FlowField& field);
FlowField load_field(const std::string& path, const Discretization& disc);

struct SampleGrid {
  int nx = 361;
  int ny = 61;
};

/// Uniform point samples (x, y, u_x, u_y, p) over the mesh bounding box;
/// returns the number of data rows.
int export_field(const std::string& path, const Discretization& disc, const FlowField& field,
                 SampleGrid grid = {});

/// One row per result, nu descending. NaN entries are written empty.
void write_sweep_report(const std::string& path, std::vector<SweepResult> results);

struct ReportRow {
  double nu = 0.0;
  double reynolds = 0.0;
  int iterations = 0;
  std::optional<double> final_rel_change;
  std::optional<double> asymmetry;
  std::optional<double> fom_time_s;
  std::optional<double> rom_time_s;
  std::optional<double> rel_h1_error;
};

std::vector<ReportRow> read_sweep_report(const std::string& path);

/// index, singular value, cumulative energy; one block per basis.
void write_pod_spectrum(const std::string& path, const RomOperators& ops);

void write_verify_table(const std::string& path, const std::vector<VerifyRow>& rows);

}  // namespace semrb
