#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "rom_fixture.hpp"
#include "semrb/errors.hpp"
#include "semrb/io.hpp"

using namespace semrb;
using semrb::testing::rom_fixture;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("semrb_test_" + name)).string();
}

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("snap.bin");
  save_snapshots(path, f.snapshots);
  const SnapshotSet s = load_snapshots(path, f.prob.disc.fingerprint());
  CHECK(s.fingerprint == f.snapshots.fingerprint);
  CHECK(s.nus == f.snapshots.nus);
  CHECK(s.states == f.snapshots.states);
  CHECK(s.interiors == f.snapshots.interiors);
  CHECK(s.lift == f.snapshots.lift);
  const ArtifactHeader h = read_header(path);
  CHECK(h.kind == ArtifactKind::snapshots);
  CHECK(h.version == kFormatVersion);
  std::filesystem::remove(path);
}

TEST_CASE("reduced model round trip") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("rom.bin");
  save_rom(path, f.exact);
  const RomOperators r = load_rom(path, f.prob.disc.fingerprint());
  CHECK(r.K_visc == f.exact.K_visc);
  CHECK(r.K_fixed == f.exact.K_fixed);
  CHECK(r.T == f.exact.T);
  CHECK(r.R_conv == f.exact.R_conv);
  CHECK(r.r_visc == f.exact.r_visc);
  CHECK(r.r_fixed == f.exact.r_fixed);
  CHECK(r.state_pod.modes == f.exact.state_pod.modes);
  CHECK(r.interior_pod.singular_values == f.exact.interior_pod.singular_values);
  CHECK(r.training_nus == f.exact.training_nus);
  CHECK(r.training_coords == f.exact.training_coords);
  std::filesystem::remove(path);
}

TEST_CASE("field round trip") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("field.bin");
  save_field(path, f.prob.disc, f.fields[1]);
  const FlowField g = load_field(path, f.prob.disc);
  CHECK(testing::flatten(g) == testing::flatten(f.fields[1]));
  CHECK(g.nu == f.fields[1].nu);
  std::filesystem::remove(path);
}

TEST_CASE("damaged and mismatched artifacts are rejected by kind") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("bad.bin");
  save_snapshots(path, f.snapshots);
  const std::vector<char> good = read_bytes(path);

  SUBCASE("truncated") {
    write_bytes(path, {good.begin(), good.begin() + static_cast<long>(good.size() / 2)});
    CHECK_THROWS_AS(load_snapshots(path), CorruptArtifact);
    write_bytes(path, {good.begin(), good.begin() + 3});
    CHECK_THROWS_AS(load_snapshots(path), CorruptArtifact);
  }
  SUBCASE("bad magic") {
    std::vector<char> b = good;
    b[0] = 'X';
    write_bytes(path, b);
    CHECK_THROWS_AS(load_snapshots(path), CorruptArtifact);
  }
  SUBCASE("trailing bytes") {
    std::vector<char> b = good;
    b.push_back('\0');
    write_bytes(path, b);
    CHECK_THROWS_AS(load_snapshots(path), CorruptArtifact);
  }
  SUBCASE("foreign version") {
    std::vector<char> b = good;
    b[5] = 9;  // low byte of the version word
    write_bytes(path, b);
    CHECK_THROWS_AS(load_snapshots(path), VersionMismatch);
    CHECK_THROWS_AS(load_snapshots(path), IncompatibleArtifact);
  }
  SUBCASE("other discretization") {
    CHECK_THROWS_AS(load_snapshots(path, f.prob.disc.fingerprint() ^ 1u), FingerprintMismatch);
  }
  SUBCASE("wrong payload kind") {
    CHECK_THROWS_AS(load_rom(path), FingerprintMismatch);
  }
  std::filesystem::remove(path);
}

TEST_CASE("field export samples the default grid") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("field.csv");
  const int rows = export_field(path, f.prob.disc, f.fields[0]);
  CHECK(rows == 361 * 61);
  CHECK(count_lines(path) == 22022);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,y,u_x,u_y,p");
  CHECK_THROWS_AS(export_field(path, f.prob.disc, f.fields[0], {1, 5}), std::invalid_argument);
  std::filesystem::remove(path);
}

TEST_CASE("sweep report round trip with missing cells") {
  const std::string path = temp_path("report.csv");
  SweepResult a;
  a.nu = 0.005;
  a.reynolds = reynolds_number(a.nu);
  a.iterations = 12;
  a.final_rel_change = 3e-9;
  a.asymmetry = 0.4;
  a.fom_time_s = 0.06;
  SweepResult b = a;
  b.nu = 0.007;
  b.reynolds = reynolds_number(b.nu);
  b.rel_h1_error = 1e-3;
  write_sweep_report(path, {a, b});
  const auto rows = read_sweep_report(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].nu == 0.007);  // descending
  CHECK(rows[0].rel_h1_error.value() == 1e-3);
  CHECK_FALSE(rows[1].rel_h1_error.has_value());
  CHECK_FALSE(rows[1].rom_time_s.has_value());
  CHECK(rows[1].iterations == 12);
  CHECK(rows[1].fom_time_s.value() == 0.06);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "nu,reynolds,iterations,final_rel_change,asymmetry,fom_time_s,rom_time_s,rel_h1_error");
  std::filesystem::remove(path);
}

TEST_CASE("POD spectrum lists both bases") {
  const auto& f = rom_fixture();
  const std::string path = temp_path("spectrum.csv");
  write_pod_spectrum(path, f.exact);
  CHECK(count_lines(path) == 1 + f.exact.state_pod.singular_values.size() +
                                 f.exact.interior_pod.singular_values.size());
  std::filesystem::remove(path);
}
