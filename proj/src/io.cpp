#include "semrb/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "semrb/errors.hpp"

namespace semrb {

namespace {

constexpr std::array<char, 5> kMagic{'S', 'E', 'M', 'R', 'B'};

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  }

  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }

  void header(const ArtifactHeader& h) {
    out_.write(kMagic.data(), kMagic.size());
    u32(h.version);
    u64(h.fingerprint);
    u32(static_cast<std::uint32_t>(h.kind));
  }

  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }

  void vector(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v(i));
  }

  void matrix(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
    }
  }

  void pod(const PodBasis& b) {
    u64(static_cast<std::uint64_t>(b.n));
    f64(b.energy_fraction);
    vector(b.singular_values);
    matrix(b.modes);
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_);
  }

 private:
  void le(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(buf, bytes);
  }

  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open " + path + " for reading");
  }

  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }

  ArtifactHeader header() {
    std::array<char, 5> magic{};
    in_.read(magic.data(), magic.size());
    if (in_.gcount() != static_cast<std::streamsize>(magic.size())) truncated();
    if (magic != kMagic) throw CorruptArtifact(path_ + ": not a SEMRB artifact (bad magic)");
    ArtifactHeader h;
    h.version = u32();
    if (h.version != kFormatVersion) {
      throw VersionMismatch(path_ + ": format version " + std::to_string(h.version) +
                            ", expected " + std::to_string(kFormatVersion));
    }
    h.fingerprint = u64();
    h.kind = static_cast<ArtifactKind>(u32());
    return h;
  }

  std::vector<double> doubles() {
    const std::uint64_t n = count(8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }

  Eigen::VectorXd vector() {
    const std::uint64_t n = count(8);
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = f64();
    return v;
  }

  Eigen::MatrixXd matrix() {
    const std::uint64_t r = u64();
    const std::uint64_t c = u64();
    if (r != 0 && c > remaining() / 8 / r) truncated();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f64();
    }
    return m;
  }

  PodBasis pod() {
    PodBasis b;
    b.n = static_cast<int>(u64());
    b.energy_fraction = f64();
    b.singular_values = vector();
    b.modes = matrix();
    if (b.modes.cols() != b.n) throw CorruptArtifact(path_ + ": inconsistent basis dimensions");
    return b;
  }

  void expect_end() {
    in_.peek();
    if (!in_.eof()) throw CorruptArtifact(path_ + ": trailing bytes after payload");
  }

 private:
  std::uint64_t le(int bytes) {
    unsigned char buf[8];
    in_.read(reinterpret_cast<char*>(buf), bytes);
    if (in_.gcount() != bytes) truncated();
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }

  std::uint64_t remaining() {
    const auto here = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(here);
    return static_cast<std::uint64_t>(end - here);
  }

  std::uint64_t count(std::uint64_t element_bytes) {
    const std::uint64_t n = u64();
    if (n > remaining() / element_bytes) truncated();
    return n;
  }

  [[noreturn]] void truncated() { throw CorruptArtifact(path_ + ": truncated file"); }

  std::string path_;
  std::ifstream in_;
};

void check_header(const std::string& path, const ArtifactHeader& h, ArtifactKind kind,
                  std::optional<std::uint64_t> expected) {
  if (h.kind != kind) {
    throw FingerprintMismatch(path + ": artifact holds a different payload kind");
  }
  if (expected && *expected != h.fingerprint) {
    throw FingerprintMismatch(path + ": artifact was built for a different discretization "
                              "(mesh, basis order or dof layout)");
  }
}

std::string cell(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

ArtifactHeader read_header(const std::string& path) {
  Reader r(path);
  return r.header();
}

void save_snapshots(const std::string& path, const SnapshotSet& set) {
  set.validate();
  Writer w(path);
  w.header({kFormatVersion, set.fingerprint, ArtifactKind::snapshots});
  w.doubles(set.nus);
  w.matrix(set.states);
  w.matrix(set.interiors);
  w.vector(set.lift);
  w.finish();
}

SnapshotSet load_snapshots(const std::string& path, std::optional<std::uint64_t> expected) {
  Reader r(path);
  const ArtifactHeader h = r.header();
  check_header(path, h, ArtifactKind::snapshots, expected);
  SnapshotSet set;
  set.fingerprint = h.fingerprint;
  set.nus = r.doubles();
  set.states = r.matrix();
  set.interiors = r.matrix();
  set.lift = r.vector();
  r.expect_end();
  try {
    set.validate();
  } catch (const std::invalid_argument& e) {
    throw CorruptArtifact(path + ": " + e.what());
  }
  return set;
}

void save_rom(const std::string& path, const RomOperators& ops) {
  Writer w(path);
  w.header({kFormatVersion, ops.fingerprint, ArtifactKind::rom});
  w.pod(ops.state_pod);
  w.pod(ops.interior_pod);
  w.matrix(ops.K_visc);
  w.matrix(ops.K_fixed);
  w.matrix(ops.T);
  w.vector(ops.r_visc);
  w.vector(ops.r_fixed);
  w.matrix(ops.R_conv);
  w.vector(ops.lift);
  w.doubles(ops.training_nus);
  w.matrix(ops.training_coords);
  w.finish();
}

RomOperators load_rom(const std::string& path, std::optional<std::uint64_t> expected) {
  Reader r(path);
  const ArtifactHeader h = r.header();
  check_header(path, h, ArtifactKind::rom, expected);
  RomOperators ops;
  ops.fingerprint = h.fingerprint;
  ops.state_pod = r.pod();
  ops.interior_pod = r.pod();
  ops.K_visc = r.matrix();
  ops.K_fixed = r.matrix();
  ops.T = r.matrix();
  ops.r_visc = r.vector();
  ops.r_fixed = r.vector();
  ops.R_conv = r.matrix();
  ops.lift = r.vector();
  ops.training_nus = r.doubles();
  ops.training_coords = r.matrix();
  r.expect_end();
  const Eigen::Index n = ops.size();
  if (ops.K_visc.rows() != n || ops.K_fixed.rows() != n || ops.T.rows() != n * n ||
      ops.T.cols() != n || ops.R_conv.cols() != n || ops.r_visc.size() != n) {
    throw CorruptArtifact(path + ": inconsistent reduced operator dimensions");
  }
  return ops;
}

void save_field(const std::string& path, const Discretization& disc, const FlowField& field) {
  check_layout(disc, field);
  Writer w(path);
  w.header({kFormatVersion, disc.fingerprint(), ArtifactKind::field});
  w.f64(field.nu);
  w.u64(static_cast<std::uint64_t>(field.iterations));
  for (const auto& v : field.velocity) w.vector(v);
  for (const auto& p : field.pressure) w.vector(p);
  w.finish();
}

FlowField load_field(const std::string& path, const Discretization& disc) {
  Reader r(path);
  check_header(path, r.header(), ArtifactKind::field, disc.fingerprint());
  FlowField f;
  f.nu = r.f64();
  f.iterations = static_cast<int>(r.u64());
  f.velocity.resize(disc.elements());
  f.pressure.resize(disc.elements());
  for (auto& v : f.velocity) v = r.vector();
  for (auto& p : f.pressure) p = r.vector();
  r.expect_end();
  try {
    check_layout(disc, f);
  } catch (const std::invalid_argument& e) {
    throw CorruptArtifact(path + ": " + e.what());
  }
  return f;
}

int export_field(const std::string& path, const Discretization& disc, const FlowField& field,
                 SampleGrid grid) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("sample grid needs >= 2 points per axis");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "x,y,u_x,u_y,p\n" << std::setprecision(12);
  const double lx = disc.mesh.lx;
  const double ly = disc.mesh.ly;
  int rows = 0;
  for (int j = 0; j < grid.ny; ++j) {
    const double y = ly * j / (grid.ny - 1);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = lx * i / (grid.nx - 1);
      const auto v = evaluate(disc, field, x, y);
      out << x << ',' << y << ',' << v[0] << ',' << v[1] << ',' << v[2] << '\n';
      ++rows;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  return rows;
}

void write_sweep_report(const std::string& path, std::vector<SweepResult> results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const SweepResult& a, const SweepResult& b) { return a.nu > b.nu; });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "nu,reynolds,iterations,final_rel_change,asymmetry,fom_time_s,rom_time_s,rel_h1_error\n";
  for (const SweepResult& r : results) {
    out << cell(r.nu) << ',' << cell(r.reynolds) << ',' << r.iterations << ','
        << cell(r.final_rel_change) << ',' << cell(r.asymmetry) << ',' << cell(r.fom_time_s) << ','
        << cell(r.rom_time_s) << ',' << cell(r.rel_h1_error) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<ReportRow> read_sweep_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 8) throw std::runtime_error(path + ": malformed report row");
    ReportRow r;
    r.nu = std::stod(cells[0]);
    r.reynolds = std::stod(cells[1]);
    r.iterations = std::stoi(cells[2]);
    r.final_rel_change = parse_cell(cells[3]);
    r.asymmetry = parse_cell(cells[4]);
    r.fom_time_s = parse_cell(cells[5]);
    r.rom_time_s = parse_cell(cells[6]);
    r.rel_h1_error = parse_cell(cells[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_pod_spectrum(const std::string& path, const RomOperators& ops) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "basis,index,singular_value,cumulative_energy,retained\n" << std::setprecision(17);
  auto block = [&](const char* name, const PodBasis& b) {
    const double total = b.singular_values.squaredNorm();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.singular_values.size(); ++i) {
      acc += b.singular_values(i) * b.singular_values(i);
      out << name << ',' << i << ',' << b.singular_values(i) << ',' << (total > 0 ? acc / total : 1.0)
          << ',' << (i < b.n ? 1 : 0) << '\n';
    }
  };
  block("state", ops.state_pod);
  block("interior", ops.interior_pod);
}

void write_verify_table(const std::string& path, const std::vector<VerifyRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "order,h1_error,iterations,converged,seconds\n" << std::setprecision(12);
  for (const VerifyRow& r : rows) {
    out << r.order << ',' << r.h1_error << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << r.seconds << '\n';
  }
}

}  // namespace semrb
