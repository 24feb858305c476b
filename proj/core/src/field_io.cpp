#include "chns/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace chns {

namespace {

static_assert(std::endian::native == std::endian::little, "binary snapshots assume a little-endian host");

void check_shape(const Snapshot& s) {
  if (s.nx <= 0 || s.ny <= 0) throw SnapshotError("snapshot grid dimensions must be positive");
  if (static_cast<std::size_t>(s.rows()) * s.columns() != s.values.size())
    throw SnapshotError("snapshot value count does not match its kind and grid");
}

GridSpec grid_of(const Snapshot& s) {
  return GridSpec{s.nx, s.ny, 0.0, s.nx * s.hx, 0.0, s.ny * s.hy};
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Cell: return "cell";
    case FieldKind::FaceX: return "face_x";
    case FieldKind::FaceY: return "face_y";
    case FieldKind::Node: return "node";
  }
  return "cell";
}

FieldKind field_kind_from_string(const std::string& text) {
  if (text == "cell") return FieldKind::Cell;
  if (text == "face_x") return FieldKind::FaceX;
  if (text == "face_y") return FieldKind::FaceY;
  if (text == "node") return FieldKind::Node;
  throw SnapshotError("unknown field kind '" + text + "'");
}

int Snapshot::columns() const {
  return (kind == FieldKind::FaceX || kind == FieldKind::Node) ? nx + 1 : nx;
}

int Snapshot::rows() const {
  return (kind == FieldKind::FaceY || kind == FieldKind::Node) ? ny + 1 : ny;
}

Snapshot snapshot_of(const CellField& f) {
  const auto& g = f.grid();
  return Snapshot{g.nx, g.ny, g.hx(), g.hy(), FieldKind::Cell, {f.values().begin(), f.values().end()}};
}

Snapshot snapshot_of_x(const MacVector& w) {
  const auto& g = w.grid();
  return Snapshot{g.nx, g.ny, g.hx(), g.hy(), FieldKind::FaceX, {w.u_values().begin(), w.u_values().end()}};
}

Snapshot snapshot_of_y(const MacVector& w) {
  const auto& g = w.grid();
  return Snapshot{g.nx, g.ny, g.hx(), g.hy(), FieldKind::FaceY, {w.v_values().begin(), w.v_values().end()}};
}

CellField cell_field_from(const Snapshot& s) {
  check_shape(s);
  if (s.kind != FieldKind::Cell) throw SnapshotError("expected a cell snapshot");
  CellField f(grid_of(s));
  std::copy(s.values.begin(), s.values.end(), f.values().begin());
  return f;
}

MacVector mac_vector_from(const Snapshot& sx, const Snapshot& sy) {
  check_shape(sx);
  check_shape(sy);
  if (sx.kind != FieldKind::FaceX || sy.kind != FieldKind::FaceY)
    throw SnapshotError("expected face_x and face_y snapshots");
  if (sx.nx != sy.nx || sx.ny != sy.ny || sx.hx != sy.hx || sx.hy != sy.hy)
    throw SnapshotError("velocity component snapshots disagree on the grid");
  MacVector w(grid_of(sx));
  std::copy(sx.values.begin(), sx.values.end(), w.u_values().begin());
  std::copy(sy.values.begin(), sy.values.end(), w.v_values().begin());
  return w;
}

void write_csv(const std::filesystem::path& path, const Snapshot& s) {
  check_shape(s);
  std::ofstream out(path);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  out << "# nx,ny,hx,hy,kind\n";
  out << s.nx << ',' << s.ny << ',' << s.hx << ',' << s.hy << ',' << to_string(s.kind) << '\n';
  const int cols = s.columns();
  for (int j = 0; j < s.rows(); ++j) {
    for (int i = 0; i < cols; ++i) {
      if (i) out << ',';
      out << s.values[static_cast<std::size_t>(j) * cols + i];
    }
    out << '\n';
  }
  if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SnapshotError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).rfind('#', 0) != 0)
    throw SnapshotError(path.string() + ": missing '# nx,ny,hx,hy,kind' header");
  if (!std::getline(in, line)) throw SnapshotError(path.string() + ": missing grid line");
  const auto meta = split_commas(line);
  if (meta.size() != 5) throw SnapshotError(path.string() + ": grid line needs 5 entries");
  Snapshot s;
  try {
    s.nx = std::stoi(meta[0]);
    s.ny = std::stoi(meta[1]);
    s.hx = std::stod(meta[2]);
    s.hy = std::stod(meta[3]);
  } catch (const std::exception&) {
    throw SnapshotError(path.string() + ": malformed grid line");
  }
  s.kind = field_kind_from_string(trim(meta[4]));
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    for (const auto& item : split_commas(line)) {
      try {
        s.values.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw SnapshotError(path.string() + ": bad value '" + item + "'");
      }
    }
  }
  check_shape(s);
  return s;
}

void write_binary(const std::filesystem::path& path, const Snapshot& s) {
  check_shape(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("cannot open " + path.string() + " for writing");
  const double header[8] = {kSnapshotMagic,
                            kSnapshotVersion,
                            static_cast<double>(static_cast<int>(s.kind)),
                            static_cast<double>(s.nx),
                            static_cast<double>(s.ny),
                            s.hx,
                            s.hy,
                            static_cast<double>(s.values.size())};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(s.values.data()),
            static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  if (!out) throw SnapshotError("write failed for " + path.string());
}

Snapshot read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("cannot open " + path.string());
  double header[8];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header))
    throw SnapshotError(path.string() + ": truncated header");
  if (header[0] != kSnapshotMagic) throw SnapshotError(path.string() + ": not a snapshot file");
  if (header[1] != kSnapshotVersion) throw SnapshotError(path.string() + ": unsupported version");
  const int code = static_cast<int>(header[2]);
  if (code < 0 || code > 3) throw SnapshotError(path.string() + ": unknown field kind code");
  Snapshot s;
  s.kind = static_cast<FieldKind>(code);
  s.nx = static_cast<int>(header[3]);
  s.ny = static_cast<int>(header[4]);
  s.hx = header[5];
  s.hy = header[6];
  const auto count = static_cast<std::size_t>(header[7]);
  s.values.resize(count);
  if (!in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(count * sizeof(double))))
    throw SnapshotError(path.string() + ": truncated payload");
  check_shape(s);
  return s;
}

}  // namespace chns
