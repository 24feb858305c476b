#pragma once

// Field snapshots on disk.
//
// CSV layout:
//   # nx,ny,hx,hy,kind
//   <nx>,<ny>,<hx>,<hy>,<kind>
//   one line per grid row (j ascending), values comma-separated (i ascending)
//
// Binary layout: little-endian IEEE-754 doubles. An 8-value header
//   [magic, version, kind_code, nx, ny, hx, hy, value_count]
// followed by value_count row-major values.
//
// kind is one of cell, face_x, face_y, node. Row lengths follow the location:
// cell nx*ny, face_x (nx+1)*ny, face_y nx*(ny+1), node (nx+1)*(ny+1).

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "chns/grid.hpp"

namespace chns {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind { Cell = 0, FaceX = 1, FaceY = 2, Node = 3 };

const char* to_string(FieldKind kind);
FieldKind field_kind_from_string(const std::string& text);

struct Snapshot {
  int nx = 0;
  int ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  FieldKind kind = FieldKind::Cell;
  std::vector<double> values;

  int columns() const;
  int rows() const;
};

inline constexpr double kSnapshotMagic = 1129466691.0;  // "CHNS" read as a big-endian uint32
inline constexpr double kSnapshotVersion = 1.0;

Snapshot snapshot_of(const CellField& f);
Snapshot snapshot_of_x(const MacVector& w);
Snapshot snapshot_of_y(const MacVector& w);

/// Rebuilds a cell field on the unit-origin grid described by the snapshot.
CellField cell_field_from(const Snapshot& s);
/// Combines an x-face and a y-face snapshot into a velocity.
MacVector mac_vector_from(const Snapshot& sx, const Snapshot& sy);

void write_csv(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_csv(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_binary(const std::filesystem::path& path);

}  // namespace chns
