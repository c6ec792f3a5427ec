#pragma once

#include "projflow/diagnostics.hpp"
#include "projflow/discretization.hpp"
#include "projflow/state.hpp"

#include <filesystem>
#include <iosfwd>

namespace projflow {

struct VtkOptions {
  /// Also write the projected velocity per cell (value at the centroid).
  bool cellwise = false;
};

/// Legacy ASCII VTK (3.0) unstructured grid on the mesh vertices with point
/// data "u_tilde", "u_proj" and "p". The gradient part of u_proj is
/// discontinuous across cells; its vertex value is the area-weighted mean
/// over the incident cells.
void write_vtk(const Snapshot& snap, const Discretization& disc, std::ostream& out, const VtkOptions& opts = {});
void write_vtk(const Snapshot& snap, const Discretization& disc, const std::filesystem::path& path,
               const VtkOptions& opts = {});

void write_ledger_csv(const EnergyLedger& ledger, std::ostream& out);
void write_ledger_csv(const EnergyLedger& ledger, const std::filesystem::path& path);

}  // namespace projflow
