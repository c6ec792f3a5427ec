#include "projflow/output.hpp"

#include "projflow/error.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

namespace projflow {
namespace {

constexpr Vec2 kRefVertex[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_vtk(const Snapshot& snap, const Discretization& disc, std::ostream& out, const VtkOptions& opts) {
  const Mesh& mesh = disc.mesh();
  const FESpace& V = disc.velocity();
  const FESpace& P = disc.pressure();
  const int nv = static_cast<int>(mesh.n_vertices());
  const int nt = static_cast<int>(mesh.n_triangles());

  std::vector<Vec2> ut(nv), base(nv), grad(nv);
  std::vector<double> p(nv, 0.0), weight(nv, 0.0);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const double a = mesh.area(t);
    for (int i = 0; i < 3; ++i) {
      const int v = tri[i];
      const Vec2 ref = kRefVertex[i];
      ut[v] = {V.value(as_span(snap.utilde), t, ref, 0), V.value(as_span(snap.utilde), t, ref, 1)};
      base[v] = {V.value(as_span(snap.u.base), t, ref, 0), V.value(as_span(snap.u.base), t, ref, 1)};
      p[v] = P.value(as_span(snap.p), t, ref);
      grad[v] = grad[v] + a * P.gradient(as_span(snap.u.phi), t, ref);
      weight[v] += a;
    }
  }

  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n";
  out << "projflow step " << snap.m << " t " << snap.t << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (const Vec2& x : mesh.vertices()) out << x.x << ' ' << x.y << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << "\n";
  for (const auto& tri : mesh.triangles()) out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << "\n";
  out << "CELL_TYPES " << nt << "\n";
  for (int t = 0; t < nt; ++t) out << "5\n";

  out << "POINT_DATA " << nv << "\n";
  out << "VECTORS u_tilde double\n";
  for (const Vec2& v : ut) out << v.x << ' ' << v.y << " 0\n";
  out << "VECTORS u_proj double\n";
  for (int v = 0; v < nv; ++v) {
    const Vec2 g = weight[v] > 0.0 ? (1.0 / weight[v]) * grad[v] : Vec2{};
    const Vec2 u = base[v] + g;
    out << u.x << ' ' << u.y << " 0\n";
  }
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (double v : p) out << v << "\n";

  if (opts.cellwise) {
    const Vec2 c{1.0 / 3.0, 1.0 / 3.0};
    out << "CELL_DATA " << nt << "\n";
    out << "VECTORS u_proj_cell double\n";
    for (int t = 0; t < nt; ++t) {
      const Vec2 u = Vec2{V.value(as_span(snap.u.base), t, c, 0), V.value(as_span(snap.u.base), t, c, 1)} +
                     P.gradient(as_span(snap.u.phi), t, c);
      out << u.x << ' ' << u.y << " 0\n";
    }
  }
}

void write_vtk(const Snapshot& snap, const Discretization& disc, const std::filesystem::path& path,
               const VtkOptions& opts) {
  auto out = open_out(path);
  write_vtk(snap, disc, out, opts);
}

void write_ledger_csv(const EnergyLedger& ledger, std::ostream& out) {
  out << kLedgerCsvHeader << "\n";
  out << std::setprecision(17);
  for (const LedgerRow& r : ledger) {
    out << r.step << ',' << r.t << ',' << r.norm_u_sq << ',' << r.norm_2u_minus_um1_sq << ',' << r.dt2_gradp_sq
        << ',' << r.E_h << ',' << r.split_err_sq << ',' << r.second_diff_sq << ',' << r.grad_utilde_sq << ','
        << r.f_dot_utilde << ',' << r.residual_identity << ',' << r.residual_pythagoras << '\n';
  }
}

void write_ledger_csv(const EnergyLedger& ledger, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_ledger_csv(ledger, out);
}

}  // namespace projflow
