#pragma once

#include "projflow/fe.hpp"
#include "projflow/sparse.hpp"
#include "projflow/types.hpp"

#include <functional>
#include <optional>

namespace projflow {

/// Exactness of the rule used for every operator touching U_h: the
/// polynomial degree of the convection integrand (3k-1), the mass (2k)
/// and the velocity-pressure couplings (k + l).
int assembly_degree(int degree_u, int degree_p);

/// Rule used for integrals of non-polynomial callables (loads, norms).
inline constexpr int kCallableQuadDegree = 6;

SparseMatrix assemble_mass(const FESpace& space);
SparseMatrix assemble_stiffness(const FESpace& space);

/// B(w) with v^T B(w) u = b(w, u, v), where
///   b(w, u, v) = int (w . grad) u . v + 1/2 int (div w) u . v.
/// `w` holds coefficients on `space_u`.
SparseMatrix assemble_convection(const FESpace& space_u, const Vector& w, int quad_degree = -1);

struct Couplings {
  SparseMatrix D;  // D[i][q] = (psi_q, div phi_i)
  SparseMatrix G;  // G[i][q] = (phi_i, grad psi_q)
};

Couplings assemble_couplings(const FESpace& space_u, const FESpace& space_p);

/// All time-independent operators of the scheme.
struct OperatorSet {
  SparseMatrix M_u;  // vector mass on U_h
  SparseMatrix A_u;  // vector stiffness on U_h
  SparseMatrix D;
  SparseMatrix G;
  SparseMatrix N_p;  // pressure stiffness
  SparseMatrix M_p;  // pressure mass
};

OperatorSet assemble_operators(const FESpace& space_u, const FESpace& space_p);

/// Loads (f_avg, phi_i) with f_avg the time average of f over
/// [t_lo, t_hi]. When `horizon` is set, f is taken as zero past it.
/// Time integration uses 3-point Gauss on the (clipped) window.
Vector assemble_load(const FESpace& space_u, const VectorFn& f, double t_lo, double t_hi,
                     std::optional<double> horizon = std::nullopt);

/// Loads (g, phi_i) for a time-independent field.
Vector assemble_load(const FESpace& space_u, const std::function<Vec2(double, double)>& g);

/// ||f_avg||^2_{L2} for the same time average as `assemble_load`.
double time_averaged_norm_sq(const Mesh& mesh, const VectorFn& f, double t_lo, double t_hi,
                             std::optional<double> horizon = std::nullopt);

/// L2-orthogonal projection onto U_h: solves M_u c = (g, phi_i).
Vector project_L2_onto_Uh(const FESpace& space_u, const std::function<Vec2(double, double)>& g,
                          const SparseMatrix& M_u);

/// High-order quadrature of ||g||^2 over the mesh.
double l2_norm_sq(const Mesh& mesh, const std::function<Vec2(double, double)>& g);

}  // namespace projflow
