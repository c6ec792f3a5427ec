#pragma once

#include "projflow/assembly.hpp"
#include "projflow/fe.hpp"
#include "projflow/mesh.hpp"
#include "projflow/sparse.hpp"

#include <memory>

namespace projflow {

/// Element of Y_h = U_h + grad P_h, stored as the function base + grad(phi).
///
/// No basis of Y_h is ever formed; inner products are evaluated exactly
/// through the operators M_u, G and N_p.
struct YhElement {
  Vector base;  // U_h coefficients
  Vector phi;   // P_h coefficients

  static YhElement zero(int n_u, int n_p) { return {Vector::Zero(n_u), Vector::Zero(n_p)}; }
  static YhElement from_velocity(const Vector& u, int n_p) { return {u, Vector::Zero(n_p)}; }
};

inline YhElement operator+(const YhElement& a, const YhElement& b) { return {a.base + b.base, a.phi + b.phi}; }
inline YhElement operator-(const YhElement& a, const YhElement& b) { return {a.base - b.base, a.phi - b.phi}; }
inline YhElement operator*(double s, const YhElement& a) { return {s * a.base, s * a.phi}; }

/// Spaces and time-independent operators for one (mesh, k, l) choice.
class Discretization {
public:
  Discretization(std::shared_ptr<const Mesh> mesh, int degree_u, int degree_p);

  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
  const FESpace& velocity() const noexcept { return velocity_; }
  const FESpace& pressure() const noexcept { return pressure_; }
  const OperatorSet& ops() const noexcept { return ops_; }
  int n_u() const noexcept { return velocity_.n_dofs(); }
  int n_p() const noexcept { return pressure_.n_dofs(); }

  /// (y, phi_i) for every velocity basis function.
  Vector inner_with_velocity_basis(const YhElement& y) const;
  /// (y, grad psi_q) for every pressure basis function.
  Vector weak_divergence(const YhElement& y) const;
  double inner(const YhElement& a, const YhElement& b) const;
  double norm_sq(const YhElement& y) const { return inner(y, y); }

  double velocity_norm_sq(const Vector& u) const;
  double velocity_grad_norm_sq(const Vector& u) const;
  double pressure_grad_norm_sq(const Vector& p) const;
  /// ||grad psi_q|| per pressure basis function.
  const Vector& pressure_basis_grad_norms() const noexcept { return grad_psi_norms_; }
  /// Integral of a pressure field.
  double pressure_integral(const Vector& p) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  FESpace velocity_;
  FESpace pressure_;
  OperatorSet ops_;
  Vector grad_psi_norms_;
  Vector pressure_mass_ones_;
};

}  // namespace projflow
