#include "projflow/discretization.hpp"

namespace projflow {

Discretization::Discretization(std::shared_ptr<const Mesh> mesh, int degree_u, int degree_p)
    : mesh_(std::move(mesh)),
      velocity_(mesh_, degree_u, 2, /*homogeneous_dirichlet=*/true, /*zero_mean=*/false),
      pressure_(mesh_, degree_p, 1, /*homogeneous_dirichlet=*/false, /*zero_mean=*/true),
      ops_(assemble_operators(velocity_, pressure_)) {
  grad_psi_norms_ = ops_.N_p.diagonal().cwiseSqrt();
  pressure_mass_ones_ = ops_.M_p.multiply(Vector::Ones(n_p()));
}

Vector Discretization::inner_with_velocity_basis(const YhElement& y) const {
  return ops_.M_u.multiply(y.base) + ops_.G.multiply(y.phi);
}

Vector Discretization::weak_divergence(const YhElement& y) const {
  return ops_.G.transpose_multiply(y.base) + ops_.N_p.multiply(y.phi);
}

double Discretization::inner(const YhElement& a, const YhElement& b) const {
  // (a.base + grad a.phi, b.base + grad b.phi)
  return a.base.dot(ops_.M_u.multiply(b.base)) + a.base.dot(ops_.G.multiply(b.phi)) +
         b.base.dot(ops_.G.multiply(a.phi)) + a.phi.dot(ops_.N_p.multiply(b.phi));
}

double Discretization::velocity_norm_sq(const Vector& u) const { return u.dot(ops_.M_u.multiply(u)); }

double Discretization::velocity_grad_norm_sq(const Vector& u) const { return u.dot(ops_.A_u.multiply(u)); }

double Discretization::pressure_grad_norm_sq(const Vector& p) const { return p.dot(ops_.N_p.multiply(p)); }

double Discretization::pressure_integral(const Vector& p) const { return pressure_mass_ones_.dot(p); }

}  // namespace projflow
