#pragma once

#include "projflow/discretization.hpp"
#include "projflow/mesh.hpp"

#include <memory>
#include <random>

namespace testing_util {

inline std::shared_ptr<const projflow::Mesh> square(int n) {
  return std::make_shared<const projflow::Mesh>(projflow::generate_structured_unit_square(n));
}

inline std::shared_ptr<const projflow::Discretization> disc(int n, int k, int l = 1) {
  return std::make_shared<const projflow::Discretization>(square(n), k, l);
}

inline projflow::Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  projflow::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace testing_util
