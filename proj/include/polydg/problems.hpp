#pragma once

#include <string>
#include <vector>

#include "polydg/pde.hpp"

namespace polydg {

/// Built-in manufactured-solution problems.
///
///   parabolic-sine  u = sin(pi x) sin(pi y) (1 - t), a = I, w = 0, c = 1,
///                   on (0,1)^2 x (0,1); space-time.
///   advdiff3d       u = sin(pi x) sin(pi y) sin(pi z), A = 0.01 I,
///                   b = (1+x, 1+y, 1+z), c = 3 + xyz, on (0,1)^3.
///
/// Source terms are differentiated by hand. Both use homogeneous Dirichlet
/// data on the whole (lateral) boundary.
struct NamedProblem {
  std::string name;
  bool space_time = false;
  PdeCoefficients coeffs;     // stationary problems
  SpaceTimeCoefficients st;   // space-time problems
  DirichletPredicate predicate;
};

NamedProblem named_problem(const std::string& name);
std::vector<std::string> named_problem_names();

}  // namespace polydg
