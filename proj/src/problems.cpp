#include "polydg/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polydg {

namespace {

constexpr double kPi = std::numbers::pi;

NamedProblem parabolic_sine() {
  NamedProblem p;
  p.name = "parabolic-sine";
  p.space_time = true;
  auto& st = p.st;
  st.spatial_dim = 2;
  st.diffusion = [](const Vec&) {
    Tensor a{};
    a[0][0] = a[1][1] = 1.0;
    return a;
  };
  st.reaction = [](const Vec&) { return 1.0; };
  st.exact = [](const Vec& xt) { return std::sin(kPi * xt[0]) * std::sin(kPi * xt[1]) * (1.0 - xt[2]); };
  st.exact_gradient = [](const Vec& xt) {
    const double sx = std::sin(kPi * xt[0]), sy = std::sin(kPi * xt[1]);
    const double cx = std::cos(kPi * xt[0]), cy = std::cos(kPi * xt[1]);
    return Vec{kPi * cx * sy * (1.0 - xt[2]), kPi * sx * cy * (1.0 - xt[2]), -sx * sy, 0.0};
  };
  st.source = [](const Vec& xt) {
    const double s = std::sin(kPi * xt[0]) * std::sin(kPi * xt[1]);
    return -s + (2.0 * kPi * kPi + 1.0) * s * (1.0 - xt[2]);
  };
  st.dirichlet = st.exact;
  st.initial = [](const Vec& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
  return p;
}

NamedProblem advdiff3d() {
  NamedProblem p;
  p.name = "advdiff3d";
  auto& c = p.coeffs;
  c.dim = 3;
  c.diffusion = [](const Vec&) {
    Tensor a{};
    a[0][0] = a[1][1] = a[2][2] = 0.01;
    return a;
  };
  c.advection = [](const Vec& x) { return Vec{1.0 + x[0], 1.0 + x[1], 1.0 + x[2], 0.0}; };
  c.reaction = [](const Vec& x) { return 3.0 + x[0] * x[1] * x[2]; };
  c.exact = [](const Vec& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]); };
  c.exact_gradient = [](const Vec& x) {
    const double sx = std::sin(kPi * x[0]), sy = std::sin(kPi * x[1]), sz = std::sin(kPi * x[2]);
    const double cx = std::cos(kPi * x[0]), cy = std::cos(kPi * x[1]), cz = std::cos(kPi * x[2]);
    return Vec{kPi * cx * sy * sz, kPi * sx * cy * sz, kPi * sx * sy * cz, 0.0};
  };
  c.source = [](const Vec& x) {
    const double sx = std::sin(kPi * x[0]), sy = std::sin(kPi * x[1]), sz = std::sin(kPi * x[2]);
    const double cx = std::cos(kPi * x[0]), cy = std::cos(kPi * x[1]), cz = std::cos(kPi * x[2]);
    const double u = sx * sy * sz;
    const double advect =
        kPi * ((1.0 + x[0]) * cx * sy * sz + (1.0 + x[1]) * sx * cy * sz + (1.0 + x[2]) * sx * sy * cz);
    return 0.03 * kPi * kPi * u + advect + (3.0 + x[0] * x[1] * x[2]) * u;
  };
  c.dirichlet = c.exact;
  return p;
}

}  // namespace

NamedProblem named_problem(const std::string& name) {
  if (name == "parabolic-sine") return parabolic_sine();
  if (name == "advdiff3d") return advdiff3d();
  throw std::invalid_argument("unknown problem '" + name + "' (known: parabolic-sine, advdiff3d)");
}

std::vector<std::string> named_problem_names() { return {"parabolic-sine", "advdiff3d"}; }

}  // namespace polydg
