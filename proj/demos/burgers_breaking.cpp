// Characteristics of u_t + u u_x = 0 from u(0, x) = -x cross at t = 1. The
// Jacobian of the bundle changes sign there; each event carries the value of
// u transported along its characteristic.

#include <iostream>

#include "skewforms/evolution.hpp"

int main() {
  using namespace skewforms;
  const auto pde = PdeProblem::from_text({"t", "x"}, "u", {"pt", "px"}, "pt + u*px");

  std::vector<double> labels;
  for (int i = 0; i <= 20; ++i) labels.push_back(-1.0 + 0.1 * i);
  const auto bundle = profile_bundle(pde, -var("a"), "a", labels, 0, 1);
  const auto result = solve_bundle(pde, bundle, 1.1, 1e-3);

  for (const auto& e : jacobian_scan(result))
    std::cout << "label " << e.label << "  s* = " << e.s_star << "  u = " << e.conserved_u << '\n';
}
