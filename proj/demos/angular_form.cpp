// The angular form (x dy - y dx) / (x^2 + y^2) is closed but not exact: its
// integral around the origin is 2 pi, around any loop not enclosing it 0.

#include <cmath>
#include <iostream>

#include "skewforms/forms.hpp"

int main() {
  using namespace skewforms;
  const std::vector<std::string> vars{"x", "y"};
  ExteriorForm theta(vars, 1);
  theta.add_term({0}, parse("-y/(x^2 + y^2)", vars));
  theta.add_term({1}, parse("x/(x^2 + y^2)", vars));

  std::cout << "d(theta) = 0: " << std::boolalpha << is_closed(theta).closed << '\n';

  Loop circle;
  for (int k = 0; k < 64; ++k) {
    const double a = 2 * M_PI * k / 64;
    circle.vertices.push_back({std::cos(a), std::sin(a)});
  }
  std::cout << "around the origin: " << loop_integral(theta, circle) << '\n';

  Loop away{{{2.5, 2.5}, {3.5, 2.5}, {3.5, 3.5}, {2.5, 3.5}}, 64};
  std::cout << "away from it:      " << loop_integral(theta, away) << '\n';
}
