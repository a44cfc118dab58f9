#pragma once

#include <cstddef>
#include <vector>

namespace skewforms {

/// Classical fourth-order Runge-Kutta stepper for autonomous systems
/// y' = f(y). `System` is callable as `system(const State& y, State& dydt)`.
class RungeKutta4 {
 public:
  using State = std::vector<double>;

  explicit RungeKutta4(std::size_t n) : tmp_(n), k1_(n), k2_(n), k3_(n), k4_(n) {}

  template <typename System>
  void step(System&& system, State& y, double h) {
    const std::size_t n = y.size();
    const double h2 = h / 2;
    const double h6 = h / 6;

    system(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h2 * k1_[i];

    system(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h2 * k2_[i];

    system(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];

    system(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += h6 * (k1_[i] + 2 * k2_[i] + 2 * k3_[i] + k4_[i]);
  }

 private:
  State tmp_, k1_, k2_, k3_, k4_;
};

}  // namespace skewforms
