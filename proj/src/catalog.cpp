#include "fracmc/catalog.hpp"

#include <cmath>

namespace fracmc::catalog {

Field power_field(double kappa, double eta) {
  return [kappa, eta](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return kappa * std::pow(std::sqrt(s), eta);
  };
}

Field constant_field(double value) {
  return [value](std::span<const double>) { return value; };
}

namespace {

ProblemSpec base(double abar) {
  ProblemSpec p;
  p.sub = {0.5};
  p.stable = {1.5, 1.0, 1};
  p.win = {0.0, abar};
  p.x = {0.0};
  return p;
}

}  // namespace

ProblemSpec unbiased_sqrt(double abar) {
  ProblemSpec p = base(abar);
  p.phi = power_field(1.0, 0.5);
  p.phi_form = PowerForm{1.0, 0.5};
  p.phi_growth = 0.5;
  return p;
}

ProblemSpec unbiased_two_fifths(double abar) {
  ProblemSpec p = base(abar);
  p.phi = power_field(1.0, 0.4);
  p.phi_form = PowerForm{1.0, 0.4};
  p.phi_growth = 0.4;
  return p;
}

ProblemSpec forced_sqrt(double abar) {
  ProblemSpec p = unbiased_sqrt(abar);
  p.g = power_field(1.0, 0.5);
  p.g_form = PowerForm{1.0, 0.5};
  p.gamma = 0.5;
  p.lip = 1.0;
  return p;
}

ProblemSpec forcing_only(double abar) {
  ProblemSpec p = base(abar);
  p.phi = constant_field(0.0);
  p.phi_form = PowerForm{0.0, 0.0};
  p.phi_growth = 0.0;
  p.g = power_field(1.0, 0.5);
  p.g_form = PowerForm{1.0, 0.5};
  p.gamma = 0.5;
  p.lip = 1.0;
  return p;
}

ProblemSpec ci_study(double abar) {
  ProblemSpec p = base(abar);
  p.phi = constant_field(1.0);
  p.phi_form = PowerForm{1.0, 0.0};
  p.phi_growth = 0.0;
  p.g = power_field(1.0, 0.5);
  p.g_form = PowerForm{1.0, 0.5};
  p.gamma = 0.5;
  p.lip = 1.0;
  return p;
}

}  // namespace fracmc::catalog
