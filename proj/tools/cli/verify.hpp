#pragma once

#include <string>
#include <vector>

namespace sinebeta::cli {

struct Check {
  std::string name;
  double parameter;
  double value;
  double reference;
  double residual;
  double tolerance;  // residual must not exceed this; nan for report-only rows
  bool pass;
};

// Independent quadrature oracles for K and E.
double oracle_elliptic_k(double m);  // (1/2) int_R dz / sqrt(cosh^2 z - m)
double oracle_elliptic_e(double m);  // int_0^{pi/2} sqrt(1 - m sin^2 x) dx

// Every residual the special functions are held to, one row per point.
std::vector<Check> verify_specialfn();

}  // namespace sinebeta::cli
