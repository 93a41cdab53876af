#pragma once

#include <Eigen/Core>
#include <string>

#include "klmap/grid.hpp"

namespace klmap {

enum class KernelFamily { brownian, exponential, squared_exponential };

/// Covariance kernel defining the prior operator Q as a quadrature-weighted
/// integral operator. Families:
///   brownian:            k(s,t) = min(s,t)            (variance, length_scale unused)
///   exponential:         k(s,t) = sigma2 exp(-|s-t|/ell)
///   squared_exponential: k(s,t) = sigma2 exp(-(s-t)^2/(2 ell^2))
struct Kernel {
  KernelFamily family = KernelFamily::brownian;
  double variance = 1.0;      // sigma^2
  double length_scale = 1.0;  // ell

  void validate() const;
};

double kernel_value(const Kernel& k, double s, double t);

/// Dense kernel matrix K_ij = k(t_i, t_j); exactly symmetric by construction.
Eigen::MatrixXd kernel_matrix(const Kernel& k, const Grid& grid);

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

}  // namespace klmap
