#include "klmap/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace klmap {

void Kernel::validate() const {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("kernel variance must be positive");
  }
  if (family != KernelFamily::brownian && !(length_scale > 0.0)) {
    throw std::invalid_argument("kernel length_scale must be positive");
  }
}

double kernel_value(const Kernel& k, double s, double t) {
  switch (k.family) {
    case KernelFamily::brownian:
      return std::min(s, t);
    case KernelFamily::exponential:
      return k.variance * std::exp(-std::abs(s - t) / k.length_scale);
    case KernelFamily::squared_exponential: {
      const double d = s - t;
      return k.variance * std::exp(-d * d / (2.0 * k.length_scale * k.length_scale));
    }
  }
  return 0.0;
}

Eigen::MatrixXd kernel_matrix(const Kernel& k, const Grid& grid) {
  const int m = grid.size();
  Eigen::MatrixXd K(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double v = kernel_value(k, grid.nodes[i], grid.nodes[j]);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::brownian:
      return "brownian";
    case KernelFamily::exponential:
      return "exponential";
    case KernelFamily::squared_exponential:
      return "squared_exponential";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "brownian") return KernelFamily::brownian;
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "squared_exponential") return KernelFamily::squared_exponential;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

}  // namespace klmap
