#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "klmap/bounds.hpp"
#include "klmap/forward.hpp"
#include "klmap/kl_basis.hpp"
#include "klmap/optimize.hpp"

namespace klmap {

/// Round-trippable decimal rendering ("%.17g", '.' decimal point).
std::string format_double(double v);

/// Write content to path via a temp file + rename, so interrupted runs never
/// leave partial files. Creates parent directories.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string eigenvalues_csv(const KLBasis& basis);
std::string eigenfunctions_csv(const KLBasis& basis);

std::string solution_coefficients_csv(const Solution& sol);
std::string solution_nodal_csv(const Solution& sol);
std::string trace_csv(const std::vector<TraceRow>& trace);

std::string dataset_csv(const ForwardModel& model, const Dataset& data);
std::string nodal_csv(const GridFunction& f, const std::string& value_header);

/// Exact column contract:
/// n, lambda_star_n, err_x, bound_x, thm1_ok, err_u, bound_u, cor1_ok,
/// J_star, J_truncated, bound_gap, cor2_ok. Booleans as 0/1.
std::string bound_reports_csv(const std::vector<BoundReport>& reports);

/// Read observations from a dataset CSV (columns j, s_j, y_j).
Eigen::VectorXd read_dataset_csv(const std::filesystem::path& path);

/// Read nodal values from a two-column CSV (t, value); validates node count.
Eigen::VectorXd read_nodal_csv(const std::filesystem::path& path, int expected_size);

}  // namespace klmap
