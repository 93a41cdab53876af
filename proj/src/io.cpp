#include "klmap/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "klmap/errors.hpp"

namespace klmap {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  fs::rename(tmp, path);
}

std::string eigenvalues_csv(const KLBasis& basis) {
  std::ostringstream out;
  out << "k,lambda_k\n";
  for (int k = 0; k < basis.eigenvalues().size(); ++k) {
    out << (k + 1) << ',' << format_double(basis.eigenvalues()[k]) << '\n';
  }
  return out.str();
}

std::string eigenfunctions_csv(const KLBasis& basis) {
  std::ostringstream out;
  out << "t";
  for (int k = 0; k < basis.rank(); ++k) out << ",mode_" << (k + 1);
  out << '\n';
  const auto& grid = *basis.grid();
  for (int i = 0; i < grid.size(); ++i) {
    out << format_double(grid.nodes[i]);
    for (int k = 0; k < basis.rank(); ++k) {
      out << ',' << format_double(basis.eigenfunctions()(i, k));
    }
    out << '\n';
  }
  return out.str();
}

std::string solution_coefficients_csv(const Solution& sol) {
  std::ostringstream out;
  out << "k,xi_k\n";
  for (int k = 0; k < sol.coefficients.size(); ++k) {
    out << (k + 1) << ',' << format_double(sol.coefficients[k]) << '\n';
  }
  return out.str();
}

std::string solution_nodal_csv(const Solution& sol) {
  std::ostringstream out;
  out << "t,x,u\n";
  const auto& grid = *sol.x.grid();
  for (int i = 0; i < grid.size(); ++i) {
    out << format_double(grid.nodes[i]) << ',' << format_double(sol.x.values()[i]) << ','
        << format_double(sol.u.values()[i]) << '\n';
  }
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "iter,J,grad_norm,step\n";
  for (const TraceRow& row : trace) {
    out << row.iter << ',' << format_double(row.objective) << ','
        << format_double(row.grad_norm) << ',' << format_double(row.step) << '\n';
  }
  return out.str();
}

std::string dataset_csv(const ForwardModel& model, const Dataset& data) {
  std::ostringstream out;
  out << "j,s_j,y_j\n";
  for (int j = 0; j < data.y.size(); ++j) {
    const double s = j < model.dim() ? model.obs_locations[j] : static_cast<double>(j);
    out << (j + 1) << ',' << format_double(s) << ',' << format_double(data.y[j]) << '\n';
  }
  return out.str();
}

std::string nodal_csv(const GridFunction& f, const std::string& value_header) {
  std::ostringstream out;
  out << "t," << value_header << '\n';
  const auto& grid = *f.grid();
  for (int i = 0; i < grid.size(); ++i) {
    out << format_double(grid.nodes[i]) << ',' << format_double(f.values()[i]) << '\n';
  }
  return out.str();
}

std::string bound_reports_csv(const std::vector<BoundReport>& reports) {
  std::ostringstream out;
  out << "n,lambda_star_n,err_x,bound_x,thm1_ok,err_u,bound_u,cor1_ok,"
         "J_star,J_truncated,bound_gap,cor2_ok\n";
  for (const BoundReport& r : reports) {
    out << r.n << ',' << format_double(r.lambda_star_n) << ',' << format_double(r.err_x)
        << ',' << format_double(r.bound_x) << ',' << (r.thm1_ok ? 1 : 0) << ','
        << format_double(r.err_u) << ',' << format_double(r.bound_u) << ','
        << (r.cor1_ok ? 1 : 0) << ',' << format_double(r.J_star) << ','
        << format_double(r.J_truncated) << ',' << format_double(r.bound_gap) << ','
        << (r.cor2_ok ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path,
                                                    std::size_t expected_cols) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {  // skip the header row
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != expected_cols) {
      throw std::runtime_error(path.string() + ": expected " +
                               std::to_string(expected_cols) + " columns, got " +
                               std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

double parse_field(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

Eigen::VectorXd read_dataset_csv(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path, 3);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = parse_field(rows[i][2], path);
  }
  return y;
}

Eigen::VectorXd read_nodal_csv(const std::filesystem::path& path, int expected_size) {
  const auto rows = read_csv_rows(path, 2);
  if (static_cast<int>(rows.size()) != expected_size) {
    throw std::runtime_error(path.string() + ": expected " +
                             std::to_string(expected_size) + " rows, got " +
                             std::to_string(rows.size()));
  }
  Eigen::VectorXd v(expected_size);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = parse_field(rows[i][1], path);
  }
  return v;
}

}  // namespace klmap
