#include "conformal/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conformal {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::stringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || trim(line).empty())
    throw std::invalid_argument("csv: missing header row");
  CsvTable table;
  for (const auto& cell : split_line(line)) table.header.push_back(trim(cell));
  const std::size_t cols = table.header.size();

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != cols) {
      std::ostringstream msg;
      msg << "csv row " << line_no << ": expected " << cols << " columns, got " << cells.size();
      throw std::invalid_argument(msg.str());
    }
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cell = trim(cells[c]);
      std::size_t used = 0;
      double value = 0.0;
      bool ok = !cell.empty();
      if (ok) {
        try {
          value = std::stod(cell, &used);
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || used != cell.size() || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "csv row " << line_no << ": column '" << table.header[c]
            << "' has missing or non-numeric value '" << cell << "'";
        throw std::invalid_argument(msg.str());
      }
      row[c] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("csv: no data rows");

  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw std::invalid_argument("dimension mismatch: header width != value columns");
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << '\n';
  char buf[40];
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", values(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);
  out << format_csv(header, values);
}

NamedDataset split_targets(const CsvTable& table, const std::vector<std::string>& targets) {
  if (targets.empty()) throw std::invalid_argument("no target columns named");
  std::vector<Eigen::Index> target_cols;
  for (const auto& t : targets) {
    const auto it = std::find(table.header.begin(), table.header.end(), t);
    if (it == table.header.end())
      throw std::invalid_argument("target column not found: " + t);
    target_cols.push_back(static_cast<Eigen::Index>(it - table.header.begin()));
  }
  NamedDataset out;
  out.target_names = targets;
  std::vector<Eigen::Index> covariate_cols;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(table.header.size()); ++c) {
    if (std::find(target_cols.begin(), target_cols.end(), c) == target_cols.end()) {
      covariate_cols.push_back(c);
      out.covariate_names.push_back(table.header[static_cast<std::size_t>(c)]);
    }
  }
  if (covariate_cols.empty()) throw std::invalid_argument("no covariate columns left");

  Eigen::MatrixXd x(table.values.rows(), static_cast<Eigen::Index>(covariate_cols.size()));
  Eigen::MatrixXd y(table.values.rows(), static_cast<Eigen::Index>(target_cols.size()));
  for (std::size_t c = 0; c < covariate_cols.size(); ++c)
    x.col(static_cast<Eigen::Index>(c)) = table.values.col(covariate_cols[c]);
  for (std::size_t c = 0; c < target_cols.size(); ++c)
    y.col(static_cast<Eigen::Index>(c)) = table.values.col(target_cols[c]);
  out.data = MultiTargetDataset(std::move(x), std::move(y));
  return out;
}

}  // namespace conformal
