#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "conformal/types.hpp"

namespace conformal {

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Strict numeric CSV with a required header row. Missing or non-numeric
/// cells are rejected with a row-numbered message.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// Doubles are written with round-trip precision so identical invocations
/// produce byte-identical files.
std::string format_csv(const std::vector<std::string>& header, const Eigen::MatrixXd& values);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

struct NamedDataset {
  MultiTargetDataset data;
  std::vector<std::string> covariate_names;
  std::vector<std::string> target_names;
};

/// Splits a table into covariates and the named response columns; the
/// remaining columns become covariates in input order.
NamedDataset split_targets(const CsvTable& table, const std::vector<std::string>& targets);

}  // namespace conformal
