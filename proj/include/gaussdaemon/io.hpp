#pragma once

// Plain-text state/model files and CSV tables.
//
// State file (blank lines and '#' comments ignored):
//   n
//   mean_1 ... mean_2n
//   2n rows of the covariance matrix
//
// Model file: sections [H_S], [C], [sigma_in], [mean_in] holding
// whitespace-separated matrix rows, and one [measurement] section per
// environment mode with `key = value` lines (nu_m, theta_m, z_m, homodyne).

#include "gaussdaemon/general_dyne.hpp"
#include "gaussdaemon/monitored.hpp"
#include "gaussdaemon/symplectic.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace gaussdaemon {

GaussianState read_state(std::istream& in, const std::string& source = "<input>");
GaussianState load_state(const std::string& path);
void write_state(std::ostream& out, const GaussianState& state);

struct ModelFile {
  DiffusiveModel model;
  std::vector<GeneralDyneSetting> settings;
};

ModelFile read_model(std::istream& in, const std::string& source = "<input>");
ModelFile load_model(const std::string& path);

/// 12 significant digits, shortest form.
std::string format_number(double x);

struct Table {
  std::vector<std::string> comments;  // emitted as "# ..." lines
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void write_csv(std::ostream& out) const;
};

}  // namespace gaussdaemon
