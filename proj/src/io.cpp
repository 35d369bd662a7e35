#include "gaussdaemon/io.hpp"

#include "gaussdaemon/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace gaussdaemon {

namespace {

struct Line {
  std::size_t number;
  std::string text;
};

std::string strip(std::string s) {
  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<Line> content_lines(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string s = strip(raw);
    if (!s.empty()) lines.push_back({number, std::move(s)});
  }
  return lines;
}

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << line << ": " << what;
  throw Error(ErrorKind::Parse, os.str());
}

double parse_double(const std::string& token, const std::string& source, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) parse_error(source, line, "not a number: '" + token + "'");
  return value;
}

std::vector<double> parse_row(const Line& line, const std::string& source) {
  std::istringstream ss(line.text);
  std::vector<double> row;
  std::string token;
  while (ss >> token) row.push_back(parse_double(token, source, line.number));
  return row;
}

Matrix rows_to_matrix(const std::vector<Line>& lines, const std::string& source, const std::string& name) {
  std::vector<std::vector<double>> rows;
  for (const Line& l : lines) {
    rows.push_back(parse_row(l, source));
    if (rows.back().size() != rows.front().size()) {
      parse_error(source, l.number, "ragged row in [" + name + "]");
    }
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

bool parse_bool(const std::string& v, const std::string& source, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  parse_error(source, line, "expected a boolean, got '" + v + "'");
}

GeneralDyneSetting parse_measurement(const std::vector<Line>& lines, const std::string& source) {
  GeneralDyneSetting s;
  for (const Line& l : lines) {
    const auto eq = l.text.find('=');
    if (eq == std::string::npos) parse_error(source, l.number, "expected key = value");
    const std::string key = strip(l.text.substr(0, eq));
    const std::string value = strip(l.text.substr(eq + 1));
    if (key == "nu_m") {
      s.nu_m = parse_double(value, source, l.number);
    } else if (key == "theta_m") {
      s.theta_m = parse_double(value, source, l.number);
    } else if (key == "z_m") {
      s.z_m = parse_double(value, source, l.number);
    } else if (key == "homodyne") {
      s.homodyne = parse_bool(value, source, l.number);
    } else {
      parse_error(source, l.number, "unknown measurement key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

}  // namespace

GaussianState read_state(std::istream& in, const std::string& source) {
  const std::vector<Line> lines = content_lines(in);
  if (lines.empty()) parse_error(source, 1, "empty state file");
  const std::vector<double> head = parse_row(lines[0], source);
  if (head.size() != 1 || head[0] < 1.0 || head[0] != static_cast<double>(static_cast<std::size_t>(head[0]))) {
    parse_error(source, lines[0].number, "first line must be the number of modes");
  }
  const auto n = static_cast<std::size_t>(head[0]);
  const std::size_t dim = 2 * n;
  if (lines.size() != 2 + dim) {
    const std::size_t at = lines.size() > 2 + dim ? lines[2 + dim].number : lines.back().number;
    std::ostringstream os;
    os << "expected a mean line and " << dim << " covariance rows, found " << lines.size() - 1 << " lines";
    parse_error(source, at, os.str());
  }
  const std::vector<double> mean = parse_row(lines[1], source);
  if (mean.size() != dim) parse_error(source, lines[1].number, "mean must have 2n entries");
  Matrix cm(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::vector<double> row = parse_row(lines[2 + i], source);
    if (row.size() != dim) parse_error(source, lines[2 + i].number, "covariance row must have 2n entries");
    for (std::size_t j = 0; j < dim; ++j) cm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return validate_state(Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(dim)), cm);
}

GaussianState load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open state file '" + path + "'");
  return read_state(in, path);
}

void write_state(std::ostream& out, const GaussianState& state) {
  out << state.modes() << "\n";
  const Vector& r = state.mean();
  for (Eigen::Index i = 0; i < r.size(); ++i) out << (i ? " " : "") << format_number(r(i));
  out << "\n";
  const Matrix& s = state.covariance();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) out << (j ? " " : "") << format_number(s(i, j));
    out << "\n";
  }
}

ModelFile read_model(std::istream& in, const std::string& source) {
  const std::vector<Line> lines = content_lines(in);
  std::map<std::string, std::vector<Line>> sections;
  std::vector<std::vector<Line>> measurements;
  std::vector<Line>* current = nullptr;
  for (const Line& l : lines) {
    if (l.text.front() == '[') {
      if (l.text.back() != ']') parse_error(source, l.number, "malformed section header");
      const std::string name = l.text.substr(1, l.text.size() - 2);
      if (name == "measurement") {
        measurements.emplace_back();
        current = &measurements.back();
      } else if (name == "H_S" || name == "C" || name == "sigma_in" || name == "mean_in") {
        if (sections.count(name)) parse_error(source, l.number, "duplicate section [" + name + "]");
        current = &sections[name];
      } else {
        parse_error(source, l.number, "unknown section [" + name + "]");
      }
      continue;
    }
    if (!current) parse_error(source, l.number, "content before the first section");
    current->push_back(l);
  }
  if (!sections.count("H_S")) parse_error(source, lines.empty() ? 1 : lines.back().number, "missing [H_S]");

  ModelFile mf;
  mf.model.h_s = rows_to_matrix(sections["H_S"], source, "H_S");
  mf.model.c = rows_to_matrix(sections["C"], source, "C");
  mf.model.sigma_in = rows_to_matrix(sections["sigma_in"], source, "sigma_in");
  const Matrix mean = rows_to_matrix(sections["mean_in"], source, "mean_in");
  if (mean.size() == 0) {
    mf.model.mean_in = Vector::Zero(mf.model.sigma_in.rows());
  } else {
    mf.model.mean_in = Eigen::Map<const Vector>(Matrix(mean.transpose()).data(), mean.size());
  }
  if (mf.model.c.size() == 0) mf.model.c = Matrix::Zero(mf.model.h_s.rows(), mf.model.sigma_in.rows());
  for (const auto& m : measurements) mf.settings.push_back(parse_measurement(m, source));
  mf.model.validate();
  return mf;
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open model file '" + path + "'");
  return read_model(in, path);
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void Table::write_csv(std::ostream& out) const {
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << "\n";
  }
}

}  // namespace gaussdaemon
