#include "sharpot/io.hpp"

#include <bit>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sharpot/errors.hpp"

namespace sharpot {

namespace {

using nlohmann::json;

constexpr const char* kModelMagic = "SHARPOT-MODEL-1";

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << content;
  if (!out) {
    throw IoError("write to " + path + " failed");
  }
}

double parse_number(const std::string& token, const std::string& where) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw IoError(where + ": cannot parse '" + token + "' as a number");
  }
  while (used < token.size() &&
         std::isspace(static_cast<unsigned char>(token[used]))) {
    ++used;
  }
  if (used != token.size()) {
    throw IoError(where + ": trailing characters in '" + token + "'");
  }
  return v;
}

std::vector<double> parse_csv_line(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::string token;
  std::istringstream stream(line);
  while (std::getline(stream, token, ',')) {
    out.push_back(parse_number(token, where));
  }
  if (out.empty()) {
    throw IoError(where + ": empty row");
  }
  return out;
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream stream(text);
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        blank = false;
        break;
      }
    }
    if (!blank) lines.push_back(line);
  }
  return lines;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

json parse_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw IoError(path + ": invalid JSON (" + e.what() + ")");
  }
  return j;
}

Eigen::MatrixXd matrix_from_rows(const std::vector<std::vector<double>>& rows,
                                 const std::string& where) {
  if (rows.empty()) {
    throw IoError(where + ": no rows");
  }
  const size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw IoError(where + ": ragged rows");
    }
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void append_doubles_le(std::string& out, const double* data, size_t count) {
  static_assert(sizeof(double) == 8);
  for (size_t k = 0; k < count; ++k) {
    std::uint64_t bits;
    std::memcpy(&bits, &data[k], 8);
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    char raw[8];
    std::memcpy(raw, &bits, 8);
    out.append(raw, 8);
  }
}

void read_doubles_le(const std::string& in, size_t& offset, double* data,
                     size_t count) {
  if (offset + 8 * count > in.size()) {
    throw IoError("model payload truncated");
  }
  for (size_t k = 0; k < count; ++k) {
    std::uint64_t bits;
    std::memcpy(&bits, in.data() + offset, 8);
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    std::memcpy(&data[k], &bits, 8);
    offset += 8;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Histogram read_histogram(const std::string& path) {
  try {
    if (has_suffix(path, ".json")) {
      const json j = parse_json(path);
      if (!j.contains("weights") || !j["weights"].is_array()) {
        throw IoError(path + ": expected a \"weights\" array");
      }
      return Histogram(to_vector(j["weights"].get<std::vector<double>>()));
    }
    const auto lines = nonempty_lines(read_file(path));
    if (lines.size() != 1) {
      throw IoError(path + ": a histogram is a single CSV line");
    }
    return Histogram(to_vector(parse_csv_line(lines[0], path)));
  } catch (const InvalidInput& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_histogram(const std::string& path, const Histogram& h) {
  std::string out;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(h[i]);
  }
  out += '\n';
  write_file(path, out);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
  if (has_suffix(path, ".json")) {
    const json j = parse_json(path);
    if (!j.contains("entries") || !j["entries"].is_array()) {
      throw IoError(path + ": expected an \"entries\" array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["entries"]) {
      rows.push_back(row.get<std::vector<double>>());
    }
    Eigen::MatrixXd m = matrix_from_rows(rows, path);
    if (j.contains("n") && j["n"].get<Eigen::Index>() != m.rows()) {
      throw IoError(path + ": field n does not match the entries");
    }
    if (j.contains("m") && j["m"].get<Eigen::Index>() != m.cols()) {
      throw IoError(path + ": field m does not match the entries");
    }
    return m;
  }
  std::vector<std::vector<double>> rows;
  for (const auto& line : nonempty_lines(read_file(path))) {
    rows.push_back(parse_csv_line(line, path));
  }
  return matrix_from_rows(rows, path);
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

std::vector<Histogram> read_histogram_rows(const std::string& path) {
  std::vector<Histogram> out;
  try {
    if (has_suffix(path, ".json")) {
      const json j = parse_json(path);
      if (!j.is_array()) {
        throw IoError(path + ": expected an array of weight arrays");
      }
      for (const auto& row : j) {
        out.emplace_back(to_vector(row.get<std::vector<double>>()));
      }
    } else {
      for (const auto& line : nonempty_lines(read_file(path))) {
        out.emplace_back(to_vector(parse_csv_line(line, path)));
      }
    }
  } catch (const InvalidInput& e) {
    throw IoError(path + ": " + e.what());
  }
  if (out.empty()) {
    throw IoError(path + ": no histograms");
  }
  return out;
}

void write_histogram_rows(const std::string& path,
                          const std::vector<Histogram>& rows) {
  std::string out;
  for (const auto& h : rows) {
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      if (i > 0) out += ',';
      out += format_double(h[i]);
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_model(const std::string& path, const WeightModel& model,
                const std::vector<InteriorHistogram>& outputs) {
  if (outputs.size() != static_cast<size_t>(model.count())) {
    throw InvalidInput("save_model: output count does not match the model");
  }
  const Eigen::Index l = model.count();
  const Eigen::Index d = model.inputs().cols();
  const Eigen::Index n = outputs.front().size();

  json header;
  header["sigma"] = model.sigma();
  header["gamma"] = model.gamma();
  header["count"] = l;
  header["input_dim"] = d;
  header["output_dim"] = n;

  std::string blob = std::string(kModelMagic) + "\n" + header.dump() + "\n";
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::VectorXd row = model.inputs().row(i);
    append_doubles_le(blob, row.data(), static_cast<size_t>(d));
  }
  for (const auto& y : outputs) {
    if (y.size() != n) {
      throw InvalidInput("save_model: outputs must share a common length");
    }
    append_doubles_le(blob, y.weights().data(), static_cast<size_t>(n));
  }
  for (const auto& y : outputs) {
    const double eps = y.epsilon();
    append_doubles_le(blob, &eps, 1);
  }
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::VectorXd row = model.factor().row(i);
    append_doubles_le(blob, row.data(), static_cast<size_t>(l));
  }
  write_file(path, blob);
}

StoredModel load_model(const std::string& path) {
  const std::string blob = read_file(path);
  const size_t magic_end = blob.find('\n');
  if (magic_end == std::string::npos || blob.substr(0, magic_end) != kModelMagic) {
    throw IoError(path + ": not a " + std::string(kModelMagic) + " file");
  }
  const size_t header_end = blob.find('\n', magic_end + 1);
  if (header_end == std::string::npos) {
    throw IoError(path + ": missing model header");
  }
  json header;
  try {
    header = json::parse(blob.substr(magic_end + 1, header_end - magic_end - 1));
  } catch (const json::exception& e) {
    throw IoError(path + ": invalid model header (" + e.what() + ")");
  }
  const double sigma = header.at("sigma").get<double>();
  const double gamma = header.at("gamma").get<double>();
  const Eigen::Index l = header.at("count").get<Eigen::Index>();
  const Eigen::Index d = header.at("input_dim").get<Eigen::Index>();
  const Eigen::Index n = header.at("output_dim").get<Eigen::Index>();
  if (l < 1 || d < 1 || n < 1) {
    throw IoError(path + ": corrupt model header");
  }

  size_t offset = header_end + 1;
  Eigen::MatrixXd inputs(l, d);
  for (Eigen::Index i = 0; i < l; ++i) {
    Eigen::VectorXd row(d);
    read_doubles_le(blob, offset, row.data(), static_cast<size_t>(d));
    inputs.row(i) = row;
  }
  Eigen::MatrixXd weights(l, n);
  for (Eigen::Index i = 0; i < l; ++i) {
    Eigen::VectorXd row(n);
    read_doubles_le(blob, offset, row.data(), static_cast<size_t>(n));
    weights.row(i) = row;
  }
  Eigen::VectorXd eps(l);
  read_doubles_le(blob, offset, eps.data(), static_cast<size_t>(l));
  Eigen::MatrixXd factor(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    Eigen::VectorXd row(l);
    read_doubles_le(blob, offset, row.data(), static_cast<size_t>(l));
    factor.row(i) = row;
  }
  if (offset != blob.size()) {
    throw IoError(path + ": trailing bytes after model payload");
  }

  StoredModel out{WeightModel::from_factor(sigma, gamma, std::move(inputs),
                                           std::move(factor)),
                  {}};
  out.outputs.reserve(static_cast<size_t>(l));
  try {
    for (Eigen::Index i = 0; i < l; ++i) {
      out.outputs.emplace_back(Histogram(weights.row(i).transpose()), eps[i]);
    }
  } catch (const InvalidInput& e) {
    throw IoError(path + ": corrupt stored outputs (" + std::string(e.what()) + ")");
  }
  return out;
}

}  // namespace sharpot
