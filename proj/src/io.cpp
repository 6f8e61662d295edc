#include "gkpqec/io.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace gkpqec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json matrix_to_json(const MatrixXcd& m) {
  json data = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      data.push_back(m(i, j).real());
      data.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"layout", "row-major"}, {"data", data}};
}

MatrixXcd matrix_from_json(const json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  const auto& data = j.at("data");
  if (int(data.size()) != 2 * rows * cols)
    throw ConfigError("matrix payload size does not match rows*cols");
  MatrixXcd m(rows, cols);
  size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int jj = 0; jj < cols; ++jj) {
      const double re = data[k++].get<double>();
      const double im = data[k++].get<double>();
      m(i, jj) = Complex(re, im);
    }
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace

void save_matrix_json(const fs::path& path, const MatrixXcd& m) {
  write_text(path, matrix_to_json(m).dump());
}

MatrixXcd load_matrix_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path.string());
  json j;
  in >> j;
  return matrix_from_json(j);
}

void save_matrix_binary(const fs::path& path, const MatrixXcd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  const char magic[8] = {'g', 'q', 'm', 'a', 't', '0', '0', '1'};
  out.write(magic, 8);
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      out.write(reinterpret_cast<const char*>(&re), 8);
      out.write(reinterpret_cast<const char*>(&im), 8);
    }
  if (!out) throw ConfigError("write failed: " + path.string());
}

MatrixXcd load_matrix_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::string(magic, 8) != "gqmat001") throw ConfigError("bad matrix file magic");
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (rows <= 0 || cols <= 0 || rows > (1 << 20) || cols > (1 << 20))
    throw ConfigError("bad matrix dimensions in " + path.string());
  MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), 8);
      in.read(reinterpret_cast<char*>(&im), 8);
      m(i, j) = Complex(re, im);
    }
  if (!in) throw ConfigError("truncated matrix file: " + path.string());
  return m;
}

std::string format_double(double v) {
  // json's double formatter emits the shortest representation that parses
  // back to the same bits; reuse it for CSV so the two formats agree.
  return json(v).dump();
}

void save_state_csv(const fs::path& path, const VectorXcd& psi) {
  std::string text = "n,re,im\n";
  for (int n = 0; n < psi.size(); ++n)
    text += std::to_string(n) + "," + format_double(psi(n).real()) + "," +
            format_double(psi(n).imag()) + "\n";
  write_text(path, text);
}

void save_state_json(const fs::path& path, const VectorXcd& psi) {
  json amp = json::array();
  for (int n = 0; n < psi.size(); ++n) {
    amp.push_back(psi(n).real());
    amp.push_back(psi(n).imag());
  }
  write_text(path, json{{"n_fock", psi.size()}, {"amplitudes", amp}}.dump());
}

VectorXcd load_state_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open: " + path.string());
  json j;
  in >> j;
  const int n = j.at("n_fock").get<int>();
  const auto& amp = j.at("amplitudes");
  if (int(amp.size()) != 2 * n) throw ConfigError("state payload size mismatch");
  VectorXcd psi(n);
  for (int k = 0; k < n; ++k) psi(k) = Complex(amp[2 * k].get<double>(), amp[2 * k + 1].get<double>());
  return psi;
}

void save_csv(const fs::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ConfigError("csv row width mismatch");
    for (size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
    text += "\n";
  }
  write_text(path, text);
}

fs::path make_run_directory(const fs::path& base, const std::string& label) {
  fs::create_directories(base);
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  std::string name = std::string(stamp) + (label.empty() ? "" : "-" + label);
  fs::path dir = base / name;
  for (int k = 2; fs::exists(dir); ++k) dir = base / (name + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir;
}

}  // namespace gkpqec
