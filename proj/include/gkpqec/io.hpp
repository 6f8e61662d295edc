#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gkpqec/types.hpp"

namespace gkpqec {

// Complex matrices as JSON {rows, cols, layout:"row-major", data:[re,im,...]}
// and as a little-endian binary blob with the same layout. Doubles survive the
// JSON round trip exactly (shortest-round-trip formatting).
void save_matrix_json(const std::filesystem::path& path, const MatrixXcd& m);
MatrixXcd load_matrix_json(const std::filesystem::path& path);
void save_matrix_binary(const std::filesystem::path& path, const MatrixXcd& m);
MatrixXcd load_matrix_binary(const std::filesystem::path& path);

// Fock amplitudes of a pure state: CSV columns n,re,im and a JSON twin.
void save_state_csv(const std::filesystem::path& path, const VectorXcd& psi);
void save_state_json(const std::filesystem::path& path, const VectorXcd& psi);
VectorXcd load_state_json(const std::filesystem::path& path);

// Plain CSV writer: header row then numeric rows.
void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

// Creates <base>/<UTC timestamp>-<label>/ (suffix -2, -3... on collision).
std::filesystem::path make_run_directory(const std::filesystem::path& base,
                                         const std::string& label);

}  // namespace gkpqec
