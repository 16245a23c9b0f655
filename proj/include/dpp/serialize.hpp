#ifndef DPP_SERIALIZE_HPP
#define DPP_SERIALIZE_HPP

#include <json.hpp>

#include "dpp/verify.hpp"

namespace dpp {

using Json = nlohmann::json;

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// flat row-major list with explicit shape checked by the caller
inline Matrix matrix_from_flat(const Json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ValidationError(std::string(what) + ": expected " + std::to_string(rows * cols) +
                          " numbers");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const Json& cell = j[static_cast<size_t>(i) * cols + k];
      if (!cell.is_number()) throw ValidationError(std::string(what) + ": non-numeric entry");
      m(i, k) = cell.get<double>();
    }
  return m;
}

inline Json matrix_to_flat(const Matrix& m) {
  Json flat = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return flat;
}

inline Json nnp_to_json(const NNP& nnp) {
  Json j;
  j["n"] = nnp.n;
  j["p"] = nnp.p;
  j["L"] = matrix_to_flat(nnp.L.mat());
  j["V"] = matrix_to_flat(nnp.V);
  return j;
}

inline NNP nnp_from_json(const Json& j) {
  if (!j.contains("n") || !j.contains("p") || !j.contains("L") || !j.contains("V"))
    throw ValidationError("nnp json: need fields n, p, L, V");
  int n = j.at("n").get<int>();
  int p = j.at("p").get<int>();
  if (n <= 0 || p < 0 || p > n) throw ValidationError("nnp json: bad dimensions");
  Matrix l = matrix_from_flat(j.at("L"), n, n, "nnp json L");
  Matrix v = matrix_from_flat(j.at("V"), n, p, "nnp json V");
  return make_nnp(SymMatrix(l), v);
}

inline Json monomials_to_json(const MonomialBasis& basis) {
  Json list = Json::array();
  for (const auto& e : basis.exponents) list.push_back(e);
  return list;
}

inline Json descriptor_to_json(const ProcessDescriptor& desc) {
  Json j;
  j["tag"] = tag_name(desc.tag);
  j["n"] = desc.n;
  if (desc.m) j["m"] = *desc.m;
  if (desc.alpha) j["alpha"] = *desc.alpha;
  if (!desc.kernel_name.empty()) j["kernel"] = desc.kernel_name;
  if (desc.basis.size() > 0) j["basis"] = matrix_to_json(desc.basis);
  if (desc.nnp) j["nnp"] = nnp_to_json(*desc.nnp);
  if (desc.monomials) {
    j["monomial_order"] = "graded-lex";
    j["monomials"] = monomials_to_json(*desc.monomials);
  }
  return j;
}

// one point per row, whitespace-separated coordinates; '#' comments
inline Matrix read_points(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::vector<double> coords;
    double x;
    while (ls >> x) coords.push_back(x);
    if (!ls.eof()) throw ValidationError("points file: non-numeric token");
    if (coords.empty()) continue;
    if (!rows.empty() && coords.size() != rows.front().size())
      throw ValidationError("points file: inconsistent dimension");
    rows.push_back(std::move(coords));
  }
  if (rows.empty()) throw ValidationError("points file: no points");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < rows.front().size(); ++k) m(i, k) = rows[i][k];
  return m;
}

inline Matrix points_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("points: expected array of points");
  size_t d = 0;
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    std::vector<double> coords;
    if (row.is_number()) {
      coords.push_back(row.get<double>());
    } else if (row.is_array()) {
      for (const auto& c : row) {
        if (!c.is_number()) throw ValidationError("points: non-numeric coordinate");
        coords.push_back(c.get<double>());
      }
    } else {
      throw ValidationError("points: each point must be a number or array");
    }
    if (coords.empty()) throw ValidationError("points: empty point");
    if (d == 0) d = coords.size();
    if (coords.size() != d) throw ValidationError("points: inconsistent dimension");
    rows.push_back(std::move(coords));
  }
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(d));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t k = 0; k < d; ++k) m(i, k) = rows[i][k];
  return m;
}

inline std::string csv_indices(const Sample& x) {
  std::string out;
  for (size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(x[i]);
  }
  return out;
}

}  // namespace dpp

#endif
