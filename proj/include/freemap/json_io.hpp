#pragma once

// JSON formats:
//   matrix  {"rows": n, "cols": m, "re": [[...]], "im": [[...]]}
//   tuple   [matrix, ...]
//   pencil  {"d": d, "g": g, "A": [matrix, ...]}
//   domain  {"kind": "eps", "g": g, "eps": e}
//         | {"kind": "pencil", "pencil": pencil}
//         | {"kind": "poly", "g": g, "q": [["expr", ...], ...]}
// plus serializers for the probe reports.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "freemap/calc.hpp"
#include "freemap/domains.hpp"
#include "freemap/elliptic.hpp"
#include "freemap/linalg.hpp"
#include "freemap/parser.hpp"

namespace freemap {

using json = nlohmann::ordered_json;

/// Malformed input file or JSON document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const json& re = j.at("re");
    if (re.size() != rows) throw FormatError("matrix: 're' has wrong row count");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (re[r].size() != cols) throw FormatError("matrix: 're' has wrong column count");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = re[r][c].get<double>();
    }
    if (j.contains("im")) {
      const json& im = j.at("im");
      if (im.size() != rows) throw FormatError("matrix: 'im' has wrong row count");
      for (std::size_t r = 0; r < rows; ++r) {
        if (im[r].size() != cols) throw FormatError("matrix: 'im' has wrong column count");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) += cplx{0.0, im[r][c].get<double>()};
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("matrix: ") + e.what());
  }
}

inline json to_json(const MatrixTuple& x) {
  json arr = json::array();
  for (const auto& m : x) arr.push_back(to_json(m));
  return arr;
}

inline MatrixTuple tuple_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("tuple: expected a JSON array of matrices");
  std::vector<Matrix> comps;
  for (const auto& m : j) comps.push_back(matrix_from_json(m));
  try {
    return MatrixTuple(std::move(comps));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("tuple: ") + e.what());
  }
}

inline json to_json(const Pencil& p) {
  json a = json::array();
  for (const auto& m : p.coeffs()) a.push_back(to_json(m));
  return json{{"d", p.d()}, {"g", p.g()}, {"A", std::move(a)}};
}

inline Pencil pencil_from_json(const json& j) {
  try {
    std::vector<Matrix> coeffs;
    for (const auto& m : j.at("A")) coeffs.push_back(matrix_from_json(m));
    Pencil p(std::move(coeffs));
    if (j.contains("d") && j.at("d").get<std::size_t>() != p.d()) throw FormatError("pencil: 'd' disagrees with A");
    if (j.contains("g") && j.at("g").get<std::size_t>() != p.g()) throw FormatError("pencil: 'g' disagrees with A");
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("pencil: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("pencil: ") + e.what());
  }
}

inline json to_json(const NCDomain& dom) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EpsNeighborhood>) return json{{"kind", "eps"}, {"g", v.g}, {"eps", v.eps}};
        else if constexpr (std::is_same_v<T, Pencil>) return json{{"kind", "pencil"}, {"pencil", to_json(v)}};
        else {
          json q = json::array();
          for (const auto& row : v.q) {
            json r = json::array();
            for (const auto& e : row) r.push_back(to_string(e));
            q.push_back(std::move(r));
          }
          return json{{"kind", "poly"}, {"g", v.g}, {"q", std::move(q)}};
        }
      },
      dom.variant());
}

/// Expression strings inside a "poly" domain raise ParseError.
inline NCDomain domain_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "eps") return NCDomain::eps_neighborhood(j.at("g").get<std::size_t>(), j.at("eps").get<double>());
    if (kind == "pencil") return NCDomain::pencil(pencil_from_json(j.at("pencil")));
    if (kind == "poly") {
      const auto g = j.at("g").get<std::size_t>();
      std::vector<std::vector<Expr>> q;
      for (const auto& row : j.at("q")) {
        std::vector<Expr> r;
        for (const auto& s : row) r.push_back(parse(s.get<std::string>(), g));
        q.push_back(std::move(r));
      }
      return NCDomain::polynomial(g, std::move(q));
    }
    throw FormatError("domain: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw FormatError(std::string("domain: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("domain: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

/// FNV-1a over the compact serialization; identifies report inputs.
inline std::string content_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

inline json report_json(const std::string& op, const json& inputs, const std::string& verdict, double max_deviation,
                        json samples) {
  json hashes = json::object();
  for (const auto& [k, v] : inputs.items()) hashes[k] = content_hash(v);
  return json{{"op", op},
              {"inputs", std::move(hashes)},
              {"verdict", verdict},
              {"max_deviation", max_deviation},
              {"samples", std::move(samples)}};
}

inline json to_json(const BlockFormulaReport& r) {
  return json{{"component_deviation", r.component_deviation},
              {"max_deviation", r.max_deviation},
              {"scale", r.scale},
              {"tolerance", r.tolerance},
              {"passed", r.passed()}};
}

inline json to_json(const InjectivityReport& r) {
  return json{{"verdict", to_string(r.verdict)},
              {"image_defect", r.image_defect},
              {"point_defect", r.point_defect},
              {"t_max", r.t_max},
              {"t_grid", r.t_grid},
              {"sweep_deviation", r.sweep_deviation},
              {"tolerance", r.tolerance}};
}

inline json to_json(const RayResult& r) {
  json j{{"index", r.index}, {"r_star", r.r_star}, {"unbounded", r.unbounded}};
  json pairs = json::array();
  for (std::size_t k = 0; k < r.scales.size(); ++k)
    pairs.push_back(json{{"r", r.scales[k]}, {"domain_gap", r.domain_gaps[k]}, {"codomain_gap", r.codomain_gaps[k]}});
  j["steps"] = std::move(pairs);
  if (r.error.empty()) j["terminal_codomain_gap"] = r.terminal_codomain_gap;
  else j["error"] = r.error;
  return j;
}

inline json to_json(const PropernessReport& r) {
  json rays = json::array();
  for (const auto& ray : r.rays) rays.push_back(to_json(ray));
  return json{{"max_terminal_gap", r.max_terminal_gap}, {"failed_rays", r.failed_rays}, {"rays", std::move(rays)}};
}

inline json to_json(const AmpliationReport& r) {
  json base = json::array(), amp = json::array();
  for (const auto& v : r.base_spectrum) base.push_back(complex_json(v));
  for (const auto& v : r.ampliated_spectrum) amp.push_back(complex_json(v));
  return json{{"n", r.n},
              {"base_spectrum", std::move(base)},
              {"ampliated_spectrum", std::move(amp)},
              {"max_mismatch", r.max_mismatch},
              {"tolerance", r.tolerance},
              {"passed", r.passed()}};
}

inline json to_json(const WitnessReport& r) {
  json coeffs = json::array();
  for (const auto& c : r.coeffs) coeffs.push_back(complex_json(c));
  return json{{"r0", r.r0},
              {"c3_over_c1", r.c3_over_c1},
              {"c5_over_c1", r.c5_over_c1},
              {"min_eig", r.min_eig},
              {"coeffs", std::move(coeffs)},
              {"tolerances",
               {{"r0_bisection", r.r0_tolerance},
                {"coeff_radius", r.coeff_radius},
                {"r0", EllipseReference::r0_tol},
                {"min_eig", EllipseReference::min_eig_tol},
                {"c3_over_c1", EllipseReference::c3_tol},
                {"c5_over_c1", EllipseReference::c5_tol}}}};
}

}  // namespace freemap
