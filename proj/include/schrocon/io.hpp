#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "schrocon/nls.hpp"
#include "schrocon/state.hpp"
#include "schrocon/window.hpp"

namespace schrocon {

using Json = nlohmann::ordered_json;

/// {dim, N, coeffs: [[re, im], ...]} in storage (row-major, ascending mode) order.
inline Json state_to_json(const FourierState& u) {
  Json c = Json::array();
  for (Eigen::Index i = 0; i < u.coeffs().size(); ++i) c.push_back({u.coeffs()[i].real(), u.coeffs()[i].imag()});
  return Json{{"dim", u.grid().dim()}, {"N", u.grid().modes_per_axis()}, {"coeffs", std::move(c)}};
}

inline FourierState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("N") || !j.contains("coeffs")) {
    throw ValidationError("state JSON needs dim, N and coeffs");
  }
  const GridSpec g = make_grid(j.at("dim").get<int>(), j.at("N").get<int>());
  const Json& c = j.at("coeffs");
  if (!c.is_array() || c.size() != g.size()) throw ValidationError("state JSON: coeffs length does not match grid");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i].is_array() || c[i].size() != 2) throw ValidationError("state JSON: each coefficient is [re, im]");
    v[static_cast<Eigen::Index>(i)] = Complex(c[i][0].get<double>(), c[i][1].get<double>());
  }
  return FourierState(g, std::move(v));
}

/// {kind, omega, transition_width, samples}.
inline Json window_to_json(const CutoffWindow& w) {
  Json omega = Json::array();
  for (const auto& iv : w.omega) omega.push_back({iv.a, iv.b});
  Json s = Json::array();
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) s.push_back(w.samples[i]);
  return Json{{"kind", to_string(w.kind)}, {"omega", std::move(omega)}, {"transition_width", w.transition_width},
              {"samples", std::move(s)}};
}

inline Json record_to_json(const DecayRecord& r) {
  Json j{{"samples", r.size()}};
  if (r.gamma_fit) j["gamma_fit"] = *r.gamma_fit;
  else j["gamma_fit"] = nullptr;
  return j;
}

/// Column-oriented table written as CSV with round-trip precision.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void write(std::ostream& os) const {
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    os << std::setprecision(17);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c][r];
      os << "\n";
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }
};

inline CsvTable record_table(const DecayRecord& r) {
  return CsvTable{{"t", "mass", "energy", "observed"}, {r.times, r.mass, r.energy, r.observed}};
}

}  // namespace schrocon
