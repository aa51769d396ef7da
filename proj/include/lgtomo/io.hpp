// Copyright 2026 The lgtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats: run configuration (JSON), intensity images (CSV), density
// matrices and POVMs (JSON), completeness reports (JSON) and figure tables
// (CSV). Writers are deterministic: identical inputs give identical bytes.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgtomo/completeness.hpp"
#include "lgtomo/induced_povm.hpp"
#include "lgtomo/modes.hpp"
#include "lgtomo/operator_basis.hpp"
#include "lgtomo/reconstruction.hpp"
#include "lgtomo/simulation.hpp"

namespace lgtomo::io {

using nlohmann::json;

/// Malformed file or configuration.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- config

struct GridSpec {
  int nx = 11;
  int ny = 11;
  double half_width = 3.5;

  PixelGrid grid() const { return PixelGrid(nx, ny, half_width); }
};

struct RunConfig {
  TruncationSpec subspace{0, 0, 0, 4};
  GridSpec grid;
  std::optional<StateSpec> state;
  std::optional<std::uint64_t> photons;
  std::optional<std::uint64_t> seed;
  double rel_tol = kDefaultRankTolerance;
  MlOptions ml;
  int ell_shift = 0;
  ClosurePolicy closure = ClosurePolicy::automatic;

  Subspace reconstruction_subspace() const { return build_subspace(subspace); }

  /// Pixel POVM of the configured detector, including the ell-shift pre-transformation.
  PovmSet povm() const { return induced_povm_shifted(grid.grid(), reconstruction_subspace(), ell_shift, closure); }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw FormatError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return it->get<T>();
}

inline ClosurePolicy parse_closure(const std::string& s) {
  if (s == "complement") return ClosurePolicy::complement;
  if (s == "rescale") return ClosurePolicy::rescale;
  if (s == "automatic") return ClosurePolicy::automatic;
  if (s == "none") return ClosurePolicy::none;
  throw FormatError("unknown closure policy '" + s + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(where + ": not a number: '" + s + "'");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  using detail::get_or;
  detail::reject_unknown_keys(
      j, {"subspace", "grid", "state", "photons", "seed", "rel_tol", "ml", "ell_shift", "closure"}, "config");
  RunConfig cfg;
  try {
    if (auto it = j.find("subspace"); it != j.end()) {
      detail::reject_unknown_keys(*it, {"p_min", "p_max", "ell_min", "ell_max"}, "config.subspace");
      cfg.subspace = {get_or(*it, "p_min", 0), get_or(*it, "p_max", 0), get_or(*it, "ell_min", 0),
                      get_or(*it, "ell_max", 0)};
    }
    if (auto it = j.find("grid"); it != j.end()) {
      detail::reject_unknown_keys(*it, {"nx", "ny", "half_width"}, "config.grid");
      cfg.grid = {get_or(*it, "nx", 11), get_or(*it, "ny", 11), get_or(*it, "half_width", 3.5)};
    }
    if (auto it = j.find("state"); it != j.end()) {
      if (!it->is_array()) throw FormatError("config.state: expected a list of terms");
      std::vector<StateSpec::Term> terms;
      for (const auto& t : *it) {
        detail::reject_unknown_keys(t, {"ell", "p", "re", "im"}, "config.state[]");
        terms.push_back({{t.at("ell").get<int>(), get_or(t, "p", 0)},
                         {get_or(t, "re", 0.0), get_or(t, "im", 0.0)}});
      }
      cfg.state = StateSpec(std::move(terms));
    }
    if (auto it = j.find("photons"); it != j.end()) cfg.photons = it->get<std::uint64_t>();
    if (auto it = j.find("seed"); it != j.end()) cfg.seed = it->get<std::uint64_t>();
    cfg.rel_tol = get_or(j, "rel_tol", kDefaultRankTolerance);
    cfg.ell_shift = get_or(j, "ell_shift", 0);
    if (auto it = j.find("closure"); it != j.end()) cfg.closure = detail::parse_closure(it->get<std::string>());
    if (auto it = j.find("ml"); it != j.end()) {
      detail::reject_unknown_keys(*it, {"max_iters", "dilution", "stop_tol", "start"}, "config.ml");
      cfg.ml.max_iters = get_or(*it, "max_iters", cfg.ml.max_iters);
      cfg.ml.dilution = get_or(*it, "dilution", cfg.ml.dilution);
      cfg.ml.stop_tol = get_or(*it, "stop_tol", cfg.ml.stop_tol);
      const auto start = get_or<std::string>(*it, "start", "maximally_mixed");
      if (start != "maximally_mixed") throw FormatError("config.ml.start: only 'maximally_mixed' is supported in configs");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  try {
    cfg.subspace.validate();
    (void)cfg.grid.grid();
    cfg.ml.validate();
    (void)lgtomo::ell_shift(cfg.reconstruction_subspace(), cfg.ell_shift);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!(cfg.rel_tol > 0.0)) throw FormatError("config: rel_tol must be positive");
  return cfg;
}

inline RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------- images

/// Header `# nx=..,ny=..,half_width=..,kind=..,total_photons=..,seed=..`, then
/// one value per line (y outer, x inner), then `rem,<value>` if present.
inline void write_image_csv(std::ostream& out, const IntensityImage& img) {
  out << "# nx=" << img.grid.nx() << ",ny=" << img.grid.ny() << ",half_width=" << format_double(img.grid.half_width())
      << ",kind=" << to_string(img.kind) << ",total_photons=";
  if (img.total_photons) out << *img.total_photons;
  out << ",seed=";
  if (img.seed) out << *img.seed;
  out << '\n';
  for (double v : img.values) out << format_double(v) << '\n';
  if (img.remainder) out << "rem," << format_double(*img.remainder) << '\n';
}

inline IntensityImage read_image_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw FormatError("image: missing '# ' header line");
  IntensityImage img;
  std::optional<int> nx, ny;
  std::optional<double> hw;
  std::optional<ImageKind> kind;
  for (const auto& field : detail::split(line.substr(2), ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw FormatError("image: malformed header field '" + field + "'");
    const auto key = detail::trim(field.substr(0, eq));
    const auto value = detail::trim(field.substr(eq + 1));
    if (key == "nx") {
      nx = static_cast<int>(detail::parse_number(value, "image nx"));
    } else if (key == "ny") {
      ny = static_cast<int>(detail::parse_number(value, "image ny"));
    } else if (key == "half_width") {
      hw = detail::parse_number(value, "image half_width");
    } else if (key == "kind") {
      if (value == "probability") kind = ImageKind::probability;
      else if (value == "counts") kind = ImageKind::counts;
      else throw FormatError("image: unknown kind '" + value + "'");
    } else if (key == "total_photons") {
      if (!value.empty()) img.total_photons = static_cast<std::uint64_t>(detail::parse_number(value, "image total_photons"));
    } else if (key == "seed") {
      if (!value.empty()) img.seed = std::stoull(value);
    } else {
      throw FormatError("image: unknown header key '" + key + "'");
    }
  }
  if (!nx || !ny || !hw || !kind) throw FormatError("image: header must give nx, ny, half_width and kind");
  try {
    img.grid = PixelGrid(*nx, *ny, *hw);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("image: ") + e.what());
  }
  img.kind = *kind;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty()) continue;
    if (img.remainder) throw FormatError("image: data after the 'rem' line");
    if (line.rfind("rem,", 0) == 0) {
      img.remainder = detail::parse_number(line.substr(4), "image rem");
      continue;
    }
    const double v = detail::parse_number(line, "image value");
    if (v < 0.0) throw FormatError("image: negative value");
    img.values.push_back(v);
  }
  if (img.values.size() != img.grid.size()) {
    throw FormatError("image: expected " + std::to_string(img.grid.size()) + " values, found " +
                      std::to_string(img.values.size()));
  }
  return img;
}

inline void write_image_csv(const std::string& path, const IntensityImage& img) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write_image_csv(out, img);
}

inline IntensityImage read_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open image '" + path + "'");
  return read_image_csv(in);
}

// ---------------------------------------------------------------- matrices

inline json modes_json(const Subspace& s) {
  json modes = json::array();
  for (const auto& m : s.modes()) modes.push_back({m.ell, m.p});
  return modes;
}

inline json real_table(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RMatrix real_table(const json& rows, std::size_t d, const char* what) {
  if (!rows.is_array() || rows.size() != d) throw FormatError(std::string(what) + ": expected " + std::to_string(d) + " rows");
  RMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!rows[i].is_array() || rows[i].size() != d) throw FormatError(std::string(what) + ": ragged row");
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

inline json density_json(const DensityMatrix& rho, const Subspace& s) {
  require_same_dim(static_cast<Eigen::Index>(rho.dim()), static_cast<Eigen::Index>(s.dim()), "density_json");
  const auto tables = render_matrix(rho);
  return {{"dim", rho.dim()}, {"modes", modes_json(s)}, {"re", real_table(tables.re)}, {"im", real_table(tables.im)}};
}

struct LabeledDensity {
  DensityMatrix rho;
  Subspace subspace;
};

inline Subspace parse_modes(const json& j) {
  std::vector<ModeIndex> modes;
  for (const auto& m : j) {
    if (!m.is_array() || m.size() != 2) throw FormatError("modes: expected [ell, p] pairs");
    modes.push_back({m[0].get<int>(), m[1].get<int>()});
  }
  Subspace s(modes);
  // Stored order must already be canonical.
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (s[i] != modes[i]) throw FormatError("modes: not in (p, ell) order");
  return s;
}

inline LabeledDensity parse_density_json(const json& j) {
  try {
    const auto d = j.at("dim").get<std::size_t>();
    Subspace s = parse_modes(j.at("modes"));
    if (s.dim() != d) throw FormatError("density: modes length differs from dim");
    CMatrix rho(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    rho.real() = real_table(j.at("re"), d, "density.re");
    rho.imag() = real_table(j.at("im"), d, "density.im");
    return {DensityMatrix(std::move(rho), 1e-9), std::move(s)};
  } catch (const json::exception& e) {
    throw FormatError(std::string("density: ") + e.what());
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("density: ") + e.what());
  }
}

inline json povm_json(const PovmSet& povm) {
  json elements = json::array();
  for (const auto& e : povm.elements)
    elements.push_back({{"re", real_table(e.real())}, {"im", real_table(e.imag())}});
  return {{"dim", povm.dim()},
          {"modes", modes_json(povm.subspace)},
          {"completeness_defect", povm.completeness_defect},
          {"pixel_count", povm.pixel_count},
          {"has_closure", povm.has_closure},
          {"rescale_factor", povm.rescale_factor},
          {"elements", std::move(elements)}};
}

inline PovmSet parse_povm_json(const json& j) {
  try {
    PovmSet povm;
    const auto d = j.at("dim").get<std::size_t>();
    povm.subspace = parse_modes(j.at("modes"));
    if (povm.subspace.dim() != d) throw FormatError("povm: modes length differs from dim");
    povm.completeness_defect = j.at("completeness_defect").get<double>();
    povm.pixel_count = j.at("pixel_count").get<std::size_t>();
    povm.has_closure = j.at("has_closure").get<bool>();
    povm.rescale_factor = j.value("rescale_factor", 1.0);
    for (const auto& e : j.at("elements")) {
      CMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      m.real() = real_table(e.at("re"), d, "povm.re");
      m.imag() = real_table(e.at("im"), d, "povm.im");
      povm.elements.push_back(std::move(m));
    }
    if (povm.elements.size() != povm.pixel_count + (povm.has_closure ? 1 : 0))
      throw FormatError("povm: element count inconsistent with pixel_count/has_closure");
    return povm;
  } catch (const json::exception& e) {
    throw FormatError(std::string("povm: ") + e.what());
  }
}

inline json report_json(const CompletenessReport& rep, const Subspace& s) {
  json sv = json::array();
  for (Eigen::Index i = 0; i < rep.singular_values.size(); ++i) sv.push_back(rep.singular_values(i));
  return {{"dim", s.dim()},           {"modes", modes_json(s)},        {"rank", rep.rank},
          {"required", rep.required}, {"complete", rep.complete},      {"kernel_dim", rep.kernel_dim()},
          {"singular_values", std::move(sv)}};
}

// ---------------------------------------------------------------- tables

struct FigureTable {
  std::string kind;  ///< incompatibility_map | completeness_scan | intensity | density_matrix
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline void write_table_csv(std::ostream& out, const FigureTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw FormatError("table '" + t.kind + "': ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

inline void write_table_csv(const std::string& path, const FigureTable& t) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  write_table_csv(out, t);
}

inline FigureTable scan_table(const std::vector<ScanRow>& rows) {
  FigureTable t{"completeness_scan", {"ell_cutoff", "d", "rank", "required", "complete"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({static_cast<double>(r.ell_cutoff), static_cast<double>(r.dim), static_cast<double>(r.rank),
                      static_cast<double>(r.required), r.complete ? 1.0 : 0.0});
  return t;
}

inline FigureTable incompatibility_table(const RMatrix& map, IntRange p_cutoffs, IntRange ell_cutoffs) {
  FigureTable t{"incompatibility_map", {"p_cutoff", "ell_cutoff", "commutator_norm"}, {}};
  for (int pc = p_cutoffs.lo; pc <= p_cutoffs.hi; ++pc)
    for (int lc = ell_cutoffs.lo; lc <= ell_cutoffs.hi; ++lc)
      t.rows.push_back({static_cast<double>(pc), static_cast<double>(lc), map(pc - p_cutoffs.lo, lc - ell_cutoffs.lo)});
  return t;
}

/// One of the two d x d tables of a density matrix, labeled by mode.
inline void write_matrix_csv(std::ostream& out, const RMatrix& m, const Subspace& s) {
  out << "mode";
  for (const auto& mode : s.modes()) out << ",\"" << mode.ell << ':' << mode.p << '"';
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& mode = s[static_cast<std::size_t>(i)];
    out << '"' << mode.ell << ':' << mode.p << '"';
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

}  // namespace lgtomo::io
