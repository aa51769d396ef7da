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

// End-to-end commands behind the lgtomo CLI: choose a reconstruction
// subspace, induce the POVM of a pixel scan, check completeness, simulate
// scans and reconstruct states. Each command returns a process exit code;
// summaries go to `out`, diagnostics to `err`.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lgtomo/completeness.hpp"
#include "lgtomo/induced_povm.hpp"
#include "lgtomo/io.hpp"
#include "lgtomo/reconstruction.hpp"
#include "lgtomo/simulation.hpp"

namespace lgtomo::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitIncomplete = 2;

namespace fs = std::filesystem;

namespace detail {

inline void write_json(const fs::path& path, const io::json& j) {
  std::ofstream out(path);
  if (!out) throw io::FormatError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

inline fs::path prepare_out(const std::string& out_dir) {
  fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  return dir;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace detail

inline int cmd_check(const io::RunConfig& cfg, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Subspace s = cfg.reconstruction_subspace();
    const PovmSet povm = cfg.povm();
    const CompletenessReport rep = is_informationally_complete(povm, cfg.rel_tol);
    auto j = io::report_json(rep, s);
    j["completeness_defect"] = povm.completeness_defect;
    j["elements"] = povm.size();
    detail::write_json(detail::prepare_out(out_dir) / "check.json", j);
    err << "pixel-sum defect from identity: " << io::format_double(povm.completeness_defect) << '\n';
    out << (rep.complete ? "complete" : "incomplete") << ": rank " << rep.rank << "/" << rep.required << " (d=" << s.dim()
        << ", " << povm.size() << " outcomes, kernel " << rep.kernel_dim() << ")\n";
    return rep.complete ? kExitOk : kExitIncomplete;
  });
}

inline int cmd_simulate(const io::RunConfig& cfg, const std::string& out_dir, std::optional<std::uint64_t> seed_override,
                        std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (!cfg.state) throw io::FormatError("simulate: config has no 'state'");
    const Subspace s = cfg.reconstruction_subspace();
    const PixelGrid grid = cfg.grid.grid();
    const PovmSet povm = cfg.povm();
    const DensityMatrix rho = make_state(*cfg.state, s);
    const IntensityImage ideal = ideal_intensity(rho, povm, grid);
    const auto dir = detail::prepare_out(out_dir);
    io::write_image_csv((dir / "ideal.csv").string(), ideal);
    detail::write_json(dir / "state.json", io::density_json(rho, s));
    out << "ideal image: " << grid.size() << " pixels, pixel sum " << io::format_double(ideal.pixel_sum());
    if (ideal.remainder) out << ", remainder " << io::format_double(*ideal.remainder);
    if (cfg.photons) {
      const std::uint64_t seed = seed_override.value_or(cfg.seed.value_or(0));
      const IntensityImage counts = add_noise(ideal, *cfg.photons, seed);
      io::write_image_csv((dir / "counts.csv").string(), counts);
      out << "; counts: " << *cfg.photons << " photons, seed " << seed;
    }
    out << '\n';
    return kExitOk;
  });
}

inline int cmd_reconstruct(const io::RunConfig& cfg, const std::string& counts_path, const std::string& out_dir,
                           std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const Subspace s = cfg.reconstruction_subspace();
    const PixelGrid grid = cfg.grid.grid();
    const IntensityImage img = io::read_image_csv(counts_path);
    if (!(img.grid == grid)) throw io::FormatError("reconstruct: counts grid differs from the configured grid");
    const PovmSet povm = cfg.povm();

    std::vector<double> counts = img.values;
    bool masked = false;
    if (povm.has_closure) {
      if (img.remainder) {
        counts.push_back(*img.remainder);
      } else {
        counts.push_back(0.0);
        masked = true;
      }
    } else if (img.remainder) {
      throw io::FormatError("reconstruct: image has a 'rem' outcome but the POVM has no closure element");
    }
    if (masked) err << "warning: no 'rem' outcome in counts; closure outcome treated as unobserved (model mismatch)\n";

    const MlResult res = ml_reconstruct(povm, counts, cfg.ml);
    io::json diag = {{"iterations", res.iterations},
                     {"log_likelihood", res.log_likelihood},
                     {"converged", res.converged},
                     {"unique", res.unique},
                     {"kernel_dim", res.kernel_dim},
                     {"closure_masked", masked}};
    if (!res.unique) diag["gauge_note"] = res.gauge_note;
    std::optional<double> fid;
    if (cfg.state) {
      fid = fidelity(make_state(*cfg.state, s), res.rho_hat);
      diag["fidelity"] = *fid;
    }
    auto j = io::density_json(res.rho_hat, s);
    j["diagnostics"] = diag;
    const auto dir = detail::prepare_out(out_dir);
    detail::write_json(dir / "reconstruction.json", j);
    const auto tables = render_matrix(res.rho_hat);
    {
      std::ofstream re(dir / "rho_re.csv");
      io::write_matrix_csv(re, tables.re, s);
      std::ofstream im(dir / "rho_im.csv");
      io::write_matrix_csv(im, tables.im, s);
    }
    if (!res.unique) err << "warning: " << res.gauge_note << '\n';
    out << "reconstructed d=" << s.dim() << " in " << res.iterations << " iterations ("
        << (res.converged ? "converged" : "not converged") << "), log-likelihood " << io::format_double(res.log_likelihood)
        << ", unique " << (res.unique ? "yes" : "no");
    if (fid) out << ", fidelity " << io::format_double(*fid);
    out << '\n';
    return kExitOk;
  });
}

struct FigureOptions {
  int p_cutoff_max = 4;
  int ell_cutoff_max = 6;
  NormKind norm = NormKind::frobenius;
  std::pair<double, double> pixel_a{0.0, 0.0};
  std::pair<double, double> pixel_b{0.0, 1.0};
};

inline int cmd_figures(const std::string& which, const io::RunConfig& cfg, const FigureOptions& fo,
                       const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto dir = detail::prepare_out(out_dir);
    if (which == "fig1") {
      const IntRange pr{0, fo.p_cutoff_max};
      const IntRange lr{0, fo.ell_cutoff_max};
      const RMatrix map = incompatibility_map(fo.pixel_a, fo.pixel_b, pr, lr, fo.norm);
      io::write_table_csv((dir / "fig1.csv").string(), io::incompatibility_table(map, pr, lr));
      out << "fig1: " << map.size() << " truncations written to " << (dir / "fig1.csv").string() << '\n';
      return kExitOk;
    }
    if (which == "fig5") {
      const PixelGrid grid = cfg.grid.grid();
      for (auto [family, name] : {std::pair{ScanFamily::nonnegative, "nonnegative"}, std::pair{ScanFamily::symmetric, "symmetric"}}) {
        const auto rows = completeness_scan(grid, family, fo.ell_cutoff_max, cfg.rel_tol, cfg.closure);
        const auto path = dir / (std::string("fig5_") + name + ".csv");
        io::write_table_csv(path.string(), io::scan_table(rows));
        out << "fig5 " << name << ":";
        for (const auto& r : rows) out << ' ' << r.rank << '/' << r.required;
        out << '\n';
      }
      return kExitOk;
    }
    throw io::FormatError("figures: unknown figure '" + which + "' (expected fig1 or fig5)");
  });
}

}  // namespace lgtomo::pipeline
