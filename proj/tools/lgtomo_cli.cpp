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

// lgtomo: informational-completeness checks and maximum-likelihood
// reconstruction of Laguerre-Gauss mode states from single intensity scans.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lgtomo/io.hpp"
#include "lgtomo/pipeline.hpp"

namespace {

lgtomo::io::RunConfig load(const std::string& path) {
  if (path.empty()) return lgtomo::io::parse_config(lgtomo::io::json::object());
  return lgtomo::io::read_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lgtomo;
  CLI::App app{"Tomography of optical vortices from compatible position measurements"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string counts_path;
  std::optional<std::uint64_t> seed;
  std::string which;
  pipeline::FigureOptions fig;
  std::string norm = "frobenius";

  auto* check = app.add_subcommand("check", "Induce the pixel POVM and test informational completeness");
  auto* simulate = app.add_subcommand("simulate", "Write the ideal intensity scan and, if photons are set, noisy counts");
  auto* reconstruct = app.add_subcommand("reconstruct", "Maximum-likelihood reconstruction from a counts file");
  auto* figures = app.add_subcommand("figures", "Emit incompatibility-map or completeness-scan tables");

  for (auto* sub : {check, simulate, reconstruct, figures}) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
  }
  check->get_option("--config")->required();
  simulate->get_option("--config")->required();
  reconstruct->get_option("--config")->required();
  simulate->add_option("--seed", seed, "Noise seed (overrides the config)");
  reconstruct->add_option("--counts", counts_path, "Counts or probability image CSV")->required()->check(CLI::ExistingFile);
  figures->add_option("--which", which, "fig1 or fig5")->required()->check(CLI::IsMember({"fig1", "fig5"}));
  figures->add_option("--p-cutoff-max", fig.p_cutoff_max, "fig1: largest radial cutoff")->check(CLI::NonNegativeNumber);
  figures->add_option("--ell-cutoff-max", fig.ell_cutoff_max, "Largest |ell| cutoff")->check(CLI::NonNegativeNumber);
  figures->add_option("--norm", norm, "fig1: commutator norm")->check(CLI::IsMember({"frobenius", "spectral"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pipeline::kExitError;
  }

  io::RunConfig cfg;
  try {
    cfg = load(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pipeline::kExitError;
  }

  if (*check) return pipeline::cmd_check(cfg, out_dir, std::cout, std::cerr);
  if (*simulate) return pipeline::cmd_simulate(cfg, out_dir, seed, std::cout, std::cerr);
  if (*reconstruct) return pipeline::cmd_reconstruct(cfg, counts_path, out_dir, std::cout, std::cerr);
  fig.norm = norm == "spectral" ? NormKind::spectral : NormKind::frobenius;
  return pipeline::cmd_figures(which, cfg, fig, out_dir, std::cout, std::cerr);
}
