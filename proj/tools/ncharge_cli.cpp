#include "ncharge/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

int main(int argc, char **argv)
{
  using namespace ncharge;
  CLI::App app{"Build and check Hamiltonians that conserve non-commuting charges"};
  app.require_subcommand(1);

  std::string config, out_dir = ".";
  auto *build = app.add_subcommand("build", "Construct preferred basis, couplings and global Hamiltonian");
  build->add_option("--config", config, "Build config (JSON)")->required();
  build->add_option("--out-dir", out_dir, "Directory for the output files");

  std::string ham, basis;
  auto *verify = app.add_subcommand("verify", "Re-check conservation, transport and basis properties");
  verify->add_option("--ham", ham, "Global Hamiltonian file")->required();
  verify->add_option("--basis", basis, "Preferred basis file")->required();

  std::string spec_ham, spec_basis, sector;
  SpectrumRequest request;
  auto *spectrum = app.add_subcommand("spectrum", "Sector spectra and level-spacing statistics");
  spectrum->add_option("--ham", spec_ham, "Global Hamiltonian file")->required();
  spectrum->add_option("--basis", spec_basis, "Preferred basis file (default: rebuilt from the algebra)");
  spectrum->add_option("--stats", request.stats, "Estimator (r)");
  spectrum->add_flag("--resolve-spatial", request.resolve_spatial, "Also resolve Casimir, translation and parity");
  spectrum->add_flag("--largest", request.largest_only, "Only the largest charge sector");
  spectrum->add_option("--sector", sector, "Comma-separated Cartan label to keep");
  spectrum->add_option("--cap", request.dimension_cap, "Hilbert-space dimension cap");

  app.add_subcommand("table", "Print the simple Lie algebra registry");

  std::string algebra, pb_out;
  bool closed_form = false;
  std::uint64_t seed = 0;
  auto *pbcmd = app.add_subcommand("preferred-basis", "Build and export a preferred basis");
  pbcmd->add_option("--algebra", algebra, "Algebra, e.g. su(3)")->required();
  pbcmd->add_flag("--closed-form", closed_form, "Use the closed-form construction");
  pbcmd->add_option("--seed", seed, "RNG seed for the numerical path");
  pbcmd->add_option("--out", pb_out, "Output file")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (build->parsed())
    return cmd_build(config, out_dir, std::cout, std::cerr);
  if (verify->parsed())
    return cmd_verify(ham, basis, std::cout, std::cerr);
  if (spectrum->parsed())
  {
    if (!sector.empty())
    {
      std::vector<double> label;
      std::stringstream in(sector);
      std::string item;
      try
      {
        while (std::getline(in, item, ','))
          label.push_back(std::stod(item));
      }
      catch (const std::exception &)
      {
        std::cerr << "error: --sector expects comma-separated numbers\n";
        return kExitInputError;
      }
      request.sector = label;
    }
    return cmd_spectrum(spec_ham, spec_basis.empty() ? std::nullopt : std::optional<std::string>(spec_basis), request,
                        std::cout, std::cerr);
  }
  if (pbcmd->parsed())
    return cmd_preferred_basis(algebra, closed_form, seed, pb_out, std::cout, std::cerr);
  return cmd_table(std::cout, std::cerr);
}
