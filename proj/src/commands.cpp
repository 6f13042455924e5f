#include "ncharge/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

namespace ncharge
{

namespace
{

using namespace schema;

// Summary numbers carry 12 significant digits, hiding last-bit solver noise.
std::string fmt(double v)
{
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::string fmt(const RVector &v)
{
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    out += (i ? "," : "") + fmt(v(i));
  }
  return out + "]";
}

LieBasis algebra_from_config(const Json &j)
{
  const std::string family = string(field(j, "family", "/algebra"), "/algebra/family");
  const Json *d = optional_field(j, "D", "/algebra");
  const Json *n = optional_field(j, "n", "/algebra");
  if (bool(d) == bool(n))
  {
    throw SchemaError("/algebra", "give exactly one of \"D\" (local dimension) or \"n\" (family index)");
  }
  std::size_t dim = 0;
  if (family == "su")
  {
    dim = d ? count(*d, "/algebra/D") : count(*n, "/algebra/n");
  }
  else if (family == "sl")
  {
    dim = d ? count(*d, "/algebra/D") : count(*n, "/algebra/n") + 1;
  }
  else
  {
    throw SchemaError("/algebra/family", "no matrix representation for family \"" + family + "\" (supported: su, sl)");
  }
  if (dim < 2)
  {
    throw SchemaError(d ? "/algebra/D" : "/algebra/n", "local dimension must be at least 2");
  }
  return algebra_by_name("su(" + std::to_string(dim) + ")");
}

LatticeSpec lattice_from_config(const Json &j)
{
  if (const Json *chain = optional_field(j, "chain", "/lattice"))
  {
    const std::string p = "/lattice/chain";
    const std::size_t n = count(field(*chain, "n_sites", p), p + "/n_sites");
    if (n == 0)
    {
      throw SchemaError(p + "/n_sites", "must be positive");
    }
    bool periodic = false;
    double j1 = 1.0;
    double j2 = 0.0;
    if (const Json *x = optional_field(*chain, "periodic", p))
      periodic = boolean(*x, p + "/periodic");
    if (const Json *x = optional_field(*chain, "j1", p))
      j1 = number(*x, p + "/j1");
    if (const Json *x = optional_field(*chain, "j2", p))
      j2 = number(*x, p + "/j2");
    return chain_lattice(n, periodic, j1, j2);
  }
  LatticeSpec l = lattice_from_json(j, "/lattice");
  if (!l.k_body_groups.empty())
  {
    throw SchemaError("/lattice/k_body_groups", "list k-body terms in the top-level \"k_body\" field");
  }
  return l;
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
  {
    throw std::runtime_error("cannot write " + path.string());
  }
  f << text;
  if (!f)
  {
    throw std::runtime_error("failed writing " + path.string());
  }
}

/// Maps library exceptions to exit codes.
int guarded(std::ostream &err, const std::function<int()> &body)
{
  try
  {
    return body();
  }
  catch (const SchemaError &e)
  {
    err << "error: input " << e.what() << "\n";
    return kExitInputError;
  }
  catch (const InfeasibleError &e)
  {
    err << "error: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return kExitInfeasible;
  }
  catch (const ConstructionError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
  catch (const ResourceError &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitResourceCap;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

PreferredBasis load_basis(const std::string &path) { return preferred_basis_from_json(read_json_file(path)); }

void check_cap(std::size_t d, std::size_t n, std::size_t cap)
{
  std::size_t dim = 1;
  for (std::size_t s = 0; s < n; ++s)
  {
    if (dim > cap / d)
    {
      dim = cap + 1;
      break;
    }
    dim *= d;
  }
  if (dim > cap)
  {
    throw ResourceError("D^N = " + std::to_string(d) + "^" + std::to_string(n) + " exceeds the dimension cap " +
                        std::to_string(cap));
  }
}

} // namespace

BuildConfig parse_build_config(const Json &j)
{
  if (!j.is_object())
  {
    throw SchemaError("/", "config must be a JSON object");
  }
  static const std::set<std::string> known{"schema_version", "algebra", "lattice", "k_body", "closed_form",
                                           "rng_seed", "tolerance", "outputs"};
  for (const auto &item : j.items())
  {
    if (!known.count(item.key()))
    {
      throw SchemaError("/" + item.key(), "unknown field");
    }
  }
  if (const Json *v = optional_field(j, "schema_version", ""))
  {
    if (string(*v, "/schema_version") != kSchemaVersion)
    {
      throw SchemaError("/schema_version", "unsupported schema version");
    }
  }
  BuildConfig c;
  const Json &alg = field(j, "algebra", "");
  try
  {
    c.basis = algebra_from_config(alg);
  }
  catch (const SchemaError &)
  {
    throw;
  }
  catch (const std::invalid_argument &e)
  {
    throw SchemaError("/algebra", e.what());
  }
  c.lattice = lattice_from_config(field(j, "lattice", ""));

  if (const Json *x = optional_field(j, "closed_form", ""))
  {
    c.method = boolean(*x, "/closed_form") ? BuildMethod::closed_form : BuildMethod::numerical;
    if (c.method == BuildMethod::closed_form && !has_closed_form(c.basis))
    {
      throw SchemaError("/closed_form", "no closed form for " + c.basis.name);
    }
  }
  if (const Json *x = optional_field(j, "rng_seed", ""))
  {
    c.rng_seed = count(*x, "/rng_seed");
  }
  if (const Json *t = optional_field(j, "tolerance", ""))
  {
    if (const Json *x = optional_field(*t, "conservation", "/tolerance"))
    {
      c.conservation_tol = number(*x, "/tolerance/conservation");
      if (!(c.conservation_tol > 0.0))
      {
        throw SchemaError("/tolerance/conservation", "must be positive");
      }
    }
    if (const Json *x = optional_field(*t, "dimension_cap", "/tolerance"))
    {
      c.dimension_cap = count(*x, "/tolerance/dimension_cap");
    }
  }
  if (const Json *o = optional_field(j, "outputs", ""))
  {
    const auto name = [&](const char *key, std::string &target) {
      if (const Json *x = optional_field(*o, key, "/outputs"))
      {
        target = string(*x, std::string("/outputs/") + key);
        if (target.empty() || std::filesystem::path(target).has_parent_path())
        {
          throw SchemaError(std::string("/outputs/") + key, "must be a plain file name");
        }
      }
    };
    name("preferred_basis", c.preferred_basis_file);
    name("coupling_solution", c.coupling_file);
    name("hamiltonian", c.hamiltonian_file);
  }
  if (const Json *kb = optional_field(j, "k_body", ""))
  {
    array(*kb, "/k_body");
    const std::size_t n_couplings = (c.basis.dimension() - c.basis.rank) / 2 * (c.basis.dimension() / c.basis.rank);
    for (std::size_t i = 0; i < kb->size(); ++i)
    {
      const std::string p = "/k_body/" + std::to_string(i);
      const Json &req = (*kb)[i];
      KBodyRequest r;
      const Json &sites = array(field(req, "sites", p), p + "/sites");
      for (std::size_t s = 0; s < sites.size(); ++s)
      {
        const std::size_t site = count(sites[s], p + "/sites/" + std::to_string(s));
        if (site < 1 || site > c.lattice.n_sites)
        {
          throw SchemaError(p + "/sites/" + std::to_string(s), "site outside [1, n_sites]");
        }
        r.sites.push_back(site);
      }
      if (r.sites.size() < 3 || std::set<std::size_t>(r.sites.begin(), r.sites.end()).size() != r.sites.size())
      {
        throw SchemaError(p + "/sites", "a k-body cycle needs at least three distinct sites");
      }
      if (const Json *w = optional_field(req, "weight", p))
      {
        r.weight = number(*w, p + "/weight");
      }
      if (const Json *cs = optional_field(req, "couplings", p))
      {
        array(*cs, p + "/couplings");
        if (cs->size() != r.sites.size())
        {
          throw SchemaError(p + "/couplings", "expected one coupling vector per factor (" +
                                                  std::to_string(r.sites.size()) + ")");
        }
        for (std::size_t f = 0; f < cs->size(); ++f)
        {
          const std::string fp = p + "/couplings/" + std::to_string(f);
          r.couplings.push_back(rvector_from_json((*cs)[f], fp));
          if (std::size_t(r.couplings.back().size()) != n_couplings)
          {
            throw SchemaError(fp, "expected " + std::to_string(n_couplings) + " couplings");
          }
        }
      }
      c.k_body.push_back(std::move(r));
    }
  }
  return c;
}

BuildResult run_build(const BuildConfig &config)
{
  check_cap(config.basis.local_dim, config.lattice.n_sites, config.dimension_cap);
  BuildResult r;
  r.basis = build_preferred_basis(config.basis, diagonal_cartan(config.basis), config.rng_seed, config.method);
  r.coupling = solve_couplings(r.basis);

  LatticeSpec lattice = config.lattice;
  AssemblyOptions options;
  options.dimension_cap = config.dimension_cap;
  options.conservation_tol = config.conservation_tol;
  for (const KBodyRequest &req : config.k_body)
  {
    std::vector<ParametricTerm> cycle;
    std::vector<RVector> js;
    for (std::size_t i = 0; i < req.sites.size(); ++i)
    {
      cycle.push_back(two_body_unconstrained(r.basis, {req.sites[i], req.sites[(i + 1) % req.sites.size()]}));
      js.push_back(req.couplings.empty() ? r.coupling.chosen : req.couplings[i]);
    }
    KBodyResult kb = k_body(r.basis, cycle, js);
    if (kb.product_conservation > config.conservation_tol)
    {
      std::ostringstream msg;
      msg << "k-body term on sites";
      for (std::size_t s : req.sites)
        msg << " " << s;
      msg << ": couplings do not conserve the charges (residual " << kb.product_conservation << ")";
      throw ConstructionError(msg.str());
    }
    lattice.k_body_groups.push_back({req.sites, req.weight});
    options.k_body_terms.push_back(kb.term);
    r.k_body.push_back(std::move(kb));
  }
  r.hamiltonian = assemble_global(lattice, r.basis, r.coupling, options);
  r.summary = build_summary(r);
  return r;
}

std::optional<double> simple_form_factor(const PreferredBasis &pb, const RVector &j)
{
  if (pb.ladders_flat.empty() || std::size_t(j.size()) != pb.ladders_flat.size())
  {
    return std::nullopt;
  }
  const LieBasis std_basis = algebra_by_name(pb.algebra);
  std::vector<CMatrix> gens;
  for (const CMatrix &g : std_basis.generators)
  {
    gens.push_back(g * std::sqrt(2.0 / hs_inner(g, g).real()));
  }
  const CMatrix target = simple_form(gens).matrix;
  const CMatrix h = two_body_unconstrained(pb).evaluate(j);
  const double hh = h.squaredNorm();
  if (hh == 0.0)
  {
    return std::nullopt;
  }
  const Complex k = hs_inner(h, target) / hh;
  if ((k * h - target).norm() > 1e-8 * target.norm() || std::abs(k.imag()) > 1e-8 * std::abs(k))
  {
    return std::nullopt;
  }
  return k.real();
}

std::string build_summary(const BuildResult &r)
{
  const PreferredBasis &pb = r.basis;
  const std::size_t c = pb.dimension();
  const std::optional<double> k = simple_form_factor(pb, r.coupling.chosen);
  std::ostringstream s;
  s << "algebra=" << pb.algebra << " c=" << c << " r=" << pb.rank << " c/r=" << (pb.rank ? c / pb.rank : 0)
    << " N=" << r.hamiltonian.lattice.n_sites << " nullspace_dim=" << r.coupling.nullspace_dim()
    << " J=" << fmt(r.coupling.chosen) << " J_simple_form=" << (k ? fmt(*k) : std::string("n/a"))
    << " method=" << pb.method;
  return s.str();
}

int cmd_build(const std::string &config_path, const std::string &out_dir, std::ostream &out, std::ostream &err)
{
  return guarded(err, [&] {
    Json doc;
    try
    {
      doc = read_json_file(config_path);
    }
    catch (const SchemaError &)
    {
      throw;
    }
    catch (const std::exception &e)
    {
      throw SchemaError(config_path, e.what());
    }
    const BuildConfig config = parse_build_config(doc);
    const BuildResult result = run_build(config);
    // Serialize everything before touching the file system.
    const std::string basis_text = dump_json(to_json(result.basis));
    const std::string coupling_text = dump_json(to_json(result.coupling));
    const std::string ham_text = dump_json(to_json(result.hamiltonian));
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / config.preferred_basis_file, basis_text);
    write_file(dir / config.coupling_file, coupling_text);
    write_file(dir / config.hamiltonian_file, ham_text);
    out << result.summary << "\n";
    return int(kExitOk);
  });
}

int cmd_verify(const std::string &hamiltonian_path, const std::string &basis_path, std::ostream &out, std::ostream &err)
{
  return guarded(err, [&] {
    const GlobalHamiltonian h = global_hamiltonian_from_json(read_json_file(hamiltonian_path));
    const PreferredBasis pb = load_basis(basis_path);
    if (h.algebra != pb.algebra || h.local_dim != pb.local_dim)
    {
      throw SchemaError(basis_path, "basis is for " + pb.algebra + " but the Hamiltonian is for " + h.algebra);
    }
    std::vector<VerificationReport> reports;
    const LieBasis basis = algebra_by_name(pb.algebra);
    for (auto &r : check_preferred_basis(pb, basis))
      reports.push_back(std::move(r));
    for (auto &r : check_global_conservation(h, pb))
      reports.push_back(std::move(r));
    if (!h.lattice.edges.empty())
    {
      if (std::size_t(h.coupling.size()) != pb.ladders_flat.size())
      {
        throw SchemaError("/coupling", "coupling vector does not match the basis' ladder count");
      }
      for (auto &r : check_local_transport(two_body_unconstrained(pb).term(h.coupling), pb))
        reports.push_back(std::move(r));
    }
    const long c = long(pb.dimension());
    const long r = long(pb.rank);
    reports.push_back(check_ratio({"sl(n+1)", int(pb.local_dim) - 1, c, r}));
    std::size_t failed = 0;
    for (const VerificationReport &rep : reports)
    {
      out << to_json(rep).dump() << "\n";
      failed += rep.pass ? 0 : 1;
    }
    err << reports.size() << " checks, " << failed << " failed\n";
    return failed == 0 ? int(kExitOk) : int(kExitVerificationFailed);
  });
}

int cmd_spectrum(const std::string &hamiltonian_path, const std::optional<std::string> &basis_path,
                 const SpectrumRequest &request, std::ostream &out, std::ostream &err)
{
  return guarded(err, [&] {
    if (request.stats != "r")
    {
      throw SchemaError("--stats", "unknown estimator \"" + request.stats + "\" (supported: r)");
    }
    const Json doc = read_json_file(hamiltonian_path);
    schema::document(doc, "global_hamiltonian");
    // Cap check from the header fields, before the matrix is decoded.
    const std::size_t n = count(field(field(doc, "lattice", ""), "n_sites", "/lattice"), "/lattice/n_sites");
    const std::size_t d = count(field(doc, "local_dim", ""), "/local_dim");
    check_cap(d, n, request.dimension_cap);
    const GlobalHamiltonian h = global_hamiltonian_from_json(doc);
    const PreferredBasis pb = basis_path ? load_basis(*basis_path)
                                         : build_preferred_basis(algebra_by_name(h.algebra),
                                                                 diagonal_cartan(algebra_by_name(h.algebra)), 0);
    SpectralOptions opt;
    opt.resolve_spatial = request.resolve_spatial;
    opt.largest_only = request.largest_only;
    opt.sector = request.sector;
    const std::vector<SectorSpectrum> spectra = sector_spectra(h, pb, opt);
    Json sectors = Json::array();
    for (const SectorSpectrum &s : spectra)
    {
      sectors.push_back(to_json(s));
    }
    Json j{{"schema_version", kSchemaVersion}, {"kind", "spectrum"}, {"resolve_spatial", request.resolve_spatial},
           {"sectors", std::move(sectors)}, {"statistics", to_json(gap_statistics(spectra))}};
    out << dump_json(j);
    return int(kExitOk);
  });
}

int cmd_table(std::ostream &out, std::ostream &err)
{
  return guarded(err, [&] {
    out << std::left << std::setw(8) << "algebra" << std::setw(10) << "family" << std::setw(4) << "n" << std::right
        << std::setw(6) << "c" << std::setw(5) << "r" << std::setw(6) << "c/r" << "  integer\n";
    bool ok = true;
    for (const AlgebraRegistryEntry &e : registry_table())
    {
      const VerificationReport rep = check_ratio(e);
      ok = ok && rep.pass;
      out << std::left << std::setw(8) << e.label() << std::setw(10) << e.family << std::setw(4)
          << (e.n ? std::to_string(*e.n) : std::string("-")) << std::right << std::setw(6) << e.dimension
          << std::setw(5) << e.rank << std::setw(6) << e.ratio() << "  " << (rep.pass ? "yes" : "NO") << "\n";
    }
    return ok ? int(kExitOk) : int(kExitVerificationFailed);
  });
}

int cmd_preferred_basis(const std::string &algebra, bool closed_form, std::uint64_t rng_seed,
                        const std::string &out_path, std::ostream &out, std::ostream &err)
{
  return guarded(err, [&] {
    LieBasis basis;
    try
    {
      basis = algebra_by_name(algebra);
    }
    catch (const std::invalid_argument &e)
    {
      throw SchemaError("--algebra", e.what());
    }
    if (closed_form && !has_closed_form(basis))
    {
      throw SchemaError("--closed-form", "no closed form for " + basis.name);
    }
    const PreferredBasis pb = build_preferred_basis(basis, diagonal_cartan(basis), rng_seed,
                                                    closed_form ? BuildMethod::closed_form : BuildMethod::automatic);
    const std::string text = dump_json(to_json(pb));
    const std::filesystem::path path(out_path);
    if (path.has_parent_path())
    {
      std::filesystem::create_directories(path.parent_path());
    }
    write_file(path, text);
    out << "algebra=" << pb.algebra << " c=" << pb.dimension() << " r=" << pb.rank
        << " c/r=" << pb.dimension() / pb.rank << " method=" << pb.method << "\n";
    return int(kExitOk);
  });
}

} // namespace ncharge
