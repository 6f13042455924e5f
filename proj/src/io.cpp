#include "ncharge/io.hpp"

#include <fstream>
#include <sstream>

namespace ncharge
{

namespace schema
{

const Json &field(const Json &j, const std::string &key, const std::string &path)
{
  const Json *f = optional_field(j, key, path);
  if (!f)
  {
    throw SchemaError(path + "/" + key, "missing required field");
  }
  return *f;
}

const Json *optional_field(const Json &j, const std::string &key, const std::string &path)
{
  if (!j.is_object())
  {
    throw SchemaError(path.empty() ? "/" : path, "expected an object");
  }
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const Json &j, const std::string &path)
{
  if (!j.is_number())
  {
    throw SchemaError(path, "expected a number");
  }
  return j.get<double>();
}

long integer(const Json &j, const std::string &path)
{
  if (!j.is_number_integer())
  {
    throw SchemaError(path, "expected an integer");
  }
  return j.get<long>();
}

std::size_t count(const Json &j, const std::string &path)
{
  const long v = integer(j, path);
  if (v < 0)
  {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return std::size_t(v);
}

bool boolean(const Json &j, const std::string &path)
{
  if (!j.is_boolean())
  {
    throw SchemaError(path, "expected true or false");
  }
  return j.get<bool>();
}

std::string string(const Json &j, const std::string &path)
{
  if (!j.is_string())
  {
    throw SchemaError(path, "expected a string");
  }
  return j.get<std::string>();
}

const Json &array(const Json &j, const std::string &path)
{
  if (!j.is_array())
  {
    throw SchemaError(path, "expected an array");
  }
  return j;
}

void document(const Json &j, const std::string &kind)
{
  const std::string version = string(field(j, "schema_version", ""), "/schema_version");
  if (version != kSchemaVersion)
  {
    throw SchemaError("/schema_version", "unsupported schema version \"" + version + "\"");
  }
  const std::string got = string(field(j, "kind", ""), "/kind");
  if (got != kind)
  {
    throw SchemaError("/kind", "expected \"" + kind + "\", got \"" + got + "\"");
  }
}

} // namespace schema

namespace
{

using namespace schema;

std::string at(const std::string &path, std::size_t i) { return path + "/" + std::to_string(i); }
std::string at(const std::string &path, const std::string &key) { return path + "/" + key; }

Json header(const std::string &kind) { return Json{{"schema_version", kSchemaVersion}, {"kind", kind}}; }

std::vector<std::size_t> sites_from_json(const Json &j, const std::string &path)
{
  std::vector<std::size_t> out;
  const Json &a = array(j, path);
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    out.push_back(count(a[i], at(path, i)));
  }
  return out;
}

} // namespace

Json parse_json(const std::string &text)
{
  try
  {
    return Json::parse(text);
  }
  catch (const Json::parse_error &e)
  {
    const std::size_t byte = std::min(e.byte, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i)
    {
      if (text[i] == '\n')
      {
        ++line;
        column = 1;
      }
      else
      {
        ++column;
      }
    }
    std::string msg = e.what();
    const auto pos = msg.find("syntax error");
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(column),
                      pos == std::string::npos ? msg : msg.substr(pos));
  }
}

Json read_json_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::string dump_json(const Json &j) { return j.dump() + "\n"; }

Json to_json(const CMatrix &m)
{
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    for (Eigen::Index k = 0; k < m.cols(); ++k)
    {
      data.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json to_json(const RMatrix &m)
{
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
  {
    for (Eigen::Index k = 0; k < m.cols(); ++k)
    {
      data.push_back(m(i, k));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json to_json(const RVector &v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

CMatrix cmatrix_from_json(const Json &j, const std::string &path)
{
  const std::size_t rows = count(field(j, "rows", path), at(path, "rows"));
  const std::size_t cols = count(field(j, "cols", path), at(path, "cols"));
  const std::string dpath = at(path, "data");
  const Json &data = array(field(j, "data", path), dpath);
  if (data.size() != rows * cols)
  {
    throw SchemaError(dpath, "expected " + std::to_string(rows * cols) + " entries for a " + std::to_string(rows) +
                                 "x" + std::to_string(cols) + " matrix, got " + std::to_string(data.size()));
  }
  CMatrix m(as_index(rows), as_index(cols));
  for (std::size_t e = 0; e < data.size(); ++e)
  {
    const Json &z = data[e];
    if (!z.is_array() || z.size() != 2)
    {
      throw SchemaError(at(dpath, e), "expected [re, im]");
    }
    m(as_index(e / cols), as_index(e % cols)) = Complex(number(z[0], at(at(dpath, e), 0)), number(z[1], at(at(dpath, e), 1)));
  }
  return m;
}

RMatrix rmatrix_from_json(const Json &j, const std::string &path)
{
  const std::size_t rows = count(field(j, "rows", path), at(path, "rows"));
  const std::size_t cols = count(field(j, "cols", path), at(path, "cols"));
  const std::string dpath = at(path, "data");
  const Json &data = array(field(j, "data", path), dpath);
  if (data.size() != rows * cols)
  {
    throw SchemaError(dpath, "expected " + std::to_string(rows * cols) + " entries, got " + std::to_string(data.size()));
  }
  RMatrix m(as_index(rows), as_index(cols));
  for (std::size_t e = 0; e < data.size(); ++e)
  {
    m(as_index(e / cols), as_index(e % cols)) = number(data[e], at(dpath, e));
  }
  return m;
}

RVector rvector_from_json(const Json &j, const std::string &path)
{
  const Json &a = array(j, path);
  RVector v(as_index(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    v(as_index(i)) = number(a[i], at(path, i));
  }
  return v;
}

Json to_json(const LieBasis &b)
{
  Json gens = Json::array();
  for (const CMatrix &g : b.generators)
  {
    gens.push_back(to_json(g));
  }
  return Json{{"name", b.name}, {"local_dim", b.local_dim}, {"rank", b.rank}, {"generators", std::move(gens)}};
}

LieBasis lie_basis_from_json(const Json &j, const std::string &path)
{
  LieBasis b;
  b.name = string(field(j, "name", path), at(path, "name"));
  b.local_dim = count(field(j, "local_dim", path), at(path, "local_dim"));
  b.rank = count(field(j, "rank", path), at(path, "rank"));
  const std::string gpath = at(path, "generators");
  const Json &gens = array(field(j, "generators", path), gpath);
  for (std::size_t i = 0; i < gens.size(); ++i)
  {
    b.generators.push_back(cmatrix_from_json(gens[i], at(gpath, i)));
  }
  return b;
}

Json to_json(const CartanWeylBasis &cw)
{
  Json charges = Json::array();
  for (const CMatrix &q : cw.charges)
  {
    charges.push_back(to_json(q));
  }
  Json ladders = Json::array();
  for (const LadderPair &lp : cw.ladders)
  {
    ladders.push_back(Json{{"raising", to_json(lp.raising)}, {"lowering", to_json(lp.lowering)}, {"root", to_json(lp.root)}});
  }
  return Json{{"charges", std::move(charges)}, {"ladders", std::move(ladders)}, {"provenance", to_json(cw.provenance)}};
}

CartanWeylBasis cartan_weyl_from_json(const Json &j, const std::string &path)
{
  CartanWeylBasis cw;
  const std::string cpath = at(path, "charges");
  const Json &charges = array(field(j, "charges", path), cpath);
  for (std::size_t i = 0; i < charges.size(); ++i)
  {
    cw.charges.push_back(cmatrix_from_json(charges[i], at(cpath, i)));
  }
  const std::string lpath = at(path, "ladders");
  const Json &ladders = array(field(j, "ladders", path), lpath);
  for (std::size_t i = 0; i < ladders.size(); ++i)
  {
    const std::string p = at(lpath, i);
    LadderPair lp;
    lp.raising = cmatrix_from_json(field(ladders[i], "raising", p), at(p, "raising"));
    lp.lowering = cmatrix_from_json(field(ladders[i], "lowering", p), at(p, "lowering"));
    lp.root = rvector_from_json(field(ladders[i], "root", p), at(p, "root"));
    cw.ladders.push_back(std::move(lp));
  }
  cw.provenance = cmatrix_from_json(field(j, "provenance", path), at(path, "provenance"));
  return cw;
}

Json to_json(const PreferredBasis &pb)
{
  Json j = header("preferred_basis");
  j["algebra"] = pb.algebra;
  j["local_dim"] = pb.local_dim;
  j["rank"] = pb.rank;
  j["method"] = pb.method;
  j["choice"] = pb.choice;
  Json bases = Json::array();
  for (const CartanWeylBasis &cw : pb.cw_bases)
  {
    bases.push_back(to_json(cw));
  }
  j["cw_bases"] = std::move(bases);
  return j;
}

PreferredBasis preferred_basis_from_json(const Json &j)
{
  document(j, "preferred_basis");
  PreferredBasis pb;
  pb.algebra = string(field(j, "algebra", ""), "/algebra");
  pb.local_dim = count(field(j, "local_dim", ""), "/local_dim");
  pb.rank = count(field(j, "rank", ""), "/rank");
  pb.method = string(field(j, "method", ""), "/method");
  pb.choice = string(field(j, "choice", ""), "/choice");
  const Json &bases = array(field(j, "cw_bases", ""), "/cw_bases");
  for (std::size_t i = 0; i < bases.size(); ++i)
  {
    pb.cw_bases.push_back(cartan_weyl_from_json(bases[i], at("/cw_bases", i)));
    const CartanWeylBasis &cw = pb.cw_bases.back();
    for (std::size_t q = 0; q < cw.charges.size(); ++q)
    {
      if (std::size_t(cw.charges[q].rows()) != pb.local_dim || std::size_t(cw.charges[q].cols()) != pb.local_dim)
      {
        throw SchemaError(at(at(at("/cw_bases", i), "charges"), q), "charge is not local_dim x local_dim");
      }
    }
  }
  flatten(pb);
  return pb;
}

Json to_json(const CouplingSolution &s)
{
  Json j = header("coupling_solution");
  j["constraint_matrix"] = to_json(s.constraint_matrix);
  Json basis = Json::array();
  for (const RVector &v : s.nullspace_basis)
  {
    basis.push_back(to_json(v));
  }
  j["nullspace_basis"] = std::move(basis);
  j["nullspace_dim"] = s.nullspace_dim();
  j["chosen"] = to_json(s.chosen);
  return j;
}

CouplingSolution coupling_solution_from_json(const Json &j)
{
  document(j, "coupling_solution");
  CouplingSolution s;
  s.constraint_matrix = rmatrix_from_json(field(j, "constraint_matrix", ""), "/constraint_matrix");
  const Json &basis = array(field(j, "nullspace_basis", ""), "/nullspace_basis");
  for (std::size_t i = 0; i < basis.size(); ++i)
  {
    s.nullspace_basis.push_back(rvector_from_json(basis[i], at("/nullspace_basis", i)));
  }
  s.chosen = rvector_from_json(field(j, "chosen", ""), "/chosen");
  return s;
}

Json to_json(const LatticeSpec &l)
{
  Json edges = Json::array();
  for (const Edge &e : l.edges)
  {
    edges.push_back(Json{{"i", e.i}, {"j", e.j}, {"weight", e.weight}});
  }
  Json groups = Json::array();
  for (const SiteGroup &g : l.k_body_groups)
  {
    groups.push_back(Json{{"sites", g.sites}, {"weight", g.weight}});
  }
  return Json{{"n_sites", l.n_sites}, {"edges", std::move(edges)}, {"k_body_groups", std::move(groups)}, {"geometry", l.geometry}};
}

LatticeSpec lattice_from_json(const Json &j, const std::string &path)
{
  LatticeSpec l;
  l.n_sites = count(field(j, "n_sites", path), at(path, "n_sites"));
  if (const Json *g = optional_field(j, "geometry", path))
  {
    l.geometry = string(*g, at(path, "geometry"));
  }
  if (const Json *edges = optional_field(j, "edges", path))
  {
    const std::string epath = at(path, "edges");
    array(*edges, epath);
    for (std::size_t e = 0; e < edges->size(); ++e)
    {
      const Json &x = (*edges)[e];
      const std::string p = at(epath, e);
      Edge edge;
      edge.i = count(field(x, "i", p), at(p, "i"));
      edge.j = count(field(x, "j", p), at(p, "j"));
      if (const Json *w = optional_field(x, "weight", p))
      {
        edge.weight = number(*w, at(p, "weight"));
      }
      for (const auto &[name, site] : {std::pair<const char *, std::size_t>{"i", edge.i}, {"j", edge.j}})
      {
        if (site < 1 || site > l.n_sites)
        {
          throw SchemaError(at(p, name), "site " + std::to_string(site) + " outside [1, " + std::to_string(l.n_sites) + "]");
        }
      }
      if (edge.i == edge.j)
      {
        throw SchemaError(p, "self-edge");
      }
      l.edges.push_back(edge);
    }
  }
  if (const Json *groups = optional_field(j, "k_body_groups", path))
  {
    const std::string gpath = at(path, "k_body_groups");
    array(*groups, gpath);
    for (std::size_t g = 0; g < groups->size(); ++g)
    {
      const std::string p = at(gpath, g);
      SiteGroup group;
      group.sites = sites_from_json(field((*groups)[g], "sites", p), at(p, "sites"));
      if (const Json *w = optional_field((*groups)[g], "weight", p))
      {
        group.weight = number(*w, at(p, "weight"));
      }
      l.k_body_groups.push_back(std::move(group));
    }
  }
  try
  {
    validate_lattice(l);
  }
  catch (const std::invalid_argument &e)
  {
    throw SchemaError(path.empty() ? "/" : path, e.what());
  }
  return l;
}

Json to_json(const HamiltonianTerm &t)
{
  return Json{{"sites", t.sites}, {"matrix", to_json(t.matrix)}, {"couplings", t.couplings}};
}

HamiltonianTerm term_from_json(const Json &j, const std::string &path)
{
  HamiltonianTerm t;
  t.sites = sites_from_json(field(j, "sites", path), at(path, "sites"));
  t.matrix = cmatrix_from_json(field(j, "matrix", path), at(path, "matrix"));
  if (const Json *c = optional_field(j, "couplings", path))
  {
    const RVector v = rvector_from_json(*c, at(path, "couplings"));
    t.couplings.assign(v.data(), v.data() + v.size());
  }
  return t;
}

Json to_json(const GlobalHamiltonian &h)
{
  Json j = header("global_hamiltonian");
  j["algebra"] = h.algebra;
  j["local_dim"] = h.local_dim;
  j["lattice"] = to_json(h.lattice);
  j["coupling"] = to_json(h.coupling);
  j["conservation_residual"] = h.conservation_residual;
  j["matrix"] = to_json(h.matrix);
  return j;
}

GlobalHamiltonian global_hamiltonian_from_json(const Json &j)
{
  document(j, "global_hamiltonian");
  GlobalHamiltonian h;
  h.algebra = string(field(j, "algebra", ""), "/algebra");
  h.local_dim = count(field(j, "local_dim", ""), "/local_dim");
  h.lattice = lattice_from_json(field(j, "lattice", ""), "/lattice");
  h.coupling = rvector_from_json(field(j, "coupling", ""), "/coupling");
  h.conservation_residual = number(field(j, "conservation_residual", ""), "/conservation_residual");
  h.matrix = cmatrix_from_json(field(j, "matrix", ""), "/matrix");
  std::size_t dim = 0;
  try
  {
    dim = hilbert_dimension(h.local_dim, h.lattice.n_sites);
  }
  catch (const std::overflow_error &)
  {
    throw SchemaError("/matrix", "local_dim^n_sites overflows");
  }
  if (std::size_t(h.matrix.rows()) != dim || std::size_t(h.matrix.cols()) != dim)
  {
    throw SchemaError("/matrix", "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  }
  return h;
}

Json to_json(const VerificationReport &r)
{
  return Json{{"name", r.name}, {"pass", r.pass}, {"residual", r.residual}, {"threshold", r.threshold}, {"context", r.context}};
}

Json to_json(const SectorSpectrum &s)
{
  return Json{{"sector", s.label}, {"label_names", s.label_names}, {"levels", s.levels}, {"dimension", s.dimension}};
}

Json to_json(const GapStatistics &g)
{
  return Json{{"estimator", "r"},        {"mean_r", g.mean_r},     {"n_gaps", g.n_gaps},
              {"n_ratios", g.n_ratios},  {"verdict", to_string(g.verdict)}, {"histogram", g.histogram}};
}

} // namespace ncharge
