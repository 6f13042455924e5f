#ifndef NCHARGE_IO_HPP
#define NCHARGE_IO_HPP

#include "ncharge/spectral.hpp"
#include "ncharge/verification.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ncharge
{

using Json = nlohmann::json;

inline constexpr const char *kSchemaVersion = "1";

/// Malformed or schema-violating input. `where` is "line L, column C" for syntax errors or a
/// JSON pointer ("/lattice/edges/2/i") for field errors.
class SchemaError : public std::runtime_error
{
public:
  SchemaError(const std::string &where, const std::string &message)
      : std::runtime_error(where + ": " + message), m_where(where)
  {
  }
  const std::string &where() const { return m_where; }

private:
  std::string m_where;
};

/// Parses text, mapping syntax errors to SchemaError with line and column.
Json parse_json(const std::string &text);
Json read_json_file(const std::string &path);
/// Compact dump with a trailing newline; key order is sorted, so output is deterministic.
std::string dump_json(const Json &j);

// Encoders. Top-level documents carry schema_version and kind.
Json to_json(const CMatrix &m);
Json to_json(const RMatrix &m);
Json to_json(const RVector &v);
Json to_json(const LieBasis &b);
Json to_json(const CartanWeylBasis &cw);
Json to_json(const PreferredBasis &pb);
Json to_json(const CouplingSolution &s);
Json to_json(const LatticeSpec &l);
Json to_json(const HamiltonianTerm &t);
Json to_json(const GlobalHamiltonian &h);
Json to_json(const VerificationReport &r);
Json to_json(const SectorSpectrum &s);
Json to_json(const GapStatistics &g);

// Decoders; `path` is the JSON pointer of j used in error messages.
CMatrix cmatrix_from_json(const Json &j, const std::string &path = "");
RMatrix rmatrix_from_json(const Json &j, const std::string &path = "");
RVector rvector_from_json(const Json &j, const std::string &path = "");
LieBasis lie_basis_from_json(const Json &j, const std::string &path = "");
CartanWeylBasis cartan_weyl_from_json(const Json &j, const std::string &path = "");
PreferredBasis preferred_basis_from_json(const Json &j);
CouplingSolution coupling_solution_from_json(const Json &j);
LatticeSpec lattice_from_json(const Json &j, const std::string &path = "");
HamiltonianTerm term_from_json(const Json &j, const std::string &path = "");
GlobalHamiltonian global_hamiltonian_from_json(const Json &j);

namespace schema
{

const Json &field(const Json &j, const std::string &key, const std::string &path);
const Json *optional_field(const Json &j, const std::string &key, const std::string &path);
double number(const Json &j, const std::string &path);
std::size_t count(const Json &j, const std::string &path);
long integer(const Json &j, const std::string &path);
bool boolean(const Json &j, const std::string &path);
std::string string(const Json &j, const std::string &path);
const Json &array(const Json &j, const std::string &path);
/// Checks schema_version and kind of a top-level document.
void document(const Json &j, const std::string &kind);

} // namespace schema

} // namespace ncharge

#endif // NCHARGE_IO_HPP
