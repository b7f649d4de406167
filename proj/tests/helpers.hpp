#ifndef AA_TEST_HELPERS_HPP
#define AA_TEST_HELPERS_HPP

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "aa/absdomain.hpp"
#include "aa/ir.hpp"
#include "aa/solver.hpp"

namespace aatest {

inline std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string fixturePath(const std::string& name) {
  return std::string(AA_FIXTURE_DIR) + "/" + name;
}

inline aa::ProgramIR loadFixture(const std::string& name) {
  return aa::parse_program(readFile(fixturePath(name)));
}

inline std::set<std::string> names(const std::set<aa::NameId>& ids,
                                   const aa::NameTable& t) {
  std::set<std::string> out;
  for (auto id : ids) out.insert(t.text(id));
  return out;
}

inline std::set<std::string> demandNames(const aa::DemandSet& d,
                                         const aa::NameTable& t) {
  return names(d.ids(), t);
}

// Pointee names (address forms) of a variable in a state's alias closure.
inline std::set<std::string> pointeesOf(const std::string& var,
                                        const aa::AliasRel& rel,
                                        aa::NameTable& t) {
  std::set<std::string> out;
  aa::NameId v = t.intern(aa::NameKind::Var, var);
  for (auto n : rel.closureOf(v))
    if (t.isAddressForm(n)) out.insert(t.text(n));
  return out;
}

inline std::set<std::pair<std::string, std::string>> closureTextPairs(
    const aa::AliasRel& rel, const aa::NameTable& t) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : rel.closurePairs()) {
    std::string x = t.text(a), y = t.text(b);
    if (y < x) std::swap(x, y);
    out.emplace(x, y);
  }
  return out;
}

}  // namespace aatest

#endif
