#ifndef AA_CHECKS_HPP
#define AA_CHECKS_HPP

#include "aa/oracle.hpp"

namespace aa {

/// Canonical text form of a node state; name ids are not comparable across
/// solves, rendered text is.
struct TextState {
  bool universalDin = false, universalDout = false;
  std::set<std::string> din, dout;
  std::set<std::pair<std::string, std::string>> ain, aout;  // closure pairs
};

TextState text_state(const NodeState& ns, const NameTable& names);

/// Lemma "Ex within Id" direction: at every node the exhaustive aliases
/// contain the demand-driven ones.
OracleReport check_alias_containment(const ProgramIR& p, Abstraction abs,
                                     Variant smaller = Variant::Id);

/// Equiprecision of Cd and Ex: Restrict(A_Ex, D_Cd) = Restrict(A_Cd, D_Cd)
/// componentwise at every node.
OracleReport check_equiprecision(const ProgramIR& p, Abstraction abs);

/// Three worklist extraction orders produce identical final states.
OracleReport check_order_independence(const ProgramIR& p, VariantConfig cfg,
                                      uint64_t seed = 7);

/// Post-solve transfer sweep is a no-op and every virtual-call receiver is
/// demanded at its call.
OracleReport check_fixed_point_and_origination(const ProgramIR& p,
                                               VariantConfig cfg);

/// Full verification suite for one program (used by the verify command).
OracleReport verify_program(const ProgramIR& p, Abstraction abs,
                            const PathLimits& limits,
                            bool disableAddrSpeculation = false);

}  // namespace aa

#endif
