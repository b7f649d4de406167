#ifndef AA_REPORT_HPP
#define AA_REPORT_HPP

#include <string>

#include "aa/devirt.hpp"
#include "aa/solver.hpp"

namespace aa {

/// Per-node Din/Dout/Ain/Aout rendering with sorted sets and pairs.
std::string render_states_text(const ProgramIR& p, SolveResult& r);
std::string render_states_json(const ProgramIR& p, SolveResult& r,
                               const DevirtReport& devirt);

std::string render_name_set(const DemandSet& d, const NameTable& names);
std::string render_pair_set(const AliasRel& rel, const NameTable& names);

}  // namespace aa

#endif
