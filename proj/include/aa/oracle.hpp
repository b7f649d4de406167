#ifndef AA_ORACLE_HPP
#define AA_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aa/solver.hpp"

namespace aa {

/// One occurrence of a node on an underlying walk: a forward prefix from
/// Start to the entry of the pivot occurrence, and a backward suffix from
/// its exit to End.
struct QualifiedPath {
  std::vector<std::string> forward;   // Start ... pred(pivot)
  std::string pivot;
  std::vector<std::string> backward;  // succ(pivot) ... End

  std::vector<std::string> occurrences() const;
  std::string render() const;
};

struct PathLimits {
  size_t maxLen = 64;     // max statements on the underlying walk
  size_t maxPaths = 20000;
};

/// All qualified paths through `pivot` in a single-function program whose
/// underlying walk has at most maxLen nodes. Complete for acyclic CFGs when
/// maxLen is at least the longest walk.
std::vector<QualifiedPath> enumerate_paths(const ProgramIR& p,
                                           const std::string& pivot,
                                           const PathLimits& limits);

/// Per-path evaluation of the flow functions along the occurrence sequence
/// (single pred/succ, no merges) to a local fixed point; the pivot
/// occurrence's state is returned.
NodeState mop_along_path(const ProgramIR& p, const QualifiedPath& path,
                         VariantConfig cfg, NameTable& names);

/// Union over the enumerated paths of the per-path pivot states: the MoP at
/// a node (exact on acyclic CFGs with full enumeration).
NodeState mop_meet(const ProgramIR& p, const std::string& pivot,
                   VariantConfig cfg, const PathLimits& limits,
                   NameTable& names);

struct Violation {
  std::string check;
  std::string node;
  std::string witness;
  std::string expected;
  std::string actual;
};

struct OracleReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  std::string toJson() const;
};

/// MFP soundly over-approximates every enumerated per-path value.
OracleReport check_mfp_vs_mop(const ProgramIR& p, VariantConfig cfg,
                              const PathLimits& limits);

/// Concrete execution of a straight-line program. Locations are numbered in
/// allocation order; `values[i][j]` is the location denoted by pool[j] just
/// after executing the i-th statement (0 when undefined).
struct ConcreteRun {
  std::vector<AccessExpr> pool;
  std::vector<std::string> nodeOrder;
  std::vector<std::vector<uint32_t>> values;
  std::vector<uint32_t> heapAllocOrder;
  std::set<uint32_t> objectLocs;  // object locations (stack and heap)

  std::vector<std::pair<std::string, std::string>> aliasPairsAt(
      size_t step) const;
};

ConcreteRun run_concrete(const ProgramIR& p);

/// Theorem 6.2 at single-path scale: every concrete alias of a demanded
/// expression is covered by the analysis aliases.
OracleReport check_soundness(const ProgramIR& p, VariantConfig cfg);

/// True when the program is one function whose labeled statements form a
/// single chain of assignments, skips, and virtual calls.
bool is_straight_line(const ProgramIR& p);

std::string render_names(const std::set<NameId>& ids, const NameTable& names);

}  // namespace aa

#endif
