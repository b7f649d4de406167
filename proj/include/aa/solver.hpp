#ifndef AA_SOLVER_HPP
#define AA_SOLVER_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aa/absdomain.hpp"
#include "aa/ir.hpp"
#include "aa/transfer.hpp"

namespace aa {

enum class WorklistOrder { Fifo, Lifo, Shuffled };

struct SolveOptions {
  bool trace = false;
  WorklistOrder order = WorklistOrder::Fifo;
  uint64_t shuffleSeed = 0;
  // Multiplies the default iteration budget of
  // 64 * |nodes| * |abstract-name universe|.
  double budgetFactor = 1.0;
};

struct SolveCounters {
  size_t demandVisits = 0;
  size_t aliasVisits = 0;
  size_t demandPasses = 0;
  size_t aliasPasses = 0;
  size_t rounds = 0;
  size_t nodeVisits() const { return demandVisits + aliasVisits; }
};

/// One alternation round's newly appearing facts at the point after each
/// node, rendered canonically (matches the appendix round tables).
struct TraceCell {
  std::vector<std::string> demand;
  std::vector<std::string> ptg;
};
using TraceRound = std::map<std::string, TraceCell>;

struct SolveResult {
  VariantConfig cfg;
  std::map<std::string, NodeState> states;
  std::map<std::string, std::set<std::string>> callGraph;
  SolveCounters counters;
  ObjectStore objectStore;
  UsedPointerStore usedPointers;
  std::set<std::string> cdStoreLatch;  // Cd store speculation, per node
  std::set<std::string> cdLoadLatch;   // Cd load speculation, per node
  std::vector<TraceRound> rounds;     // only when tracing
  NameTable names;
  Supergraph graph;

  const NodeState& at(const std::string& node) const;
};

class Solver {
 public:
  Solver(const ProgramIR& program, VariantConfig cfg, SolveOptions opts = {});
  SolveResult run();

 private:
  struct Impl;
  const ProgramIR& program_;
  VariantConfig cfg_;
  SolveOptions opts_;
};

SolveResult solve(const ProgramIR& p, VariantConfig cfg,
                  SolveOptions opts = {});
/// Exhaustive analysis: the alias half of the solve with every demand
/// treated as universal.
SolveResult solve_ex(const ProgramIR& p, Abstraction abstraction,
                     SolveOptions opts = {});

/// Potential callees of a virtual call from the receiver's pointee types,
/// each mapped to the most-derived definition at or above that type.
std::set<std::string> resolve_virtual(const std::string& callId,
                                      const AliasRel& ain,
                                      const ProgramIR& p, NameTable& names);

/// Re-applies every node's transfer functions to the final states; any
/// change indicates the solve did not reach a fixed point.
bool fixed_point_sweep_clean(const ProgramIR& p, SolveResult& r);

/// Every virtual call's receiver is demanded at the call.
bool demand_origination_holds(const ProgramIR& p, SolveResult& r);

/// Points-to rendering "x->Y" of pairs (x, &Y) in the closure of a relation.
std::vector<std::string> ptg_edges(const AliasRel& rel, const NameTable& names);

std::string render_trace(const ProgramIR& p, const SolveResult& r);

}  // namespace aa

#endif
