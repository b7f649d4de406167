#ifndef AA_DEVIRT_HPP
#define AA_DEVIRT_HPP

#include <map>
#include <set>
#include <string>

#include "aa/solver.hpp"

namespace aa {

struct CallResolution {
  std::set<std::string> callees;
  bool monomorphic = false;
  bool fallback = false;  // receiver unresolved; class-hierarchy answer
};

struct DevirtReport {
  std::string program;
  Variant variant;
  Abstraction abstraction;
  std::map<std::string, CallResolution> perCall;
  size_t monomorphicCount = 0;
  size_t virtualEdgeCount = 0;
  size_t classTypeCount = 0;
  size_t nodes = 0;
  size_t visits = 0;
  double millis = 0.0;

  std::string toJson() const;
  std::string toText() const;
};

/// Resolves every origin call from the final alias information; calls whose
/// receiver never resolved fall back to the class hierarchy and are flagged.
DevirtReport devirtualize(SolveResult& result, const ProgramIR& p,
                          const std::string& programName = "");

/// Count of distinct (pointer expression, class type) pairs in the final
/// alias closures; demanded expressions only for the demand-driven variants,
/// pointer-variable pointees excluded.
size_t class_type_metric(SolveResult& result, const ProgramIR& p);

}  // namespace aa

#endif
