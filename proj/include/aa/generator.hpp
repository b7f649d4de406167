#ifndef AA_GENERATOR_HPP
#define AA_GENERATOR_HPP

#include <cstdint>
#include <string>

#include "aa/ir.hpp"

namespace aa {

enum class GenShape { StraightLine, Acyclic, General };

struct GenParams {
  int statements = 15;
  int classes = 3;
  int maxPtrLevel = 2;  // 1 disables handle variables and *stores
  int vcalls = 1;
  int objectVars = 2;
  int pointerVars = 6;
  int handleVars = 2;
  GenShape shape = GenShape::StraightLine;
  Lang lang = Lang::Cpp;
  // variables are partitioned into this many locality regions; statements
  // only combine variables of their region (models real-program locality)
  int regions = 1;
};

/// Deterministically generates a well-typed IR program for the given seed.
std::string generate_program(const GenParams& params, uint64_t seed);

/// Generates a program whose concrete execution is defined (straight-line
/// shapes only): retries derived seeds until run_concrete succeeds.
ProgramIR generate_runnable(const GenParams& params, uint64_t seed,
                            int maxTries = 64);

}  // namespace aa

#endif
