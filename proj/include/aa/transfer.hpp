#ifndef AA_TRANSFER_HPP
#define AA_TRANSFER_HPP

#include <optional>

#include "aa/absdomain.hpp"
#include "aa/ir.hpp"

namespace aa {

enum class Variant { Id, Cd, Ex, Jd };

const char* variant_name(Variant v);
const char* abstraction_name(Abstraction a);

struct VariantConfig {
  Variant variant = Variant::Id;
  Abstraction abstraction = Abstraction::Tba;
  bool useObjectStore = false;
  bool useUsedPointerStore = false;
  // Test knob: suppresses all address-of demand raising (the improved
  // speculation), turning Id into a deliberately unsound mutant.
  bool disableAddrSpeculation = false;
};

struct TransferCtx {
  const ProgramIR& program;
  VariantConfig cfg;
  NameTable& names;
  ObjectStore* objectStore = nullptr;        // grows while solving
  const UsedPointerStore* usedPointers = nullptr;

  AbsNameCtx absCtx() const {
    return AbsNameCtx{program, cfg.abstraction, names,
                      objectStore && objectStore->enabled ? objectStore
                                                          : nullptr};
  }
};

/// Dkill (Eq 4): the demand for x is killed only at x = r.
std::set<NameId> d_kill(const Statement& st, const TransferCtx& ctx);

/// addrExpr: {&x | x in var(a), addrTaken(x)} as abstract names.
std::set<NameId> addr_expr(const AccessExpr& a, const TransferCtx& ctx);

/// LDgen (Eq 5, with the Cd/Jd modifications of Section 7).
std::set<NameId> ld_gen(const AccessExpr& r, const AliasRel& ain,
                        const TransferCtx& ctx);

/// RDgen (Eq 6 and the Jd modification).
std::set<NameId> rd_gen(const AccessExpr& l, const TransferCtx& ctx);

struct DemandGen {
  std::set<NameId> gen;
  bool fired = false;            // some Dgen case applied
  bool cdStoreCondition = false; // Cd store speculation observed this visit
  bool cdLoadCondition = false;  // Cd load speculation observed this visit
};

/// Dgen (Eq 3), including the origin clause for virtual calls and, for Cd,
/// the conventional base-of speculation at indirect stores and loads. The
/// latches are the node's monotone speculation state kept by the solver.
DemandGen d_gen(const Statement& st, const DemandSet& dout,
                const AliasRel& ain, const TransferCtx& ctx,
                bool cdStoreLatched, bool cdLoadLatched,
                const std::set<NameId>* demandClosure = nullptr);

/// Conventional speculation kill: at *x = r, variable demands that the store
/// could define (address-taken, type-compatible) are dropped.
bool cd_may_define(const Statement& st, NameId demand, const TransferCtx& ctx);
/// A demand the indirect load on the right side could read.
bool cd_may_read(const AccessExpr& rhs, NameId demand, const TransferCtx& ctx);
std::set<NameId> d_kill_cd(const Statement& st, const DemandSet& dout,
                           const TransferCtx& ctx);

struct AliasGen {
  std::vector<std::pair<NameId, NameId>> pairs;
  bool fired = false;
};

/// Agen (Eq 10): l-bar x r-bar when the left side is demanded, the right
/// side is demanded, or the right side already has an alias. Allocations
/// fire only on a demanded left side.
AliasGen a_gen(const Statement& st, const DemandSet& dout, const AliasRel& ain,
               const TransferCtx& ctx,
               const std::set<NameId>* demandClosure = nullptr);

/// Akill (Eq 11): at x = r every pair involving x dies; weak update
/// otherwise, and also when the right side may read x itself. Returns the
/// killed variable's name when applicable.
std::optional<NameId> a_kill_var(const Statement& st, const TransferCtx& ctx);
std::optional<NameId> a_kill_var(const Statement& st, const TransferCtx& ctx,
                                 const AliasRel& ain);

/// Aout = (Ain - Akill) U Agen over the internally-closed relation: killing
/// x removes its pairs but not the connections that ran through it, so the
/// killed vertex's neighbors are bridged pairwise first.
AliasRel a_apply(const AliasRel& ain, const std::optional<NameId>& killedVar,
                 const std::vector<std::pair<NameId, NameId>>& gen);

/// Objects mentioned syntactically by a statement (&a, a.f positions).
std::set<std::string> mentioned_objects(const Statement& st,
                                        const ProgramIR& p);

/// Validates a program for the given variant; throws AnalysisError on a
/// flagged construct (object-copy deref, jd on pointer syntax).
void validate_for_variant(const ProgramIR& p, const VariantConfig& cfg);

UsedPointerStore collect_used_pointers(const ProgramIR& p);

}  // namespace aa

#endif
