#ifndef AA_ABSDOMAIN_HPP
#define AA_ABSDOMAIN_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "aa/ir.hpp"

namespace aa {

enum class Abstraction { Tba, Asb };

enum class AnalysisCode {
  UnsupportedExpr,
  MethodNotInHierarchy,
  NonTermination,
  PathBudgetExceeded,
  NullDereference,
  UseBeforeDefine,
};

struct AnalysisError : std::runtime_error {
  AnalysisError(AnalysisCode code, const std::string& msg)
      : std::runtime_error(msg), code(code) {}
  AnalysisCode code;
};

/// Kinds of abstract names (normalized access expressions).
/// AddrType/TypeField belong to the type-based abstraction; AddrObj,
/// AddrSite, ObjField and SiteField to the allocation-site-based one.
enum class NameKind : uint8_t {
  Var,        // x
  AddrVar,    // &x, x a pointer variable
  AddrObj,    // &a, a an object variable (asb)
  AddrType,   // &T (tba)
  AddrSite,   // &n05 (asb)
  TypeField,  // T.f (tba)
  ObjField,   // a.f (asb)
  SiteField,  // n05.f (asb)
};

using NameId = uint32_t;

struct NameData {
  NameKind kind;
  std::string base;   // variable, class, or site id
  std::string field;  // TypeField / ObjField / SiteField
};

/// Interns abstract names so equality is an id comparison and rendering is
/// canonical: x, &x, &X, &n05, X.f, n05.f, a.f.
class NameTable {
 public:
  NameId intern(NameKind kind, const std::string& base,
                const std::string& field = "");
  const NameData& data(NameId id) const { return names_[id]; }
  NameKind kind(NameId id) const { return names_[id].kind; }
  const std::string& text(NameId id) const { return texts_[id]; }
  size_t size() const { return names_.size(); }

  bool isAddressForm(NameId id) const;
  /// Class named by an address-of-object name, empty otherwise.
  std::string objectClass(NameId id, const ProgramIR& p) const;

  static std::string render(NameKind kind, const std::string& base,
                            const std::string& field);

 private:
  std::vector<NameData> names_;
  std::vector<std::string> texts_;
  std::unordered_map<std::string, NameId> byText_;
};

/// Symmetric alias relation stored as generated pairs; reflexive pairs are
/// never stored. Transitive closure is maintained incrementally as a
/// union-find over the stored pairs, so closure membership is near-constant.
class AliasRel {
 public:
  bool add(NameId a, NameId b);  // returns true when the pair is new
  bool contains(NameId a, NameId b) const;
  bool empty() const { return edgeCount_ == 0; }
  size_t pairCount() const { return edgeCount_; }
  void unionWith(const AliasRel& o);
  bool operator==(const AliasRel& o) const { return adj_ == o.adj_; }

  /// True when the two names are connected (reflexively included).
  bool connected(NameId a, NameId b) const;
  /// Canonical component representative; the name itself when isolated.
  NameId rootOf(NameId n) const;

  /// Reflexive-transitive closure of the seed set within this relation.
  std::set<NameId> closureOf(const std::set<NameId>& seeds) const;
  std::set<NameId> closureOf(NameId seed) const;

  /// All stored pairs, normalized with first <= second.
  std::vector<std::pair<NameId, NameId>> pairs() const;
  /// Pairs of the transitive closure (normalized, no reflexive pairs).
  std::vector<std::pair<NameId, NameId>> closurePairs() const;

  const std::map<NameId, std::set<NameId>>& adjacency() const { return adj_; }

 private:
  std::map<NameId, std::set<NameId>> adj_;
  // union-find over names that occur in pairs; roots carry a member list
  mutable std::map<NameId, NameId> parent_;
  std::map<NameId, std::vector<NameId>> members_;
  size_t edgeCount_ = 0;
};

/// A set of demanded abstract names; `universal` models the exhaustive
/// variant's bottom demand (every name demanded).
class DemandSet {
 public:
  static DemandSet universalSet();

  bool insert(NameId id);
  void unionWith(const DemandSet& o);
  bool contains(NameId id) const { return universal_ || ids_.count(id) > 0; }
  /// Overloaded subset test from the equations: S nonempty and S included.
  bool containsAllNonempty(const std::set<NameId>& s) const;
  /// Some name of S is demanded. This is the firing guard: with several
  /// abstract names for one expression, a single demanded one suffices.
  bool containsAny(const std::set<NameId>& s) const;
  bool isUniversal() const { return universal_; }
  bool empty() const { return !universal_ && ids_.empty(); }
  size_t size() const { return ids_.size(); }
  const std::set<NameId>& ids() const { return ids_; }
  bool operator==(const DemandSet& o) const = default;

 private:
  std::set<NameId> ids_;
  bool universal_ = false;
};

struct NodeState {
  DemandSet din, dout;
  AliasRel ain, aout;
  bool operator==(const NodeState& o) const = default;
};

/// Record of objects touched by statements the analysis found relevant;
/// refines the type-based abstraction (tba only).
struct ObjectStore {
  std::set<std::string> objects;
  bool enabled = false;
  bool contains(const std::string& obj) const {
    return objects.count(obj) > 0;
  }
};

/// Pointers that appear as the base of an indirect store anywhere.
struct UsedPointerStore {
  std::set<std::string> vars;
  bool enabled = false;
};

/// A(X): names reachable from X through the relation, X included.
std::set<NameId> alias_closure(const AliasRel& rel,
                               const std::set<NameId>& seeds);

struct AbsNameCtx {
  const ProgramIR& program;
  Abstraction abstraction;
  NameTable& names;
  const ObjectStore* store = nullptr;  // gate &a / a.f when enabled (tba)
};

/// absName(a, A) of Table 1 (C++ grammar) and its Java variant: the set of
/// abstract names denoting the expression under the chosen heap abstraction.
std::set<NameId> abs_name(const AccessExpr& a, const AliasRel& rel,
                          const AbsNameCtx& ctx);

/// Restrict (componentwise): keep pairs whose first element is demanded.
std::vector<std::pair<NameId, NameId>> restrict_pairs(
    const std::vector<std::pair<NameId, NameId>>& pairs, const DemandSet& d);

/// Restrict over the symmetric closure of an alias relation; output pairs
/// are oriented demanded-name-first.
std::set<std::pair<NameId, NameId>> restrict_rel(const AliasRel& rel,
                                                 const DemandSet& d);

/// Names in the closure of `seed` that are address forms (its points-to set).
std::set<NameId> pointee_names(const AliasRel& rel, NameId seed,
                               const NameTable& names);

}  // namespace aa

#endif
