#include "aa/absdomain.hpp"

#include <algorithm>
#include <deque>

namespace aa {

std::string NameTable::render(NameKind kind, const std::string& base,
                              const std::string& field) {
  switch (kind) {
    case NameKind::Var: return base;
    case NameKind::AddrVar:
    case NameKind::AddrObj:
    case NameKind::AddrType:
    case NameKind::AddrSite: return "&" + base;
    case NameKind::TypeField:
    case NameKind::ObjField:
    case NameKind::SiteField: return base + "." + field;
  }
  return "?";
}

NameId NameTable::intern(NameKind kind, const std::string& base,
                         const std::string& field) {
  std::string key = std::to_string(static_cast<int>(kind)) + "|" + base + "|" +
                    field;
  auto it = byText_.find(key);
  if (it != byText_.end()) return it->second;
  NameId id = static_cast<NameId>(names_.size());
  // `base` may alias an entry of names_; materialize before growing it
  NameData data{kind, base, field};
  std::string text = render(kind, data.base, data.field);
  names_.push_back(std::move(data));
  texts_.push_back(std::move(text));
  byText_.emplace(std::move(key), id);
  return id;
}

bool NameTable::isAddressForm(NameId id) const {
  switch (kind(id)) {
    case NameKind::AddrVar:
    case NameKind::AddrObj:
    case NameKind::AddrType:
    case NameKind::AddrSite:
      return true;
    default:
      return false;
  }
}

std::string NameTable::objectClass(NameId id, const ProgramIR& p) const {
  const NameData& d = data(id);
  switch (d.kind) {
    case NameKind::AddrType:
      return d.base;
    case NameKind::AddrSite: {
      auto it = p.allocSiteType.find(d.base);
      return it == p.allocSiteType.end() ? std::string() : it->second;
    }
    case NameKind::AddrObj:
      return p.varTypes.count(d.base) ? p.varTypes.at(d.base).cls
                                      : std::string();
    default:
      return std::string();
  }
}

NameId AliasRel::rootOf(NameId n) const {
  auto it = parent_.find(n);
  if (it == parent_.end()) return n;
  // iterative find with path compression
  NameId root = n;
  while (true) {
    auto pit = parent_.find(root);
    if (pit == parent_.end() || pit->second == root) break;
    root = pit->second;
  }
  NameId cur = n;
  while (cur != root) {
    NameId next = parent_[cur];
    parent_[cur] = root;
    cur = next;
  }
  return root;
}

bool AliasRel::connected(NameId a, NameId b) const {
  return a == b || rootOf(a) == rootOf(b);
}

bool AliasRel::add(NameId a, NameId b) {
  if (a == b) return false;
  auto [it, fresh] = adj_[a].insert(b);
  if (!fresh) return false;
  adj_[b].insert(a);
  ++edgeCount_;

  NameId ra = rootOf(a), rb = rootOf(b);
  if (!parent_.count(a)) {
    parent_[a] = a;
    members_[a] = {a};
  }
  if (!parent_.count(b)) {
    parent_[b] = b;
    members_[b] = {b};
  }
  ra = rootOf(a);
  rb = rootOf(b);
  if (ra != rb) {
    // small-to-large member merge
    if (members_[ra].size() < members_[rb].size()) std::swap(ra, rb);
    parent_[rb] = ra;
    auto& big = members_[ra];
    auto& small = members_[rb];
    big.insert(big.end(), small.begin(), small.end());
    members_.erase(rb);
  }
  return true;
}

bool AliasRel::contains(NameId a, NameId b) const {
  auto it = adj_.find(a);
  return it != adj_.end() && it->second.count(b) > 0;
}

void AliasRel::unionWith(const AliasRel& o) {
  for (const auto& [a, nbrs] : o.adj_)
    for (NameId b : nbrs)
      if (a < b) add(a, b);
}

std::set<NameId> AliasRel::closureOf(const std::set<NameId>& seeds) const {
  std::set<NameId> seen = seeds;
  std::set<NameId> roots;
  for (NameId s : seeds)
    if (parent_.count(s)) roots.insert(rootOf(s));
  for (NameId r : roots) {
    auto it = members_.find(r);
    if (it != members_.end())
      seen.insert(it->second.begin(), it->second.end());
  }
  return seen;
}

std::set<NameId> AliasRel::closureOf(NameId seed) const {
  std::set<NameId> seen{seed};
  if (parent_.count(seed)) {
    auto it = members_.find(rootOf(seed));
    if (it != members_.end())
      seen.insert(it->second.begin(), it->second.end());
  }
  return seen;
}

std::vector<std::pair<NameId, NameId>> AliasRel::pairs() const {
  std::vector<std::pair<NameId, NameId>> out;
  for (const auto& [a, nbrs] : adj_)
    for (NameId b : nbrs)
      if (a <= b) out.emplace_back(a, b);
  return out;
}

std::vector<std::pair<NameId, NameId>> AliasRel::closurePairs() const {
  std::vector<std::pair<NameId, NameId>> out;
  for (const auto& [root, mem] : members_) {
    std::vector<NameId> sorted(mem.begin(), mem.end());
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
      for (size_t j = i + 1; j < sorted.size(); ++j)
        out.emplace_back(sorted[i], sorted[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DemandSet DemandSet::universalSet() {
  DemandSet d;
  d.universal_ = true;
  return d;
}

bool DemandSet::insert(NameId id) {
  if (universal_) return false;
  return ids_.insert(id).second;
}

void DemandSet::unionWith(const DemandSet& o) {
  if (o.universal_) {
    universal_ = true;
    ids_.clear();
    return;
  }
  if (universal_) return;
  ids_.insert(o.ids_.begin(), o.ids_.end());
}

bool DemandSet::containsAllNonempty(const std::set<NameId>& s) const {
  if (s.empty()) return false;
  if (universal_) return true;
  return std::all_of(s.begin(), s.end(),
                     [&](NameId id) { return ids_.count(id) > 0; });
}

bool DemandSet::containsAny(const std::set<NameId>& s) const {
  if (s.empty()) return false;
  if (universal_) return true;
  return std::any_of(s.begin(), s.end(),
                     [&](NameId id) { return ids_.count(id) > 0; });
}

std::set<NameId> alias_closure(const AliasRel& rel,
                               const std::set<NameId>& seeds) {
  return rel.closureOf(seeds);
}

namespace {

// Abstract name of &v / new for an object; gated by the object store when it
// is enabled (tba refinement, Section "object store").
std::set<NameId> objectAddressName(const std::string& objVar,
                                   const AbsNameCtx& ctx) {
  const TypeRef t = ctx.program.typeOf(objVar);
  if (ctx.store && ctx.store->enabled && !ctx.store->contains(objVar))
    return {};
  if (ctx.abstraction == Abstraction::Tba)
    return {ctx.names.intern(NameKind::AddrType, t.cls)};
  return {ctx.names.intern(NameKind::AddrObj, objVar)};
}

std::set<NameId> fieldNamesViaAliases(const std::string& ptrVar,
                                      const std::string& field,
                                      const AliasRel& rel,
                                      const AbsNameCtx& ctx) {
  std::set<NameId> out;
  NameId v = ctx.names.intern(NameKind::Var, ptrVar);
  for (NameId n : rel.closureOf(v)) {
    const NameData& d = ctx.names.data(n);
    switch (d.kind) {
      case NameKind::AddrType:
        if (ctx.program.hasFieldInHierarchy(d.base, field))
          out.insert(ctx.names.intern(NameKind::TypeField, d.base, field));
        break;
      case NameKind::AddrSite: {
        auto it = ctx.program.allocSiteType.find(d.base);
        if (it != ctx.program.allocSiteType.end() &&
            ctx.program.hasFieldInHierarchy(it->second, field))
          out.insert(ctx.names.intern(NameKind::SiteField, d.base, field));
        break;
      }
      case NameKind::AddrObj:
        if (ctx.program.hasFieldInHierarchy(
                ctx.program.typeOf(d.base).cls, field))
          out.insert(ctx.names.intern(NameKind::ObjField, d.base, field));
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace

std::set<NameId> abs_name(const AccessExpr& a, const AliasRel& rel,
                          const AbsNameCtx& ctx) {
  const ProgramIR& p = ctx.program;
  switch (a.kind) {
    case ExprKind::Var:
      return {ctx.names.intern(NameKind::Var, a.var)};
    case ExprKind::AddrOf: {
      TypeRef t = p.typeOf(a.var);
      if (t.ptr > 0) return {ctx.names.intern(NameKind::AddrVar, a.var)};
      return objectAddressName(a.var, ctx);
    }
    case ExprKind::Deref: {
      TypeRef t = p.typeOf(a.var);
      if (t.ptr == 1 && p.lang == Lang::Cpp)
        throw AnalysisError(
            AnalysisCode::UnsupportedExpr,
            "UnsupportedExpr: '*" + a.var +
                "' denotes a whole object; front ends lower object copies "
                "to per-field assignments");
      std::set<NameId> out;
      NameId v = ctx.names.intern(NameKind::Var, a.var);
      for (NameId n : rel.closureOf(v))
        if (ctx.names.kind(n) == NameKind::AddrVar)
          out.insert(ctx.names.intern(NameKind::Var,
                                      ctx.names.data(n).base));
      return out;
    }
    case ExprKind::Arrow:
      return fieldNamesViaAliases(a.var, a.field, rel, ctx);
    case ExprKind::Dot: {
      if (p.lang == Lang::Java)  // reference-field access, Table 3
        return fieldNamesViaAliases(a.var, a.field, rel, ctx);
      const TypeRef t = p.typeOf(a.var);
      if (ctx.store && ctx.store->enabled && !ctx.store->contains(a.var))
        return {};
      if (ctx.abstraction == Abstraction::Tba)
        return {ctx.names.intern(NameKind::TypeField, t.cls, a.field)};
      return {ctx.names.intern(NameKind::ObjField, a.var, a.field)};
    }
    case ExprKind::New:
      if (ctx.abstraction == Abstraction::Tba)
        return {ctx.names.intern(NameKind::AddrType, a.typeArg)};
      return {ctx.names.intern(NameKind::AddrSite, a.siteId)};
    case ExprKind::Null:
      return {};
  }
  return {};
}

std::vector<std::pair<NameId, NameId>> restrict_pairs(
    const std::vector<std::pair<NameId, NameId>>& pairs, const DemandSet& d) {
  std::vector<std::pair<NameId, NameId>> out;
  for (const auto& pr : pairs)
    if (d.contains(pr.first)) out.push_back(pr);
  return out;
}

std::set<std::pair<NameId, NameId>> restrict_rel(const AliasRel& rel,
                                                 const DemandSet& d) {
  std::set<std::pair<NameId, NameId>> out;
  for (const auto& [a, b] : rel.closurePairs()) {
    if (d.contains(a)) out.emplace(a, b);
    if (d.contains(b)) out.emplace(b, a);
  }
  return out;
}

std::set<NameId> pointee_names(const AliasRel& rel, NameId seed,
                               const NameTable& names) {
  std::set<NameId> out;
  for (NameId n : rel.closureOf(seed))
    if (names.isAddressForm(n)) out.insert(n);
  return out;
}

}  // namespace aa
