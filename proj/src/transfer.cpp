#include "aa/transfer.hpp"

#include <algorithm>

namespace aa {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Id: return "id";
    case Variant::Cd: return "cd";
    case Variant::Ex: return "ex";
    case Variant::Jd: return "jd";
  }
  return "?";
}

const char* abstraction_name(Abstraction a) {
  return a == Abstraction::Tba ? "tba" : "asb";
}

namespace {

bool addressDemandsEnabled(const TransferCtx& ctx) {
  if (ctx.cfg.disableAddrSpeculation) return false;
  return ctx.cfg.variant == Variant::Id || ctx.cfg.variant == Variant::Ex;
}

// Java reference-field access behaves like '->' in the flow equations.
bool indirectLhs(const AccessExpr& a, const ProgramIR& p) {
  if (a.kind == ExprKind::Deref || a.kind == ExprKind::Arrow) return true;
  return p.lang == Lang::Java && a.kind == ExprKind::Dot;
}

std::set<std::string> effective_base(const AccessExpr& a, const ProgramIR& p) {
  auto b = base_of(a);
  if (b.empty() && p.lang == Lang::Java && a.kind == ExprKind::Dot)
    b.insert(a.var);
  return b;
}

std::set<NameId> varNames(const std::set<std::string>& vars,
                          const TransferCtx& ctx) {
  std::set<NameId> out;
  for (const auto& v : vars) out.insert(ctx.names.intern(NameKind::Var, v));
  return out;
}

void unionInto(std::set<NameId>& dst, const std::set<NameId>& src) {
  dst.insert(src.begin(), src.end());
}

// The complete demand at a point: Dout closed under the aliases reaching the
// statement. Matching the left side against it lets a store through an
// aliased pointer serve a demand raised for the pointer itself.
// `demandRoots`, when supplied, is the set of union-find roots of the
// demanded names within `ain`, precomputed once per node visit.
bool demandedViaClosure(const std::set<NameId>& s, const DemandSet& dout,
                        const AliasRel& ain,
                        const std::set<NameId>* demandRoots) {
  if (s.empty()) return false;
  if (dout.isUniversal()) return true;
  std::set<NameId> local;
  if (!demandRoots) {
    for (NameId d : dout.ids()) local.insert(ain.rootOf(d));
    demandRoots = &local;
  }
  for (NameId id : s) {
    if (dout.contains(id)) return true;
    if (demandRoots->count(ain.rootOf(id))) return true;
  }
  return false;
}

}  // namespace

std::set<NameId> d_kill(const Statement& st, const TransferCtx& ctx) {
  if (st.kind != StmtKind::Assign || st.lhs.kind != ExprKind::Var) return {};
  return {ctx.names.intern(NameKind::Var, st.lhs.var)};
}

std::set<NameId> addr_expr(const AccessExpr& a, const TransferCtx& ctx) {
  std::set<NameId> out;
  for (const auto& x : var_of(a)) {
    if (!ctx.program.addrTakenVars.count(x)) continue;
    unionInto(out, abs_name(AccessExpr::makeAddrOf(x), AliasRel{},
                            ctx.absCtx()));
  }
  return out;
}

std::set<NameId> ld_gen(const AccessExpr& r, const AliasRel& ain,
                        const TransferCtx& ctx) {
  const bool addrDemands = addressDemandsEnabled(ctx);
  std::set<NameId> out;
  if (!effective_base(r, ctx.program).empty()) {
    unionInto(out, varNames(var_of(r), ctx));
    if (addrDemands) unionInto(out, addr_expr(r, ctx));
    unionInto(out, abs_name(r, ain, ctx.absCtx()));
    return out;
  }
  if (is_addr(r)) {
    if (!addrDemands) return {};
    return abs_name(r, ain, ctx.absCtx());
  }
  if (!var_of(r).empty()) {
    unionInto(out, abs_name(r, ain, ctx.absCtx()));
    if (addrDemands) unionInto(out, addr_expr(r, ctx));
    return out;
  }
  return {};
}

std::set<NameId> rd_gen(const AccessExpr& l, const TransferCtx& ctx) {
  std::set<NameId> out = varNames(effective_base(l, ctx.program), ctx);
  if (addressDemandsEnabled(ctx)) unionInto(out, addr_expr(l, ctx));
  return out;
}

namespace {

// A demand the indirect access through `e` could touch: for *x an
// address-taken variable of the pointee type, for x->f a field name with a
// matching field on a compatible class.
bool cdDemandMatches(const AccessExpr& e, NameId demand,
                     const TransferCtx& ctx) {
  const ProgramIR& p = ctx.program;
  const NameData& d = ctx.names.data(demand);
  if (e.kind == ExprKind::Deref) {
    if (d.kind != NameKind::Var) return false;
    auto vt = p.varTypes.find(d.base);
    if (vt == p.varTypes.end()) return false;
    if (!p.addrTakenVars.count(d.base)) return false;
    TypeRef xt = p.typeOf(e.var);
    return vt->second.ptr == xt.ptr - 1 &&
           p.hierarchyRelated(vt->second.cls, xt.cls);
  }
  if (e.kind == ExprKind::Arrow ||
      (p.lang == Lang::Java && e.kind == ExprKind::Dot)) {
    std::string cls;
    switch (d.kind) {
      case NameKind::TypeField: cls = d.base; break;
      case NameKind::ObjField: cls = p.typeOf(d.base).cls; break;
      case NameKind::SiteField: {
        auto it = p.allocSiteType.find(d.base);
        if (it == p.allocSiteType.end()) return false;
        cls = it->second;
        break;
      }
      default:
        return false;
    }
    if (d.field != e.field) return false;
    return p.hierarchyRelated(cls, p.typeOf(e.var).cls);
  }
  return false;
}

}  // namespace

bool cd_may_define(const Statement& st, NameId demand,
                   const TransferCtx& ctx) {
  if (st.kind != StmtKind::Assign) return false;
  return cdDemandMatches(st.lhs, demand, ctx);
}

bool cd_may_read(const AccessExpr& rhs, NameId demand,
                 const TransferCtx& ctx) {
  return cdDemandMatches(rhs, demand, ctx);
}

std::set<NameId> d_kill_cd(const Statement& st, const DemandSet& dout,
                           const TransferCtx& ctx) {
  if (ctx.cfg.variant != Variant::Cd) return {};
  if (st.kind != StmtKind::Assign || st.lhs.kind != ExprKind::Deref) return {};
  if (dout.isUniversal()) return {};
  std::set<NameId> out;
  for (NameId d : dout.ids())
    if (cd_may_define(st, d, ctx)) out.insert(d);
  return out;
}

DemandGen d_gen(const Statement& st, const DemandSet& dout,
                const AliasRel& ain, const TransferCtx& ctx,
                bool cdStoreLatched, bool cdLoadLatched,
                const std::set<NameId>* demandClosure) {
  DemandGen res;
  if (st.kind == StmtKind::VirtualCall) {
    res.fired = true;
    res.gen = ld_gen(AccessExpr::makeVar(st.receiver), ain, ctx);
    return res;
  }
  if (st.kind != StmtKind::Assign) return res;

  std::set<NameId> lbar = abs_name(st.lhs, ain, ctx.absCtx());
  std::set<NameId> rbar = abs_name(st.rhs, ain, ctx.absCtx());
  bool guardL = demandedViaClosure(lbar, dout, ain, demandClosure);
  bool guardR = demandedViaClosure(rbar, dout, ain, demandClosure);

  // Conventional speculation (Cd): an indirect store may define a demand,
  // and an indirect load may read one, before the access expression is
  // resolvable; demand the base pointer then. The conditions are latched by
  // the solver so the transfer stays monotone.
  bool cdStore = cdStoreLatched;
  bool cdLoad = cdLoadLatched;
  if (ctx.cfg.variant == Variant::Cd && !dout.isUniversal()) {
    if (indirectLhs(st.lhs, ctx.program)) {
      for (NameId d : dout.ids()) {
        if (!lbar.count(d) && cd_may_define(st, d, ctx)) {
          res.cdStoreCondition = true;
          cdStore = true;
          break;
        }
      }
    }
    if (!effective_base(st.rhs, ctx.program).empty()) {
      for (NameId d : dout.ids()) {
        if (!rbar.count(d) && cd_may_read(st.rhs, d, ctx)) {
          res.cdLoadCondition = true;
          cdLoad = true;
          break;
        }
      }
    }
  }

  if (guardL || guardR || cdStore || cdLoad) {
    res.fired = true;
    if (ctx.objectStore && ctx.objectStore->enabled)
      for (const auto& obj : mentioned_objects(st, ctx.program))
        ctx.objectStore->objects.insert(obj);
  }
  if (guardL) unionInto(res.gen, ld_gen(st.rhs, ain, ctx));
  if (guardR) unionInto(res.gen, rd_gen(st.lhs, ctx));
  if (cdStore)
    unionInto(res.gen, varNames(effective_base(st.lhs, ctx.program), ctx));
  if (cdLoad)
    unionInto(res.gen, varNames(effective_base(st.rhs, ctx.program), ctx));
  return res;
}

AliasGen a_gen(const Statement& st, const DemandSet& dout, const AliasRel& ain,
               const TransferCtx& ctx,
               const std::set<NameId>* demandClosure) {
  AliasGen res;
  if (st.kind != StmtKind::Assign) return res;

  std::set<NameId> lbar = abs_name(st.lhs, ain, ctx.absCtx());
  std::set<NameId> rbar = abs_name(st.rhs, ain, ctx.absCtx());
  bool guardL = demandedViaClosure(lbar, dout, ain, demandClosure);
  bool fire = guardL;

  if (!fire && st.rhs.kind != ExprKind::New) {
    // demanded right side, or a right side with an already-known alias
    bool allowRhsPath = true;
    if (ctx.usedPointers && ctx.usedPointers->enabled &&
        st.lhs.kind == ExprKind::Var && st.rhs.kind == ExprKind::AddrOf) {
      allowRhsPath =
          ctx.usedPointers->vars.count(st.lhs.var) > 0 ||
          dout.contains(ctx.names.intern(NameKind::Var, st.lhs.var));
    }
    if (allowRhsPath) {
      if (demandedViaClosure(rbar, dout, ain, demandClosure)) {
        fire = true;
      } else if (!rbar.empty()) {
        auto closed = ain.closureOf(rbar);
        fire = closed.size() > rbar.size();
      }
    }
  }
  if (!fire) return res;

  res.fired = true;
  if (ctx.objectStore && ctx.objectStore->enabled) {
    bool grew = false;
    for (const auto& obj : mentioned_objects(st, ctx.program))
      grew |= ctx.objectStore->objects.insert(obj).second;
    if (grew) {
      lbar = abs_name(st.lhs, ain, ctx.absCtx());
      rbar = abs_name(st.rhs, ain, ctx.absCtx());
    }
  }
  for (NameId l : lbar)
    for (NameId r : rbar)
      if (l != r) res.pairs.emplace_back(std::min(l, r), std::max(l, r));
  std::sort(res.pairs.begin(), res.pairs.end());
  res.pairs.erase(std::unique(res.pairs.begin(), res.pairs.end()),
                  res.pairs.end());
  return res;
}

std::optional<NameId> a_kill_var(const Statement& st,
                                 const TransferCtx& ctx) {
  return a_kill_var(st, ctx, AliasRel{});
}

std::optional<NameId> a_kill_var(const Statement& st, const TransferCtx& ctx,
                                 const AliasRel& ain) {
  if (st.kind != StmtKind::Assign || st.lhs.kind != ExprKind::Var)
    return std::nullopt;
  NameId killed = ctx.names.intern(NameKind::Var, st.lhs.var);
  // x = x (directly or through an indirection that may read x itself) can
  // preserve x's value; killing would detach x from its surviving aliases
  try {
    if (abs_name(st.rhs, ain, ctx.absCtx()).count(killed))
      return std::nullopt;
  } catch (const AnalysisError&) {
  }
  return killed;
}

AliasRel a_apply(const AliasRel& ain, const std::optional<NameId>& killedVar,
                 const std::vector<std::pair<NameId, NameId>>& gen) {
  AliasRel aout;
  std::vector<NameId> bridged;
  for (const auto& [a, b] : ain.pairs()) {
    if (killedVar && (a == *killedVar || b == *killedVar)) {
      bridged.push_back(a == *killedVar ? b : a);
      continue;
    }
    aout.add(a, b);
  }
  for (size_t i = 0; i < bridged.size(); ++i)
    for (size_t j = i + 1; j < bridged.size(); ++j)
      aout.add(bridged[i], bridged[j]);
  for (const auto& [a, b] : gen) aout.add(a, b);
  return aout;
}

std::set<std::string> mentioned_objects(const Statement& st,
                                        const ProgramIR& p) {
  std::set<std::string> out;
  if (st.kind != StmtKind::Assign || p.lang == Lang::Java) return out;
  for (const AccessExpr* e : {&st.lhs, &st.rhs}) {
    if (e->kind == ExprKind::Dot) out.insert(e->var);
    if (e->kind == ExprKind::AddrOf && p.isObjectVar(e->var))
      out.insert(e->var);
  }
  return out;
}

void validate_for_variant(const ProgramIR& p, const VariantConfig& cfg) {
  if (cfg.variant == Variant::Jd) {
    for (const auto& fname : p.functionOrder) {
      for (const auto& n : p.functions.at(fname).nodes) {
        const Statement& st = p.stmt(n);
        if (st.kind != StmtKind::Assign) continue;
        for (const AccessExpr* e : {&st.lhs, &st.rhs}) {
          const char* what = nullptr;
          if (e->kind == ExprKind::AddrOf) what = "address-of";
          if (e->kind == ExprKind::Deref) what = "dereference";
          if (e->kind == ExprKind::Arrow) what = "'->'";
          if (what)
            throw AnalysisError(AnalysisCode::UnsupportedExpr,
                                std::string(what) +
                                    " not permitted under jd (statement " +
                                    n + ": " + st.text() + ")");
        }
      }
    }
  }
  if (cfg.useObjectStore && cfg.abstraction != Abstraction::Tba)
    throw AnalysisError(AnalysisCode::UnsupportedExpr,
                        "the object store applies to the type-based "
                        "abstraction only");
  // Object-valued derefs are rejected up front rather than silently named.
  for (const auto& [id, st] : p.statements) {
    if (st.kind != StmtKind::Assign || p.lang != Lang::Cpp) continue;
    for (const AccessExpr* e : {&st.lhs, &st.rhs}) {
      if (e->kind == ExprKind::Deref && p.typeOf(e->var).ptr == 1)
        throw AnalysisError(
            AnalysisCode::UnsupportedExpr,
            "UnsupportedExpr: '*" + e->var + "' at " + id +
                " denotes a whole object (front ends lower object copies)");
    }
  }
}

UsedPointerStore collect_used_pointers(const ProgramIR& p) {
  UsedPointerStore s;
  s.vars = p.usedPointerVars;
  return s;
}

}  // namespace aa
