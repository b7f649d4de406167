#include "aa/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aa {

std::vector<std::string> QualifiedPath::occurrences() const {
  std::vector<std::string> out = forward;
  out.push_back(pivot);
  out.insert(out.end(), backward.begin(), backward.end());
  return out;
}

std::string QualifiedPath::render() const {
  std::string s = "(";
  for (const auto& n : forward) s += n + " ";
  s += "| " + pivot + " |";
  for (const auto& n : backward) s += " " + n;
  return s + ")";
}

namespace {

const Cfg& single_function(const ProgramIR& p) {
  if (p.functions.size() != 1)
    throw std::invalid_argument(
        "path oracles apply to single-function programs");
  return p.functions.begin()->second;
}

void walk_forward(const Cfg& cfg, const std::string& pivot,
                  std::vector<std::string>& cur, size_t maxLen,
                  std::vector<std::vector<std::string>>& out,
                  size_t maxPaths) {
  if (cur.size() > maxLen) return;
  const std::string& last = cur.back();
  for (const auto& s : cfg.succ.at(last)) {
    if (s == pivot) {
      if (out.size() >= maxPaths)
        throw AnalysisError(AnalysisCode::PathBudgetExceeded,
                            "PathBudgetExceeded while enumerating paths");
      out.push_back(cur);
    }
    cur.push_back(s);
    walk_forward(cfg, pivot, cur, maxLen, out, maxPaths);
    cur.pop_back();
  }
}

void walk_backward(const Cfg& cfg, const std::string& from,
                   std::vector<std::string>& cur, size_t maxLen,
                   std::vector<std::vector<std::string>>& out,
                   size_t maxPaths) {
  if (cur.size() > maxLen) return;
  const std::string& last = cur.empty() ? from : cur.back();
  if (last == cfg.end) {
    if (out.size() >= maxPaths)
      throw AnalysisError(AnalysisCode::PathBudgetExceeded,
                          "PathBudgetExceeded while enumerating paths");
    out.push_back(cur);
    return;
  }
  for (const auto& s : cfg.succ.at(last)) {
    cur.push_back(s);
    walk_backward(cfg, from, cur, maxLen, out, maxPaths);
    cur.pop_back();
  }
}

}  // namespace

std::vector<QualifiedPath> enumerate_paths(const ProgramIR& p,
                                           const std::string& pivot,
                                           const PathLimits& limits) {
  const Cfg& cfg = single_function(p);
  std::vector<std::vector<std::string>> fwd;
  if (pivot == cfg.start) {
    fwd.push_back({});
  } else {
    std::vector<std::string> cur{cfg.start};
    walk_forward(cfg, pivot, cur, limits.maxLen, fwd, limits.maxPaths);
  }
  std::vector<std::vector<std::string>> bwd;
  {
    std::vector<std::string> cur;
    walk_backward(cfg, pivot, cur, limits.maxLen, bwd, limits.maxPaths);
  }
  std::vector<QualifiedPath> out;
  for (const auto& f : fwd) {
    for (const auto& b : bwd) {
      if (f.size() + 1 + b.size() > limits.maxLen) continue;
      if (out.size() >= limits.maxPaths)
        throw AnalysisError(AnalysisCode::PathBudgetExceeded,
                            "PathBudgetExceeded while combining paths");
      out.push_back(QualifiedPath{f, pivot, b});
    }
  }
  return out;
}

NodeState mop_along_path(const ProgramIR& p, const QualifiedPath& path,
                         VariantConfig cfg, NameTable& names) {
  validate_for_variant(p, cfg);
  std::vector<std::string> occ = path.occurrences();
  const size_t m = occ.size();
  size_t pivotIdx = path.forward.size();

  ObjectStore store;
  store.enabled = cfg.useObjectStore;
  UsedPointerStore ups = collect_used_pointers(p);
  ups.enabled = cfg.useUsedPointerStore;
  TransferCtx ctx{p, cfg, names, &store, &ups};

  std::vector<NodeState> st(m);
  if (cfg.variant == Variant::Ex)
    for (auto& s : st) {
      s.din = DemandSet::universalSet();
      s.dout = DemandSet::universalSet();
    }
  std::vector<char> storeLatch(m, 0), loadLatch(m, 0);

  bool changed = true;
  size_t guard = 0;
  while (changed) {
    changed = false;
    if (++guard > 4 * m + 64)
      throw AnalysisError(AnalysisCode::NonTermination,
                          "per-path evaluation did not stabilize");
    if (cfg.variant != Variant::Ex) {
      for (size_t i = m; i-- > 0;) {
        const Statement& s = p.stmt(occ[i]);
        DemandSet dout;
        if (i + 1 < m) dout = st[i + 1].din;
        DemandGen dg = d_gen(s, dout, st[i].ain, ctx, storeLatch[i] != 0,
                             loadLatch[i] != 0);
        if (dg.cdStoreCondition) storeLatch[i] = 1;
        if (dg.cdLoadCondition) loadLatch[i] = 1;
        std::set<NameId> kills = d_kill(s, ctx);
        for (NameId k : d_kill_cd(s, dout, ctx)) kills.insert(k);
        DemandSet din;
        for (NameId d : dout.ids())
          if (!kills.count(d)) din.insert(d);
        for (NameId d : dg.gen) din.insert(d);
        if (!(dout == st[i].dout) || !(din == st[i].din)) changed = true;
        st[i].dout = std::move(dout);
        st[i].din = std::move(din);
      }
    }
    for (size_t i = 0; i < m; ++i) {
      const Statement& s = p.stmt(occ[i]);
      AliasRel ain;
      if (i > 0) ain = st[i - 1].aout;
      AliasGen ag = a_gen(s, st[i].dout, ain, ctx);
      AliasRel aout = a_apply(ain, a_kill_var(s, ctx, ain), ag.pairs);
      if (!(ain == st[i].ain) || !(aout == st[i].aout)) changed = true;
      st[i].ain = std::move(ain);
      st[i].aout = std::move(aout);
    }
  }
  return st[pivotIdx];
}

NodeState mop_meet(const ProgramIR& p, const std::string& pivot,
                   VariantConfig cfg, const PathLimits& limits,
                   NameTable& names) {
  NodeState acc;
  if (cfg.variant == Variant::Ex) {
    acc.din = DemandSet::universalSet();
    acc.dout = DemandSet::universalSet();
  }
  for (const auto& path : enumerate_paths(p, pivot, limits)) {
    NodeState s = mop_along_path(p, path, cfg, names);
    acc.din.unionWith(s.din);
    acc.dout.unionWith(s.dout);
    acc.ain.unionWith(s.ain);
    acc.aout.unionWith(s.aout);
  }
  return acc;
}

std::string OracleReport::toJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : violations) {
    arr.push_back({{"check", v.check},
                   {"node", v.node},
                   {"witness", v.witness},
                   {"expected", v.expected},
                   {"actual", v.actual}});
  }
  return arr.dump(2);
}

namespace {

bool closureContains(const AliasRel& big, const AliasRel& small) {
  for (const auto& [a, b] : small.closurePairs())
    if (!big.closureOf(a).count(b)) return false;
  return true;
}

}  // namespace

std::string render_names(const std::set<NameId>& ids,
                         const NameTable& names) {
  std::string s = "{";
  bool first = true;
  for (NameId id : ids) {
    if (!first) s += ", ";
    s += names.text(id);
    first = false;
  }
  return s + "}";
}

OracleReport check_mfp_vs_mop(const ProgramIR& p, VariantConfig cfg,
                              const PathLimits& limits) {
  OracleReport report;
  SolveResult mfp = solve(p, cfg);
  const Cfg& fn = single_function(p);
  std::vector<std::string> nodes = fn.nodes;
  nodes.push_back(fn.start);
  nodes.push_back(fn.end);
  for (const auto& n : nodes) {
    const NodeState& fixed = mfp.at(n);
    for (const auto& path : enumerate_paths(p, n, limits)) {
      NodeState ps = mop_along_path(p, path, cfg, mfp.names);
      auto demandContained = [&](const DemandSet& small, const DemandSet& big) {
        if (small.isUniversal()) return big.isUniversal();
        for (NameId d : small.ids())
          if (!big.contains(d)) return false;
        return true;
      };
      if (!demandContained(ps.din, fixed.din) ||
          !demandContained(ps.dout, fixed.dout)) {
        report.violations.push_back(
            {"mfp-vs-mop-demand", n, path.render(),
             "path demands within MFP demands",
             render_names(ps.din.ids(), mfp.names)});
        continue;
      }
      if (!closureContains(fixed.ain, ps.ain) ||
          !closureContains(fixed.aout, ps.aout)) {
        report.violations.push_back({"mfp-vs-mop-alias", n, path.render(),
                                     "path aliases within MFP aliases", ""});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Concrete interpreter
// ---------------------------------------------------------------------------

bool is_straight_line(const ProgramIR& p) {
  if (p.functions.size() != 1) return false;
  const Cfg& cfg = p.functions.begin()->second;
  std::string cur = cfg.start;
  while (cur != cfg.end) {
    const auto& ss = cfg.succ.at(cur);
    if (ss.size() != 1) return false;
    const Statement& st = p.stmt(cur);
    if (st.kind == StmtKind::DirectCall || st.kind == StmtKind::IndirectCall)
      return false;
    cur = ss.front();
  }
  return true;
}

namespace {

struct Memory {
  enum class Tag { Undef, Null, Loc };
  struct Value {
    Tag tag = Tag::Undef;
    uint32_t loc = 0;
  };
  struct Object {
    std::string cls;
    std::map<std::string, uint32_t> fieldSlot;
  };

  const ProgramIR& p;
  uint32_t nextLoc = 1;
  std::map<uint32_t, Value> store;           // slot -> value
  std::map<uint32_t, Object> objects;        // object loc -> layout
  std::map<std::string, uint32_t> varSlot;   // pointer vars
  std::map<std::string, uint32_t> varObj;    // object vars
  std::map<std::string, uint32_t> siteLoc;   // allocation site -> object
  std::vector<uint32_t> heapOrder;

  explicit Memory(const ProgramIR& p) : p(p) {
    for (const auto& [v, t] : p.varTypes) {
      if (t.ptr == 0 && p.lang == Lang::Cpp)
        varObj[v] = makeObject(t.cls);
      else
        varSlot[v] = nextLoc++;
    }
  }

  uint32_t makeObject(const std::string& cls) {
    uint32_t loc = nextLoc++;
    Object o;
    o.cls = cls;
    std::string cur = cls;
    while (!cur.empty()) {
      for (const auto& [f, ft] : p.classes.at(cur).fields)
        if (!o.fieldSlot.count(f)) o.fieldSlot[f] = nextLoc++;
      cur = p.classes.at(cur).parent;
    }
    objects[loc] = std::move(o);
    return loc;
  }

  Value read(uint32_t slot, const std::string& what) {
    Value v = store.count(slot) ? store[slot] : Value{};
    if (v.tag == Tag::Undef)
      throw AnalysisError(AnalysisCode::UseBeforeDefine,
                          "UseBeforeDefine: read of undefined " + what);
    return v;
  }

  uint32_t deref(const Value& v, const std::string& what) {
    if (v.tag == Tag::Null)
      throw AnalysisError(AnalysisCode::NullDereference,
                          "NullDereference through " + what);
    return v.loc;
  }

  uint32_t fieldSlotOf(uint32_t objLoc, const std::string& f,
                       const std::string& what) {
    auto it = objects.find(objLoc);
    if (it == objects.end() || !it->second.fieldSlot.count(f))
      throw AnalysisError(AnalysisCode::NullDereference,
                          "bad field access " + what);
    return it->second.fieldSlot.at(f);
  }

  // l-value slot of an assignable expression
  uint32_t lval(const AccessExpr& e) {
    switch (e.kind) {
      case ExprKind::Var:
        return varSlot.at(e.var);
      case ExprKind::Deref:
        return deref(read(varSlot.at(e.var), e.text()), e.text());
      case ExprKind::Arrow: {
        uint32_t obj = deref(read(varSlot.at(e.var), e.var), e.text());
        return fieldSlotOf(obj, e.field, e.text());
      }
      case ExprKind::Dot: {
        if (p.lang == Lang::Java) {
          uint32_t obj = deref(read(varSlot.at(e.var), e.var), e.text());
          return fieldSlotOf(obj, e.field, e.text());
        }
        return fieldSlotOf(varObj.at(e.var), e.field, e.text());
      }
      default:
        throw std::invalid_argument("not an l-value: " + e.text());
    }
  }

  Value eval(const AccessExpr& e, const std::string& site) {
    switch (e.kind) {
      case ExprKind::Var:
      case ExprKind::Deref:
      case ExprKind::Arrow:
      case ExprKind::Dot:
        return read(lval(e), e.text());
      case ExprKind::AddrOf:
        if (varObj.count(e.var)) return Value{Tag::Loc, varObj.at(e.var)};
        return Value{Tag::Loc, varSlot.at(e.var)};
      case ExprKind::New: {
        uint32_t loc = makeObject(e.typeArg);
        heapOrder.push_back(loc);
        siteLoc[site] = loc;
        return Value{Tag::Loc, loc};
      }
      case ExprKind::Null:
        return Value{Tag::Null, 0};
    }
    return Value{};
  }

  void exec(const Statement& st) {
    if (st.kind != StmtKind::Assign) return;  // skips and vcalls do nothing
    Value v = eval(st.rhs, st.rhs.siteId);
    store[lval(st.lhs)] = v;
  }

  // Non-faulting r-value location of an expression; 0 when undefined/null.
  uint32_t peek(const AccessExpr& e) {
    try {
      switch (e.kind) {
        case ExprKind::AddrOf:
          return varObj.count(e.var) ? varObj.at(e.var) : varSlot.at(e.var);
        case ExprKind::New: {
          auto it = siteLoc.find(e.siteId);
          return it == siteLoc.end() ? 0 : it->second;
        }
        case ExprKind::Null:
          return 0;
        default: {
          Value v = read(lval(e), e.text());
          return v.tag == Tag::Loc ? v.loc : 0;
        }
      }
    } catch (const AnalysisError&) {
      return 0;
    }
  }
};

}  // namespace

ConcreteRun run_concrete(const ProgramIR& p) {
  if (!is_straight_line(p))
    throw std::invalid_argument(
        "run_concrete requires a straight-line single-function program");
  const Cfg& cfg = p.functions.begin()->second;

  ConcreteRun run;
  std::set<std::string> seen;
  auto addExpr = [&](const AccessExpr& e) {
    if (e.kind == ExprKind::Null) return;
    std::string key = e.kind == ExprKind::New ? "new@" + e.siteId : e.text();
    if (seen.insert(key).second) run.pool.push_back(e);
  };
  for (const auto& n : cfg.nodes) {
    const Statement& st = p.stmt(n);
    if (st.kind == StmtKind::Assign) {
      addExpr(st.lhs);
      addExpr(st.rhs);
    } else if (st.kind == StmtKind::VirtualCall) {
      addExpr(AccessExpr::makeVar(st.receiver));
    }
  }

  Memory mem(p);
  for (const auto& n : cfg.nodes) {
    mem.exec(p.stmt(n));
    run.nodeOrder.push_back(n);
    std::vector<uint32_t> vals;
    vals.reserve(run.pool.size());
    for (const auto& e : run.pool) vals.push_back(mem.peek(e));
    run.values.push_back(std::move(vals));
  }
  run.heapAllocOrder = mem.heapOrder;
  for (const auto& [loc, obj] : mem.objects) run.objectLocs.insert(loc);
  return run;
}

std::vector<std::pair<std::string, std::string>> ConcreteRun::aliasPairsAt(
    size_t step) const {
  std::vector<std::pair<std::string, std::string>> out;
  const auto& vals = values.at(step);
  for (size_t i = 0; i < pool.size(); ++i) {
    if (!vals[i]) continue;
    for (size_t j = i + 1; j < pool.size(); ++j)
      if (vals[i] == vals[j])
        out.emplace_back(pool[i].text(), pool[j].text());
  }
  return out;
}

OracleReport check_soundness(const ProgramIR& p, VariantConfig cfg) {
  OracleReport report;
  SolveResult res = solve(p, cfg);
  ConcreteRun run = run_concrete(p);
  const ObjectStore* store =
      res.objectStore.enabled ? &res.objectStore : nullptr;
  AbsNameCtx absCtx{p, cfg.abstraction, res.names, store};

  for (size_t step = 0; step < run.nodeOrder.size(); ++step) {
    const std::string& n = run.nodeOrder[step];
    const NodeState& ns = res.at(n);
    const auto& vals = run.values[step];
    for (size_t i = 0; i < run.pool.size(); ++i) {
      if (!vals[i]) continue;
      const AccessExpr& alpha = run.pool[i];
      if (alpha.kind == ExprKind::New) continue;  // allocations are pointees
      std::set<NameId> abar;
      try {
        abar = abs_name(alpha, ns.aout, absCtx);
      } catch (const AnalysisError&) {
        continue;
      }
      if (!ns.dout.containsAllNonempty(abar)) continue;
      std::set<NameId> alphaReach = ns.aout.closureOf(abar);
      // Conventional speculation answers a demand with the pointed-to
      // objects only; aliases with other pointer expressions sharing the
      // location are outside its contract.
      bool addressBetaOnly = cfg.variant == Variant::Cd;
      for (size_t j = 0; j < run.pool.size(); ++j) {
        if (i == j || vals[j] != vals[i]) continue;
        const AccessExpr& beta = run.pool[j];
        if (addressBetaOnly && beta.kind != ExprKind::AddrOf &&
            beta.kind != ExprKind::New)
          continue;
        std::set<NameId> bbar;
        try {
          bbar = abs_name(beta, ns.aout, absCtx);
        } catch (const AnalysisError&) {
          continue;
        }
        if (bbar.empty()) continue;
        // the sharing is covered when the two name sets touch or connect
        std::set<NameId> betaReach = ns.aout.closureOf(bbar);
        bool covered = std::any_of(
            alphaReach.begin(), alphaReach.end(),
            [&](NameId a) { return betaReach.count(a) > 0; });
        if (!covered) {
          report.violations.push_back(
              {"soundness", n, alpha.text() + " ~ " + beta.text(),
               render_names(abar, res.names) + " x " +
                   render_names(bbar, res.names) + " connected in aliases",
               "disconnected"});
        }
      }
    }
  }
  return report;
}

}  // namespace aa
