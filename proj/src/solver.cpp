#include "aa/solver.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

namespace aa {

const NodeState& SolveResult::at(const std::string& node) const {
  auto it = states.find(node);
  if (it == states.end()) throw std::out_of_range("no state for " + node);
  return it->second;
}

std::set<std::string> resolve_virtual(const std::string& callId,
                                      const AliasRel& ain, const ProgramIR& p,
                                      NameTable& names) {
  const Statement& st = p.stmt(callId);
  if (st.kind != StmtKind::VirtualCall)
    throw std::invalid_argument(callId + " is not a virtual call");
  std::set<std::string> out;
  NameId recv = names.intern(NameKind::Var, st.receiver);
  for (NameId n : ain.closureOf(recv)) {
    std::string cls = names.objectClass(n, p);
    if (cls.empty()) continue;
    auto def = p.definingClass(cls, st.method);
    if (!def)
      throw AnalysisError(AnalysisCode::MethodNotInHierarchy,
                          "MethodNotInHierarchy: no definition of '" +
                              st.method + "' at or above class '" + cls +
                              "' (call " + callId + ")");
    out.insert(*def + "::" + st.method);
  }
  return out;
}

std::vector<std::string> ptg_edges(const AliasRel& rel,
                                   const NameTable& names) {
  std::set<std::string> out;
  for (const auto& [a, b] : rel.closurePairs()) {
    NameId src = a, dst = b;
    if (names.isAddressForm(src) == names.isAddressForm(dst)) continue;
    if (names.isAddressForm(src)) std::swap(src, dst);
    // strip the '&' of the pointee for the x->Y arrow rendering
    out.insert(names.text(src) + "->" + names.text(dst).substr(1));
  }
  return {out.begin(), out.end()};
}

namespace {

struct Worklist {
  std::deque<std::string> q;
  std::set<std::string> inq;
  WorklistOrder order;
  std::mt19937_64 rng;

  explicit Worklist(WorklistOrder o, uint64_t seed) : order(o), rng(seed) {}
  bool empty() const { return q.empty(); }
  void push(const std::string& n) {
    if (inq.insert(n).second) q.push_back(n);
  }
  std::string pop() {
    size_t idx = 0;
    switch (order) {
      case WorklistOrder::Fifo: idx = 0; break;
      case WorklistOrder::Lifo: idx = q.size() - 1; break;
      case WorklistOrder::Shuffled: idx = rng() % q.size(); break;
    }
    std::string n = q[idx];
    q.erase(q.begin() + idx);
    inq.erase(n);
    return n;
  }
};

size_t universe_estimate(const ProgramIR& p) {
  size_t fields = 0;
  for (const auto& [c, decl] : p.classes) fields += decl.fields.size();
  return 2 * p.varTypes.size() + p.classes.size() * (1 + fields) +
         p.allocSiteType.size() * (1 + fields) + 16;
}

}  // namespace

struct Solver::Impl {
  const ProgramIR& p;
  VariantConfig cfg;
  SolveOptions opts;
  Supergraph g;
  NameTable names;
  ObjectStore store;
  UsedPointerStore ups;
  std::map<std::string, NodeState> states;
  std::map<std::string, std::set<std::string>> callGraph;
  std::set<std::string> cdStoreLatch, cdLoadLatch;
  SolveCounters counters;
  Worklist dwl, awl;
  size_t budget;
  std::map<std::string, std::vector<std::string>> objectMentions;
  // trace bookkeeping
  std::vector<TraceRound> rounds;
  std::map<std::string, std::set<std::string>> seenDemand, seenPtg;

  Impl(const ProgramIR& p, VariantConfig cfg, SolveOptions opts)
      : p(p),
        cfg(cfg),
        opts(opts),
        g(build_supergraph(p)),
        dwl(opts.order, opts.shuffleSeed * 2 + 1),
        awl(opts.order, opts.shuffleSeed * 2 + 2) {
    store.enabled = cfg.useObjectStore;
    ups = collect_used_pointers(p);
    ups.enabled = cfg.useUsedPointerStore;
    budget = static_cast<size_t>(64.0 * opts.budgetFactor *
                                 static_cast<double>(g.nodes.size()) *
                                 static_cast<double>(universe_estimate(p)));
    if (budget < 64) budget = 64;
    for (const auto& [id, st] : g.nodes) {
      NodeState ns;
      if (cfg.variant == Variant::Ex) {
        ns.din = DemandSet::universalSet();
        ns.dout = DemandSet::universalSet();
      }
      states.emplace(id, std::move(ns));
      for (const auto& obj : mentioned_objects(st, p))
        objectMentions[obj].push_back(id);
    }
  }

  TransferCtx ctx() {
    return TransferCtx{p, cfg, names, &store, &ups};
  }

  void chargeVisit(size_t& counter) {
    ++counter;
    if (counters.nodeVisits() > budget)
      throw AnalysisError(
          AnalysisCode::NonTermination,
          "iteration budget exceeded; a transfer function is not monotone");
  }

  void onStoreGrowth(size_t before) {
    if (!store.enabled || store.objects.size() == before) return;
    for (const auto& [obj, nodes] : objectMentions) {
      if (!store.contains(obj)) continue;
      for (const auto& n : nodes) {
        if (hasDemandSide()) dwl.push(n);
        awl.push(n);
      }
    }
  }

  void visitDemand(const std::string& n) {
    chargeVisit(counters.demandVisits);
    NodeState& ns = states[n];
    DemandSet dout;
    for (const auto& s : g.succ[n]) dout.unionWith(states[s].din);
    ns.dout = dout;

    const Statement& st = g.nodes.at(n);
    size_t storeBefore = store.objects.size();
    std::set<NameId> roots;
    const std::set<NameId>* hint = nullptr;
    if (!dout.isUniversal()) {
      for (NameId d : dout.ids()) roots.insert(ns.ain.rootOf(d));
      hint = &roots;
    }
    DemandGen dg = d_gen(st, dout, ns.ain, ctx(), cdStoreLatch.count(n) > 0,
                         cdLoadLatch.count(n) > 0, hint);
    if (dg.cdStoreCondition) cdStoreLatch.insert(n);
    if (dg.cdLoadCondition) cdLoadLatch.insert(n);
    onStoreGrowth(storeBefore);

    std::set<NameId> kills = d_kill(st, ctx());
    for (NameId k : d_kill_cd(st, dout, ctx())) kills.insert(k);

    DemandSet din;
    for (NameId d : dout.ids())
      if (!kills.count(d)) din.insert(d);
    for (NameId d : dg.gen) din.insert(d);

    if (!(din == ns.din)) {
      std::vector<NameId> delta;
      for (NameId d : din.ids())
        if (!ns.din.contains(d)) delta.push_back(d);
      ns.din = std::move(din);
      // a predecessor is affected only when some new demand is new to its
      // exit set too (its Dout and its Agen guard both read it)
      for (const auto& q : g.pred[n]) {
        const DemandSet& qd = states[q].dout;
        bool news = qd.isUniversal()
                        ? false
                        : std::any_of(delta.begin(), delta.end(),
                                      [&](NameId d) { return !qd.contains(d); });
        if (news) {
          dwl.push(q);
          awl.push(q);
        }
      }
    }
  }

  bool hasDemandSide() const { return cfg.variant != Variant::Ex; }

  void visitAlias(const std::string& n) {
    chargeVisit(counters.aliasVisits);
    NodeState& ns = states[n];
    // copy the largest incoming relation wholesale, then merge the rest
    const auto& preds = g.pred[n];
    const AliasRel* largest = nullptr;
    for (const auto& q : preds) {
      const AliasRel& rel = states[q].aout;
      if (!largest || rel.pairCount() > largest->pairCount()) largest = &rel;
    }
    AliasRel ain;
    if (largest) ain = *largest;
    for (const auto& q : preds) {
      const AliasRel& rel = states[q].aout;
      if (&rel != largest) ain.unionWith(rel);
    }
    ns.ain = ain;

    const Statement& st = g.nodes.at(n);
    size_t storeBefore = store.objects.size();
    std::set<NameId> roots;
    const std::set<NameId>* hint = nullptr;
    if (!ns.dout.isUniversal()) {
      for (NameId d : ns.dout.ids()) roots.insert(ain.rootOf(d));
      hint = &roots;
    }
    AliasGen ag = a_gen(st, ns.dout, ain, ctx(), hint);
    onStoreGrowth(storeBefore);

    AliasRel aout = a_apply(ain, a_kill_var(st, ctx(), ain), ag.pairs);

    if (p.origin.count(n)) updateCallees(n, ain);

    if (!(aout == ns.aout)) {
      std::vector<std::pair<NameId, NameId>> delta;
      for (const auto& pr : aout.pairs())
        if (!ns.aout.contains(pr.first, pr.second)) delta.push_back(pr);
      ns.aout = std::move(aout);
      for (const auto& s : g.succ[n]) {
        const AliasRel& sin = states[s].ain;
        bool news = std::any_of(delta.begin(), delta.end(), [&](auto& pr) {
          return !sin.contains(pr.first, pr.second);
        });
        if (!news) continue;
        awl.push(s);
        // an alias change affects the demand side of nodes that carry a
        // demand (their Dgen reads Ain); demand-free nodes generate nothing
        // until the demand cascade itself reaches them
        if (hasDemandSide() &&
            (p.origin.count(s) || !states[s].din.empty() ||
             !states[s].dout.empty()))
          dwl.push(s);
      }
    }
  }

  void updateCallees(const std::string& n, const AliasRel& ain) {
    std::set<std::string> callees = resolve_virtual(n, ain, p, names);
    auto& known = callGraph[n];
    for (const auto& c : callees) {
      if (!known.insert(c).second) continue;
      // "Y::vfun" may have a body under that very name
      if (g.spliceVirtualCallee(p, n, c)) {
        const Cfg& callee = p.functions.at(c);
        awl.push(callee.start);
        awl.push(n);
        if (hasDemandSide()) {
          dwl.push(callee.end);
          dwl.push(n);
        }
        for (const auto& ret : g.virtualReturnSites.at(n)) {
          awl.push(ret);
          if (hasDemandSide()) dwl.push(ret);
        }
      }
    }
  }

  void snapshotDemand(TraceRound& round) {
    for (const auto& [n, ns] : states) {
      if (!p.statements.count(n)) continue;
      std::set<std::string> cur;
      if (!ns.dout.isUniversal())
        for (NameId d : ns.dout.ids()) cur.insert(names.text(d));
      auto& seen = seenDemand[n];
      for (const auto& s : cur)
        if (seen.insert(s).second) round[n].demand.push_back(s);
    }
  }

  void snapshotPtg(TraceRound& round) {
    for (const auto& [n, ns] : states) {
      if (!p.statements.count(n)) continue;
      auto& seen = seenPtg[n];
      for (const auto& e : ptg_edges(ns.aout, names))
        if (seen.insert(e).second) round[n].ptg.push_back(e);
    }
  }

  SolveResult run() {
    validate_for_variant(p, cfg);
    // Seeding per Algorithm 1: demands start at the origin nodes, aliases at
    // the entry's start node. The exhaustive variant has no demand side and
    // must visit every node at least once.
    if (cfg.variant == Variant::Ex) {
      for (const auto& [id, st] : g.nodes) awl.push(id);
    } else {
      for (const auto& o : p.origin) dwl.push(o);
      awl.push(g.entryStart);
    }

    while (!dwl.empty() || !awl.empty()) {
      ++counters.rounds;
      TraceRound round;
      if (!dwl.empty()) ++counters.demandPasses;
      while (!dwl.empty()) visitDemand(dwl.pop());
      if (opts.trace) snapshotDemand(round);
      if (!awl.empty()) ++counters.aliasPasses;
      while (!awl.empty()) visitAlias(awl.pop());
      if (opts.trace) snapshotPtg(round);
      if (opts.trace) rounds.push_back(std::move(round));
    }
    // drop trailing rounds that added nothing (keeping at least one)
    while (rounds.size() > 1) {
      bool empty = true;
      for (const auto& [n, cell] : rounds.back())
        if (!cell.demand.empty() || !cell.ptg.empty()) empty = false;
      if (!empty) break;
      rounds.pop_back();
    }

    // final call graph also lists direct and declared-target callees
    for (const auto& [id, st] : p.statements) {
      if (st.kind == StmtKind::DirectCall) callGraph[id].insert(st.callee);
      if (st.kind == StmtKind::IndirectCall)
        for (const auto& t : st.targets) callGraph[id].insert(t);
      if (st.kind == StmtKind::VirtualCall) callGraph[id];  // ensure present
    }

    SolveResult r;
    r.cfg = cfg;
    r.states = std::move(states);
    r.callGraph = std::move(callGraph);
    r.counters = counters;
    r.objectStore = std::move(store);
    r.usedPointers = std::move(ups);
    r.cdStoreLatch = std::move(cdStoreLatch);
    r.cdLoadLatch = std::move(cdLoadLatch);
    r.rounds = std::move(rounds);
    r.names = std::move(names);
    r.graph = std::move(g);
    return r;
  }
};

Solver::Solver(const ProgramIR& program, VariantConfig cfg, SolveOptions opts)
    : program_(program), cfg_(cfg), opts_(opts) {}

SolveResult Solver::run() {
  Impl impl(program_, cfg_, opts_);
  return impl.run();
}

SolveResult solve(const ProgramIR& p, VariantConfig cfg, SolveOptions opts) {
  return Solver(p, cfg, opts).run();
}

SolveResult solve_ex(const ProgramIR& p, Abstraction abstraction,
                     SolveOptions opts) {
  VariantConfig cfg;
  cfg.variant = Variant::Ex;
  cfg.abstraction = abstraction;
  return Solver(p, cfg, opts).run();
}

bool fixed_point_sweep_clean(const ProgramIR& p, SolveResult& r) {
  ObjectStore storeCopy = r.objectStore;
  UsedPointerStore upsCopy = r.usedPointers;
  TransferCtx ctx{p, r.cfg, r.names, &storeCopy, &upsCopy};
  for (const auto& [n, st] : r.graph.nodes) {
    const NodeState& ns = r.states.at(n);
    DemandSet dout;
    if (r.cfg.variant == Variant::Ex) {
      dout = DemandSet::universalSet();
    } else {
      for (const auto& s : r.graph.succ.at(n)) dout.unionWith(r.states.at(s).din);
    }
    if (!(dout == ns.dout)) return false;

    if (r.cfg.variant != Variant::Ex) {
      DemandGen dg = d_gen(st, dout, ns.ain, ctx,
                           r.cdStoreLatch.count(n) > 0,
                           r.cdLoadLatch.count(n) > 0);
      std::set<NameId> kills = d_kill(st, ctx);
      for (NameId k : d_kill_cd(st, dout, ctx)) kills.insert(k);
      DemandSet din;
      for (NameId d : dout.ids())
        if (!kills.count(d)) din.insert(d);
      for (NameId d : dg.gen) din.insert(d);
      if (!(din == ns.din)) return false;
    }

    AliasRel ain;
    for (const auto& q : r.graph.pred.at(n)) ain.unionWith(r.states.at(q).aout);
    if (!(ain == ns.ain)) return false;
    AliasGen ag = a_gen(st, dout, ain, ctx);
    AliasRel aout = a_apply(ain, a_kill_var(st, ctx, ain), ag.pairs);
    if (!(aout == ns.aout)) return false;
  }
  if (storeCopy.objects != r.objectStore.objects) return false;
  return true;
}

bool demand_origination_holds(const ProgramIR& p, SolveResult& r) {
  for (const auto& v : p.origin) {
    NameId recv = r.names.intern(NameKind::Var, p.stmt(v).receiver);
    if (!r.states.at(v).din.contains(recv)) return false;
  }
  return true;
}

std::string render_trace(const ProgramIR& p, const SolveResult& r) {
  std::ostringstream os;
  os << "# trace variant=" << variant_name(r.cfg.variant)
     << " abstraction=" << abstraction_name(r.cfg.abstraction) << "\n";
  os << "# per round: demand delta D and new points-to edges P at the point "
        "after each statement\n";
  auto renderSet = [](const std::vector<std::string>& xs) {
    std::string s = "{";
    for (size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ", ";
      s += xs[i];
    }
    return s + "}";
  };
  for (const auto& fname : p.functionOrder) {
    const Cfg& cfg = p.functions.at(fname);
    for (const auto& n : cfg.nodes) {
      os << n << ": " << p.stmt(n).text();
      for (size_t k = 0; k < r.rounds.size(); ++k) {
        TraceCell cell;
        auto it = r.rounds[k].find(n);
        if (it != r.rounds[k].end()) cell = it->second;
        std::sort(cell.demand.begin(), cell.demand.end());
        std::sort(cell.ptg.begin(), cell.ptg.end());
        os << "\tR" << (k + 1) << " D=" << renderSet(cell.demand)
           << " P=" << renderSet(cell.ptg);
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace aa
