#include "aa/checks.hpp"

#include <algorithm>
#include <sstream>

namespace aa {

namespace {

std::pair<std::string, std::string> orient(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {a, b};
}

std::string renderPairs(
    const std::set<std::pair<std::string, std::string>>& ps) {
  std::string s = "{";
  bool first = true;
  for (const auto& [a, b] : ps) {
    if (!first) s += ", ";
    s += "(" + a + "," + b + ")";
    first = false;
  }
  return s + "}";
}

// Eq 12 over the generated pairs (the equiprecision argument counts pairs as
// they appear, not their transitive consequences), first slot demanded,
// rendered as text so the sets compare across solves.
std::set<std::pair<std::string, std::string>> restrictText(
    const AliasRel& rel, const NameTable& relNames,
    const std::set<std::string>& demands, bool universal) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : rel.pairs()) {
    std::string ta = relNames.text(a), tb = relNames.text(b);
    if (universal || demands.count(ta)) out.emplace(ta, tb);
    if (universal || demands.count(tb)) out.emplace(tb, ta);
  }
  return out;
}

std::set<std::string> demandText(const DemandSet& d, const NameTable& names) {
  std::set<std::string> out;
  for (NameId id : d.ids()) out.insert(names.text(id));
  return out;
}

}  // namespace

TextState text_state(const NodeState& ns, const NameTable& names) {
  TextState t;
  t.universalDin = ns.din.isUniversal();
  t.universalDout = ns.dout.isUniversal();
  t.din = demandText(ns.din, names);
  t.dout = demandText(ns.dout, names);
  for (const auto& [a, b] : ns.ain.closurePairs())
    t.ain.insert(orient(names.text(a), names.text(b)));
  for (const auto& [a, b] : ns.aout.closurePairs())
    t.aout.insert(orient(names.text(a), names.text(b)));
  return t;
}

OracleReport check_alias_containment(const ProgramIR& p, Abstraction abs,
                                     Variant smaller) {
  OracleReport rep;
  VariantConfig small;
  small.variant = smaller;
  small.abstraction = abs;
  SolveResult dd = solve(p, small);
  SolveResult ex = solve_ex(p, abs);
  for (const auto& [n, ns] : dd.states) {
    TextState tdd = text_state(ns, dd.names);
    TextState tex = text_state(ex.at(n), ex.names);
    for (const auto& pr : tdd.aout) {
      if (!tex.aout.count(pr)) {
        rep.violations.push_back(
            {"alias-containment", n, "(" + pr.first + "," + pr.second + ")",
             "pair present in exhaustive aliases", "missing"});
      }
    }
    for (const auto& pr : tdd.ain) {
      if (!tex.ain.count(pr)) {
        rep.violations.push_back(
            {"alias-containment", n, "(" + pr.first + "," + pr.second + ")",
             "pair present in exhaustive Ain", "missing"});
      }
    }
  }
  return rep;
}

OracleReport check_equiprecision(const ProgramIR& p, Abstraction abs) {
  OracleReport rep;
  VariantConfig cdCfg;
  cdCfg.variant = Variant::Cd;
  cdCfg.abstraction = abs;
  SolveResult cd = solve(p, cdCfg);
  SolveResult ex = solve_ex(p, abs);
  for (const auto& [n, ns] : cd.states) {
    const NodeState& xs = ex.at(n);
    std::set<std::string> din = demandText(ns.din, cd.names);
    std::set<std::string> dout = demandText(ns.dout, cd.names);
    auto exIn = restrictText(xs.ain, ex.names, din, false);
    auto cdIn = restrictText(ns.ain, cd.names, din, false);
    auto exOut = restrictText(xs.aout, ex.names, dout, false);
    auto cdOut = restrictText(ns.aout, cd.names, dout, false);
    if (exIn != cdIn)
      rep.violations.push_back({"equiprecision", n, "entry component",
                                renderPairs(exIn), renderPairs(cdIn)});
    if (exOut != cdOut)
      rep.violations.push_back({"equiprecision", n, "exit component",
                                renderPairs(exOut), renderPairs(cdOut)});
  }
  return rep;
}

OracleReport check_order_independence(const ProgramIR& p, VariantConfig cfg,
                                      uint64_t seed) {
  OracleReport rep;
  SolveOptions a, b, c;
  a.order = WorklistOrder::Fifo;
  b.order = WorklistOrder::Lifo;
  c.order = WorklistOrder::Shuffled;
  c.shuffleSeed = seed;
  SolveResult ra = solve(p, cfg, a);
  SolveResult rb = solve(p, cfg, b);
  SolveResult rc = solve(p, cfg, c);
  for (const auto& [n, ns] : ra.states) {
    TextState ta = text_state(ns, ra.names);
    TextState tb = text_state(rb.at(n), rb.names);
    TextState tc = text_state(rc.at(n), rc.names);
    auto same = [&](const TextState& x, const TextState& y) {
      return x.din == y.din && x.dout == y.dout && x.ain == y.ain &&
             x.aout == y.aout && x.universalDin == y.universalDin &&
             x.universalDout == y.universalDout;
    };
    if (!same(ta, tb) || !same(ta, tc))
      rep.violations.push_back({"order-independence", n,
                                "fifo vs lifo vs shuffled",
                                "identical final states", "diverged"});
  }
  return rep;
}

OracleReport check_fixed_point_and_origination(const ProgramIR& p,
                                               VariantConfig cfg) {
  OracleReport rep;
  SolveResult r = solve(p, cfg);
  if (!fixed_point_sweep_clean(p, r))
    rep.violations.push_back({"fixed-point", "-", "transfer sweep",
                              "no change when re-applying transfers",
                              "state changed"});
  if (cfg.variant != Variant::Ex && !demand_origination_holds(p, r))
    rep.violations.push_back({"demand-origination", "-", "origin receivers",
                              "receiver demanded at every virtual call",
                              "missing demand"});
  return rep;
}

OracleReport verify_program(const ProgramIR& p, Abstraction abs,
                            const PathLimits& limits,
                            bool disableAddrSpeculation) {
  OracleReport rep;
  VariantConfig id;
  id.variant = Variant::Id;
  id.abstraction = abs;
  id.disableAddrSpeculation = disableAddrSpeculation;

  auto absorb = [&](OracleReport&& r) {
    for (auto& v : r.violations) rep.violations.push_back(std::move(v));
  };

  if (p.functions.size() == 1) absorb(check_mfp_vs_mop(p, id, limits));
  if (is_straight_line(p)) {
    for (Variant v : {Variant::Id, Variant::Cd, Variant::Ex}) {
      VariantConfig c;
      c.variant = v;
      c.abstraction = abs;
      c.disableAddrSpeculation = disableAddrSpeculation;
      OracleReport r = check_soundness(p, c);
      for (auto& viol : r.violations) {
        viol.check = std::string("soundness-") + variant_name(v);
        rep.violations.push_back(std::move(viol));
      }
    }
  }
  if (!disableAddrSpeculation) {
    absorb(check_alias_containment(p, abs, Variant::Id));
    absorb(check_equiprecision(p, abs));
  }
  absorb(check_fixed_point_and_origination(p, id));
  return rep;
}

}  // namespace aa
