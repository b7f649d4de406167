#include "aa/devirt.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

namespace aa {

size_t class_type_metric(SolveResult& result, const ProgramIR& p) {
  const bool demandFiltered = result.cfg.variant != Variant::Ex;
  DemandSet demanded;
  if (demandFiltered) {
    for (const auto& [n, ns] : result.states) {
      demanded.unionWith(ns.din);
      demanded.unionWith(ns.dout);
    }
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& [n, ns] : result.states) {
    for (const auto& [a, b] : ns.aout.closurePairs()) {
      for (auto [expr, obj] : {std::pair{a, b}, std::pair{b, a}}) {
        if (result.names.isAddressForm(expr)) continue;
        std::string cls = result.names.objectClass(obj, p);
        if (cls.empty()) continue;  // pointer-variable pointees carry no type
        if (demandFiltered && !demanded.contains(expr)) continue;
        pairs.emplace(result.names.text(expr), cls);
      }
    }
  }
  return pairs.size();
}

DevirtReport devirtualize(SolveResult& result, const ProgramIR& p,
                          const std::string& programName) {
  DevirtReport rep;
  rep.program = programName;
  rep.variant = result.cfg.variant;
  rep.abstraction = result.cfg.abstraction;
  for (const auto& id : p.origin) {
    CallResolution cr;
    cr.callees = resolve_virtual(id, result.at(id).ain, p, result.names);
    if (cr.callees.empty()) {
      // stay sound: resolve through the class hierarchy and flag it
      cr.fallback = true;
      const Statement& st = p.stmt(id);
      for (const auto& cls : declared_pointees(st.receiver, p)) {
        auto def = p.definingClass(cls, st.method);
        if (def) cr.callees.insert(*def + "::" + st.method);
      }
    }
    cr.monomorphic = cr.callees.size() == 1;
    if (cr.monomorphic) ++rep.monomorphicCount;
    rep.virtualEdgeCount += cr.callees.size();
    rep.perCall.emplace(id, std::move(cr));
  }
  rep.classTypeCount = class_type_metric(result, p);
  rep.nodes = result.graph.nodes.size();
  rep.visits = result.counters.nodeVisits();
  return rep;
}

std::string DevirtReport::toJson() const {
  nlohmann::json calls = nlohmann::json::array();
  for (const auto& [id, cr] : perCall) {
    calls.push_back({{"id", id},
                     {"callees", cr.callees},
                     {"monomorphic", cr.monomorphic},
                     {"fallback", cr.fallback}});
  }
  nlohmann::json j{
      {"program", program},
      {"variant", variant_name(variant)},
      {"abstraction", abstraction_name(abstraction)},
      {"calls", calls},
      {"metrics",
       {{"mono", monomorphicCount},
        {"edges", virtualEdgeCount},
        {"classTypes", classTypeCount}}},
      {"perf", {{"nodes", nodes}, {"visits", visits}, {"ms", millis}}}};
  return j.dump(2);
}

std::string DevirtReport::toText() const {
  std::ostringstream os;
  os << "devirtualization (" << variant_name(variant) << ", "
     << abstraction_name(abstraction) << ")\n";
  for (const auto& [id, cr] : perCall) {
    os << "  " << id << " -> {";
    bool first = true;
    for (const auto& c : cr.callees) {
      if (!first) os << ", ";
      os << c;
      first = false;
    }
    os << "}" << (cr.monomorphic ? " monomorphic" : "")
       << (cr.fallback ? " [hierarchy fallback]" : "") << "\n";
  }
  os << "  monomorphic: " << monomorphicCount
     << "  edges: " << virtualEdgeCount << "  classTypes: " << classTypeCount
     << "  visits: " << visits << "\n";
  return os.str();
}

}  // namespace aa
