#ifndef AA_IR_HPP
#define AA_IR_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace aa {

/// Errors raised while parsing or validating the textual IR.
enum class ParseCode {
  SyntaxError,
  UndeclaredClass,
  UndeclaredVariable,
  CyclicHierarchy,
  MalformedStatement,
  UnknownCallee,
};

struct ParseError : std::runtime_error {
  ParseError(ParseCode code, int line, int col, const std::string& msg)
      : std::runtime_error(format(code, line, col, msg)),
        code(code),
        line(line),
        col(col) {}
  ParseCode code;
  int line;
  int col;
  static std::string format(ParseCode code, int line, int col,
                            const std::string& msg);
};

const char* parse_code_name(ParseCode code);

/// A class name plus a pointer level. Level 0 is an object (C++ mode) or a
/// reference (Java mode); level k is a k-star pointer.
struct TypeRef {
  std::string cls;
  int ptr = 0;

  bool operator==(const TypeRef& o) const = default;
  std::string text() const;
};

enum class ExprKind { Var, Deref, Arrow, Dot, AddrOf, New, Null };

/// An access expression: x, *x, x->f, x.f, &x, new T, null.
struct AccessExpr {
  ExprKind kind = ExprKind::Null;
  std::string var;      // Var, Deref, Arrow, Dot, AddrOf
  std::string field;    // Arrow, Dot
  std::string typeArg;  // New
  std::string siteId;   // New: the enclosing statement label

  static AccessExpr makeVar(std::string v);
  static AccessExpr makeDeref(std::string v);
  static AccessExpr makeArrow(std::string v, std::string f);
  static AccessExpr makeDot(std::string v, std::string f);
  static AccessExpr makeAddrOf(std::string v);
  static AccessExpr makeNew(std::string cls, std::string site);
  static AccessExpr makeNull();

  bool operator==(const AccessExpr& o) const = default;
  std::string text() const;
};

/// var(a): the variable occurring in the expression, if any.
std::set<std::string> var_of(const AccessExpr& a);
/// base(a): the pointer variable dereferenced by the expression, if any.
std::set<std::string> base_of(const AccessExpr& a);
/// isAddr(a): true for &x.
bool is_addr(const AccessExpr& a);

enum class StmtKind { Assign, VirtualCall, DirectCall, IndirectCall, Skip };

struct Statement {
  std::string id;
  StmtKind kind = StmtKind::Skip;
  AccessExpr lhs;
  AccessExpr rhs;
  // VirtualCall
  std::string receiver;
  std::string method;
  // DirectCall / IndirectCall
  std::string callee;                 // DirectCall
  std::vector<std::string> targets;   // IndirectCall
  std::vector<std::string> args;
  std::string retBind;                // empty when no "-> r"

  std::string text() const;
};

struct ClassDecl {
  std::string name;
  std::string parent;  // empty for a root class
  std::vector<std::pair<std::string, TypeRef>> fields;
  std::set<std::string> virtuals;
};

/// Intraprocedural CFG. `start` and `end` are synthesized Skip nodes.
struct Cfg {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> nodes;  // statement ids in textual order
  std::map<std::string, std::vector<std::string>> succ;
  std::map<std::string, std::vector<std::string>> pred;
  std::string start;
  std::string end;
  bool explicitEdges = false;
  std::vector<std::pair<std::string, std::string>> edgeList;
};

enum class Lang { Cpp, Java };

struct ProgramIR {
  Lang lang = Lang::Cpp;
  std::map<std::string, ClassDecl> classes;
  std::vector<std::string> classOrder;
  std::map<std::string, Cfg> functions;
  std::vector<std::string> functionOrder;
  std::string entry;
  std::map<std::string, Statement> statements;
  std::map<std::string, std::string> functionOf;  // statement id -> function
  std::map<std::string, TypeRef> varTypes;        // program-global variables
  std::map<std::string, std::string> varOwner;    // variable -> function
  std::map<std::string, std::string> allocSiteType;  // site id -> class
  std::set<std::string> origin;         // VirtualCall statement ids
  std::set<std::string> addrTakenVars;  // {x | &x occurs on some RHS}
  std::set<std::string> usedPointerVars;  // {x | LHS *x or x->f occurs}

  bool hasClass(const std::string& c) const { return classes.count(c) > 0; }
  const Statement& stmt(const std::string& id) const;
  TypeRef typeOf(const std::string& var) const;
  bool isObjectVar(const std::string& var) const;

  /// True when `sub` equals `sup` or is a (transitive) descendant of it.
  bool isSubclassOf(const std::string& sub, const std::string& sup) const;
  /// True when the two classes are related in either direction.
  bool hierarchyRelated(const std::string& a, const std::string& b) const;
  std::vector<std::string> descendantsOf(const std::string& cls) const;
  /// Field lookup through the hierarchy; nullopt when undeclared.
  std::optional<TypeRef> fieldType(const std::string& cls,
                                   const std::string& field) const;
  bool hasFieldInHierarchy(const std::string& cls,
                           const std::string& field) const;
  /// Most-derived class at or above `cls` that defines `method`.
  std::optional<std::string> definingClass(const std::string& cls,
                                           const std::string& method) const;
};

ProgramIR parse_program(const std::string& text);
std::string print_program(const ProgramIR& p);

/// declared_pointees: the declared pointee class of x plus all descendants.
std::set<std::string> declared_pointees(const std::string& var,
                                        const ProgramIR& p);

/// Whole-program graph: per-function CFGs plus call/return edges with
/// parameter and return binding desugared to copy assignments. Virtual-call
/// callee edges start empty and are spliced in by the solver on the fly.
struct Supergraph {
  std::map<std::string, Statement> nodes;
  std::map<std::string, std::vector<std::string>> succ;
  std::map<std::string, std::vector<std::string>> pred;
  std::string entryStart;
  std::string entryEnd;
  // Snapshot of each virtual call's intraprocedural successors, used as the
  // return points when a callee is spliced in later.
  std::map<std::string, std::vector<std::string>> virtualReturnSites;
  std::map<std::string, std::set<std::string>> splicedCallees;

  void addEdge(const std::string& from, const std::string& to);
  bool hasEdge(const std::string& from, const std::string& to) const;
  /// Connects call node -> callee start and callee end -> return sites.
  /// Returns false when the callee has no body in the program.
  bool spliceVirtualCallee(const ProgramIR& p, const std::string& callId,
                           const std::string& calleeFn);
};

Supergraph build_supergraph(const ProgramIR& p);

}  // namespace aa

#endif
