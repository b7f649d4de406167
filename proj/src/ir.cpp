#include "aa/ir.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <sstream>

namespace aa {

const char* parse_code_name(ParseCode code) {
  switch (code) {
    case ParseCode::SyntaxError: return "SyntaxError";
    case ParseCode::UndeclaredClass: return "UndeclaredClass";
    case ParseCode::UndeclaredVariable: return "UndeclaredVariable";
    case ParseCode::CyclicHierarchy: return "CyclicHierarchy";
    case ParseCode::MalformedStatement: return "MalformedStatement";
    case ParseCode::UnknownCallee: return "UnknownCallee";
  }
  return "ParseError";
}

std::string ParseError::format(ParseCode code, int line, int col,
                               const std::string& msg) {
  std::ostringstream os;
  os << parse_code_name(code) << " at " << line << ":" << col << ": " << msg;
  return os.str();
}

std::string TypeRef::text() const {
  std::string s = cls;
  for (int i = 0; i < ptr; ++i) s += '*';
  return s;
}

AccessExpr AccessExpr::makeVar(std::string v) {
  AccessExpr e;
  e.kind = ExprKind::Var;
  e.var = std::move(v);
  return e;
}
AccessExpr AccessExpr::makeDeref(std::string v) {
  AccessExpr e;
  e.kind = ExprKind::Deref;
  e.var = std::move(v);
  return e;
}
AccessExpr AccessExpr::makeArrow(std::string v, std::string f) {
  AccessExpr e;
  e.kind = ExprKind::Arrow;
  e.var = std::move(v);
  e.field = std::move(f);
  return e;
}
AccessExpr AccessExpr::makeDot(std::string v, std::string f) {
  AccessExpr e;
  e.kind = ExprKind::Dot;
  e.var = std::move(v);
  e.field = std::move(f);
  return e;
}
AccessExpr AccessExpr::makeAddrOf(std::string v) {
  AccessExpr e;
  e.kind = ExprKind::AddrOf;
  e.var = std::move(v);
  return e;
}
AccessExpr AccessExpr::makeNew(std::string cls, std::string site) {
  AccessExpr e;
  e.kind = ExprKind::New;
  e.typeArg = std::move(cls);
  e.siteId = std::move(site);
  return e;
}
AccessExpr AccessExpr::makeNull() {
  AccessExpr e;
  e.kind = ExprKind::Null;
  return e;
}

std::string AccessExpr::text() const {
  switch (kind) {
    case ExprKind::Var: return var;
    case ExprKind::Deref: return "*" + var;
    case ExprKind::Arrow: return var + "->" + field;
    case ExprKind::Dot: return var + "." + field;
    case ExprKind::AddrOf: return "&" + var;
    case ExprKind::New: return "new " + typeArg;
    case ExprKind::Null: return "null";
  }
  return "?";
}

std::set<std::string> var_of(const AccessExpr& a) {
  switch (a.kind) {
    case ExprKind::Var:
    case ExprKind::Deref:
    case ExprKind::Arrow:
    case ExprKind::Dot:
    case ExprKind::AddrOf:
      return {a.var};
    case ExprKind::New:
    case ExprKind::Null:
      return {};
  }
  return {};
}

std::set<std::string> base_of(const AccessExpr& a) {
  if (a.kind == ExprKind::Deref || a.kind == ExprKind::Arrow) return {a.var};
  return {};
}

bool is_addr(const AccessExpr& a) { return a.kind == ExprKind::AddrOf; }

std::string Statement::text() const {
  switch (kind) {
    case StmtKind::Assign:
      return lhs.text() + " = " + rhs.text();
    case StmtKind::VirtualCall:
      return "vcall " + receiver + "->" + method + "()";
    case StmtKind::DirectCall: {
      std::string s = "call " + callee + "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += args[i];
      }
      s += ")";
      if (!retBind.empty()) s += " -> " + retBind;
      return s;
    }
    case StmtKind::IndirectCall: {
      std::string s = "fcall " + callee + "(";
      for (size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += args[i];
      }
      s += ")";
      if (!retBind.empty()) s += " -> " + retBind;
      s += " targets {";
      for (size_t i = 0; i < targets.size(); ++i) {
        if (i) s += ", ";
        s += targets[i];
      }
      s += "}";
      return s;
    }
    case StmtKind::Skip:
      return "skip";
  }
  return "?";
}

const Statement& ProgramIR::stmt(const std::string& id) const {
  auto it = statements.find(id);
  if (it == statements.end())
    throw std::out_of_range("no statement " + id);
  return it->second;
}

TypeRef ProgramIR::typeOf(const std::string& var) const {
  auto it = varTypes.find(var);
  if (it == varTypes.end())
    throw ParseError(ParseCode::UndeclaredVariable, 0, 0,
                     "undeclared variable '" + var + "'");
  return it->second;
}

bool ProgramIR::isObjectVar(const std::string& var) const {
  auto it = varTypes.find(var);
  return it != varTypes.end() && it->second.ptr == 0;
}

bool ProgramIR::isSubclassOf(const std::string& sub,
                             const std::string& sup) const {
  std::string cur = sub;
  while (!cur.empty()) {
    if (cur == sup) return true;
    auto it = classes.find(cur);
    if (it == classes.end()) return false;
    cur = it->second.parent;
  }
  return false;
}

bool ProgramIR::hierarchyRelated(const std::string& a,
                                 const std::string& b) const {
  return isSubclassOf(a, b) || isSubclassOf(b, a);
}

std::vector<std::string> ProgramIR::descendantsOf(
    const std::string& cls) const {
  std::vector<std::string> out;
  for (const auto& name : classOrder)
    if (isSubclassOf(name, cls)) out.push_back(name);
  return out;
}

std::optional<TypeRef> ProgramIR::fieldType(const std::string& cls,
                                            const std::string& field) const {
  std::string cur = cls;
  while (!cur.empty()) {
    auto it = classes.find(cur);
    if (it == classes.end()) return std::nullopt;
    for (const auto& [fname, ftype] : it->second.fields)
      if (fname == field) return ftype;
    cur = it->second.parent;
  }
  return std::nullopt;
}

bool ProgramIR::hasFieldInHierarchy(const std::string& cls,
                                    const std::string& field) const {
  return fieldType(cls, field).has_value();
}

std::optional<std::string> ProgramIR::definingClass(
    const std::string& cls, const std::string& method) const {
  std::string cur = cls;
  while (!cur.empty()) {
    auto it = classes.find(cur);
    if (it == classes.end()) return std::nullopt;
    if (it->second.virtuals.count(method)) return cur;
    cur = it->second.parent;
  }
  return std::nullopt;
}

std::set<std::string> declared_pointees(const std::string& var,
                                        const ProgramIR& p) {
  TypeRef t = p.typeOf(var);
  std::set<std::string> out;
  for (const auto& d : p.descendantsOf(t.cls)) out.insert(d);
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Cursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(ParseCode code, const std::string& msg) const {
    throw ParseError(code, line, static_cast<int>(pos) + 1, msg);
  }
  void skipWs() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool atEnd() {
    skipWs();
    return pos >= s.size();
  }
  char peek() {
    skipWs();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool tryConsume(char c) {
    skipWs();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool tryConsume(const std::string& word) {
    skipWs();
    if (s.compare(pos, word.size(), word) == 0) {
      // keywords must not run into an identifier character
      size_t after = pos + word.size();
      bool wordy = std::isalnum(static_cast<unsigned char>(word.back())) ||
                   word.back() == '_';
      if (wordy && after < s.size() &&
          (std::isalnum(static_cast<unsigned char>(s[after])) ||
           s[after] == '_'))
        return false;
      pos = after;
      return true;
    }
    return false;
  }
  void expect(char c, const std::string& what) {
    if (!tryConsume(c)) fail(ParseCode::SyntaxError, "expected '" +
                                 std::string(1, c) + "' " + what);
  }
  std::string ident(const std::string& what) {
    skipWs();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) ||
            s[pos] == '_' || s[pos] == ':'))
      ++pos;
    // trailing lone ':' belongs to the outer syntax (labels, types)
    while (pos > start && s[pos - 1] == ':' &&
           !(pos - 2 >= start && s[pos - 2] == ':'))
      --pos;
    if (pos == start)
      fail(ParseCode::SyntaxError, "expected " + what);
    return s.substr(start, pos - start);
  }
};

struct Parser {
  ProgramIR p;
  std::vector<std::string> lines;
  std::map<std::string, int> stmtLine;

  static std::string stripComment(const std::string& raw) {
    std::string out = raw;
    size_t h = out.find('#');
    if (h != std::string::npos) out = out.substr(0, h);
    size_t c = out.find("//");
    if (c != std::string::npos) out = out.substr(0, c);
    while (!out.empty() && (out.back() == '\r' || out.back() == ' ' ||
                            out.back() == '\t'))
      out.pop_back();
    return out;
  }

  TypeRef parseType(Cursor& c) {
    TypeRef t;
    t.cls = c.ident("class name");
    while (c.tryConsume('*')) ++t.ptr;
    return t;
  }

  AccessExpr parseExpr(Cursor& c, bool lhsPosition) {
    if (c.tryConsume('*')) {
      return AccessExpr::makeDeref(c.ident("variable after '*'"));
    }
    if (c.tryConsume('&')) {
      if (lhsPosition)
        c.fail(ParseCode::MalformedStatement, "address-of on left-hand side");
      return AccessExpr::makeAddrOf(c.ident("variable after '&'"));
    }
    if (!lhsPosition && c.tryConsume(std::string("null")))
      return AccessExpr::makeNull();
    if (!lhsPosition && c.tryConsume(std::string("new"))) {
      std::string cls = c.ident("class name after 'new'");
      return AccessExpr::makeNew(cls, "");  // site filled by caller
    }
    std::string v = c.ident("variable");
    if (c.tryConsume(std::string("->"))) {
      return AccessExpr::makeArrow(v, c.ident("field name"));
    }
    if (c.tryConsume('.')) {
      return AccessExpr::makeDot(v, c.ident("field name"));
    }
    return AccessExpr::makeVar(v);
  }

  void parseClassLine(Cursor& c) {
    ClassDecl decl;
    decl.name = c.ident("class name");
    if (p.classes.count(decl.name))
      c.fail(ParseCode::SyntaxError, "duplicate class '" + decl.name + "'");
    if (c.tryConsume(':')) decl.parent = c.ident("parent class name");
    c.expect('{', "to open class body");
    while (!c.tryConsume('}')) {
      if (c.atEnd())
        c.fail(ParseCode::SyntaxError, "unterminated class body");
      if (!c.tryConsume(std::string("field")))
        c.fail(ParseCode::SyntaxError, "expected 'field' or '}'");
      std::string fname = c.ident("field name");
      c.expect(':', "after field name");
      TypeRef ftype = parseType(c);
      decl.fields.emplace_back(fname, ftype);
    }
    p.classOrder.push_back(decl.name);
    p.classes[decl.name] = decl;
  }

  void parseVirtualLine(Cursor& c) {
    std::string method = c.ident("method name");
    if (!c.tryConsume(std::string("in")))
      c.fail(ParseCode::SyntaxError, "expected 'in' in virtual declaration");
    do {
      std::string cls = c.ident("class name");
      auto it = p.classes.find(cls);
      if (it == p.classes.end())
        c.fail(ParseCode::UndeclaredClass, "unknown class '" + cls + "'");
      it->second.virtuals.insert(method);
    } while (c.tryConsume(','));
  }

  struct PendingFunc {
    Cfg cfg;
    std::vector<std::pair<std::string, TypeRef>> varDecls;
  };

  void declareVar(Cursor& c, const std::string& fn, const std::string& name,
                  const TypeRef& type) {
    if (p.varTypes.count(name))
      c.fail(ParseCode::SyntaxError,
             "duplicate variable '" + name + "' (variable names are "
             "program-global)");
    if (!p.hasClass(type.cls))
      c.fail(ParseCode::UndeclaredClass,
             "unknown class '" + type.cls + "' in declaration of '" + name +
                 "'");
    if (p.lang == Lang::Java && type.ptr != 0)
      c.fail(ParseCode::MalformedStatement,
             "pointer types are not permitted in java programs");
    p.varTypes[name] = type;
    p.varOwner[name] = fn;
  }

  void parseFuncBody(Cursor& head, std::deque<std::pair<int, std::string>>& in) {
    Cfg cfg;
    cfg.name = head.ident("function name");
    if (p.functions.count(cfg.name))
      head.fail(ParseCode::SyntaxError,
                "duplicate function '" + cfg.name + "'");
    head.expect('(', "after function name");
    if (!head.tryConsume(')')) {
      do {
        std::string pname = head.ident("parameter name");
        head.expect(':', "after parameter name");
        TypeRef ptype = parseType(head);
        declareVar(head, cfg.name, pname, ptype);
        cfg.params.push_back(pname);
      } while (head.tryConsume(','));
      head.expect(')', "to close parameter list");
    }
    head.expect('{', "to open function body");
    // the body may start on the same line as the header
    head.skipWs();
    if (head.pos < head.s.size())
      in.emplace_front(head.line, head.s.substr(head.pos));

    bool closed = false;
    while (!in.empty()) {
      auto [lineNo, raw] = in.front();
      in.pop_front();
      Cursor c{raw, lineNo};
      if (c.atEnd()) continue;
      if (c.tryConsume('}')) {
        closed = true;
        break;
      }
      if (c.tryConsume(std::string("var"))) {
        // several declarations may share one line: var p: X**  var z: X*
        for (;;) {
          std::string vname = c.ident("variable name");
          c.expect(':', "after variable name");
          TypeRef vtype = parseType(c);
          declareVar(c, cfg.name, vname, vtype);
          if (!c.tryConsume(std::string("var"))) break;
        }
        if (!c.atEnd())
          c.fail(ParseCode::SyntaxError, "trailing text after declaration");
        continue;
      }
      if (c.tryConsume(std::string("edges"))) {
        c.expect(':', "after 'edges'");
        cfg.explicitEdges = true;
        do {
          std::string from = c.ident("edge source label");
          if (!c.tryConsume(std::string("->")))
            c.fail(ParseCode::SyntaxError, "expected '->' in edge");
          std::string to = c.ident("edge target label");
          cfg.edgeList.emplace_back(from, to);
        } while (c.tryConsume(','));
        if (!c.atEnd())
          c.fail(ParseCode::SyntaxError, "trailing text after edges");
        continue;
      }
      // labeled statement
      std::string label = c.ident("statement label");
      c.expect(':', "after statement label");
      parseStatement(c, cfg, label);
    }
    if (!closed)
      head.fail(ParseCode::SyntaxError,
                "unterminated body of function '" + cfg.name + "'");
    p.functionOrder.push_back(cfg.name);
    p.functions[cfg.name] = cfg;
  }

  void parseStatement(Cursor& c, Cfg& cfg, const std::string& label) {
    if (p.statements.count(label))
      c.fail(ParseCode::SyntaxError, "duplicate statement label '" + label +
                                         "'");
    Statement st;
    st.id = label;
    if (c.tryConsume(std::string("skip"))) {
      st.kind = StmtKind::Skip;
    } else if (c.tryConsume(std::string("vcall"))) {
      st.kind = StmtKind::VirtualCall;
      st.receiver = c.ident("receiver variable");
      if (!c.tryConsume(std::string("->")) && !c.tryConsume('.'))
        c.fail(ParseCode::SyntaxError, "expected '->' or '.' in vcall");
      st.method = c.ident("method name");
      c.expect('(', "after method name");
      c.expect(')', "to close call");
    } else if (c.tryConsume(std::string("fcall")) ||
               c.tryConsume(std::string("call"))) {
      // the cursor consumed exactly one of the two keywords just above
      bool indirect = c.s[c.pos - 5] == 'f';
      st.kind = indirect ? StmtKind::IndirectCall : StmtKind::DirectCall;
      st.callee = c.ident(indirect ? "function-pointer variable"
                                   : "callee function name");
      c.expect('(', "after callee");
      if (!c.tryConsume(')')) {
        do {
          st.args.push_back(c.ident("argument variable"));
        } while (c.tryConsume(','));
        c.expect(')', "to close argument list");
      }
      if (c.tryConsume(std::string("->")))
        st.retBind = c.ident("return-bind variable");
      if (indirect) {
        if (!c.tryConsume(std::string("targets")))
          c.fail(ParseCode::SyntaxError, "fcall requires a targets clause");
        c.expect('{', "after 'targets'");
        do {
          st.targets.push_back(c.ident("target function name"));
        } while (c.tryConsume(','));
        c.expect('}', "to close targets");
        if (st.targets.empty())
          c.fail(ParseCode::MalformedStatement, "empty targets clause");
      }
    } else {
      st.kind = StmtKind::Assign;
      st.lhs = parseExpr(c, /*lhsPosition=*/true);
      c.expect('=', "in assignment");
      st.rhs = parseExpr(c, /*lhsPosition=*/false);
      if (st.rhs.kind == ExprKind::New) st.rhs.siteId = label;
    }
    if (!c.atEnd())
      c.fail(ParseCode::SyntaxError, "trailing text after statement");
    stmtLine[label] = c.line;
    cfg.nodes.push_back(label);
    p.statements[label] = st;
    p.functionOf[label] = cfg.name;
  }

  void run(const std::string& text) {
    std::deque<std::pair<int, std::string>> in;
    {
      std::istringstream is(text);
      std::string raw;
      int n = 0;
      while (std::getline(is, raw)) in.emplace_back(++n, stripComment(raw));
    }
    while (!in.empty()) {
      auto [lineNo, raw] = in.front();
      in.pop_front();
      Cursor c{raw, lineNo};
      if (c.atEnd()) continue;
      if (c.tryConsume(std::string("lang"))) {
        std::string l = c.ident("language name");
        if (l == "java")
          p.lang = Lang::Java;
        else if (l == "cpp")
          p.lang = Lang::Cpp;
        else
          c.fail(ParseCode::SyntaxError, "unknown language '" + l + "'");
        continue;
      }
      if (c.tryConsume(std::string("class"))) {
        // class bodies may span lines; join until the closing brace
        std::string joined = raw;
        while (joined.find('}') == std::string::npos && !in.empty()) {
          auto [ln2, raw2] = in.front();
          in.pop_front();
          joined += " " + raw2;
        }
        Cursor cc{joined, lineNo};
        cc.tryConsume(std::string("class"));
        parseClassLine(cc);
        continue;
      }
      if (c.tryConsume(std::string("virtual"))) {
        parseVirtualLine(c);
        continue;
      }
      if (c.tryConsume(std::string("func"))) {
        parseFuncBody(c, in);
        continue;
      }
      c.fail(ParseCode::SyntaxError, "expected class, virtual, func, or lang");
    }
    finalize();
  }

  [[noreturn]] void failAt(const std::string& stmtId, ParseCode code,
                           const std::string& msg) {
    int line = stmtLine.count(stmtId) ? stmtLine[stmtId] : 0;
    throw ParseError(code, line, 1, msg + " (statement " + stmtId + ")");
  }

  void checkHierarchy() {
    for (const auto& [name, decl] : p.classes) {
      if (!decl.parent.empty() && !p.hasClass(decl.parent))
        throw ParseError(ParseCode::UndeclaredClass, 0, 0,
                         "unknown parent class '" + decl.parent + "' of '" +
                             name + "'");
      std::set<std::string> seen;
      std::string cur = name;
      while (!cur.empty()) {
        if (!seen.insert(cur).second)
          throw ParseError(ParseCode::CyclicHierarchy, 0, 0,
                           "class hierarchy cycle through '" + cur + "'");
        cur = p.classes.at(cur).parent;
      }
      for (const auto& [fname, ftype] : decl.fields) {
        if (!p.hasClass(ftype.cls))
          throw ParseError(ParseCode::UndeclaredClass, 0, 0,
                           "unknown class '" + ftype.cls + "' in field '" +
                               name + "." + fname + "'");
        if (p.lang == Lang::Java && ftype.ptr != 0)
          throw ParseError(ParseCode::MalformedStatement, 0, 0,
                           "pointer field in java program: " + name + "." +
                               fname);
      }
    }
  }

  TypeRef requireVar(const std::string& stmtId, const std::string& v) {
    auto it = p.varTypes.find(v);
    if (it == p.varTypes.end())
      failAt(stmtId, ParseCode::UndeclaredVariable,
             "undeclared variable '" + v + "'");
    return it->second;
  }

  // Declared type of an access expression, or nullopt for null.
  std::optional<TypeRef> exprType(const std::string& stmtId,
                                  const AccessExpr& e) {
    switch (e.kind) {
      case ExprKind::Var:
        return requireVar(stmtId, e.var);
      case ExprKind::Deref: {
        TypeRef t = requireVar(stmtId, e.var);
        if (t.ptr < 1)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "dereference of non-pointer '" + e.var + "'");
        return TypeRef{t.cls, t.ptr - 1};
      }
      case ExprKind::Arrow: {
        TypeRef t = requireVar(stmtId, e.var);
        if (p.lang == Lang::Java)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "'->' is not permitted in java programs");
        if (t.ptr != 1)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "'->' requires a single-level object pointer, got '" +
                     t.text() + "'");
        auto ft = p.fieldType(t.cls, e.field);
        if (!ft)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "class '" + t.cls + "' has no field '" + e.field + "'");
        return *ft;
      }
      case ExprKind::Dot: {
        TypeRef t = requireVar(stmtId, e.var);
        if (t.ptr != 0)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "'.' requires an object, got '" + t.text() + "'");
        auto ft = p.fieldType(t.cls, e.field);
        if (!ft)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "class '" + t.cls + "' has no field '" + e.field + "'");
        return *ft;
      }
      case ExprKind::AddrOf: {
        TypeRef t = requireVar(stmtId, e.var);
        if (p.lang == Lang::Java)
          failAt(stmtId, ParseCode::MalformedStatement,
                 "'&' is not permitted in java programs");
        return TypeRef{t.cls, t.ptr + 1};
      }
      case ExprKind::New: {
        if (!p.hasClass(e.typeArg))
          failAt(stmtId, ParseCode::UndeclaredClass,
                 "unknown class '" + e.typeArg + "' in new");
        return TypeRef{e.typeArg, p.lang == Lang::Java ? 0 : 1};
      }
      case ExprKind::Null:
        return std::nullopt;
    }
    return std::nullopt;
  }

  void checkStatements() {
    for (auto& [id, st] : p.statements) {
      switch (st.kind) {
        case StmtKind::Assign: {
          auto lt = exprType(id, st.lhs);
          auto rt = exprType(id, st.rhs);
          if (p.lang == Lang::Cpp && st.lhs.kind == ExprKind::Var &&
              lt && lt->ptr == 0)
            failAt(id, ParseCode::MalformedStatement,
                   "whole-object assignment to '" + st.lhs.var +
                       "' is not supported; assign fields instead");
          if (lt && rt) {
            if (lt->ptr != rt->ptr ||
                !p.hierarchyRelated(lt->cls, rt->cls))
              failAt(id, ParseCode::MalformedStatement,
                     "incompatible assignment: " + lt->text() + " = " +
                         rt->text());
          }
          if (st.rhs.kind == ExprKind::New)
            p.allocSiteType[st.rhs.siteId] = st.rhs.typeArg;
          break;
        }
        case StmtKind::VirtualCall: {
          TypeRef t = requireVar(id, st.receiver);
          int want = p.lang == Lang::Java ? 0 : 1;
          if (t.ptr != want)
            failAt(id, ParseCode::MalformedStatement,
                   "virtual-call receiver must be a plain object " +
                       std::string(want ? "pointer" : "reference"));
          p.origin.insert(id);
          break;
        }
        case StmtKind::DirectCall:
        case StmtKind::IndirectCall:
          for (const auto& a : st.args) requireVar(id, a);
          if (!st.retBind.empty()) requireVar(id, st.retBind);
          if (st.kind == StmtKind::IndirectCall) requireVar(id, st.callee);
          break;
        case StmtKind::Skip:
          break;
      }
    }
  }

  void scanProgramFacts() {
    for (const auto& [id, st] : p.statements) {
      if (st.kind != StmtKind::Assign) continue;
      if (st.rhs.kind == ExprKind::AddrOf) p.addrTakenVars.insert(st.rhs.var);
      if (st.lhs.kind == ExprKind::Deref || st.lhs.kind == ExprKind::Arrow)
        p.usedPointerVars.insert(st.lhs.var);
    }
  }

  void buildCfg(Cfg& cfg) {
    cfg.start = cfg.name + ".start";
    cfg.end = cfg.name + ".end";
    for (const auto& synth : {cfg.start, cfg.end}) {
      Statement sk;
      sk.id = synth;
      sk.kind = StmtKind::Skip;
      p.statements[synth] = sk;
      p.functionOf[synth] = cfg.name;
    }
    auto addEdge = [&](const std::string& a, const std::string& b) {
      cfg.succ[a].push_back(b);
      cfg.pred[b].push_back(a);
    };
    for (const auto& n : cfg.nodes) {
      cfg.succ[n];
      cfg.pred[n];
    }
    cfg.succ[cfg.start];
    cfg.pred[cfg.start];
    cfg.succ[cfg.end];
    cfg.pred[cfg.end];

    if (cfg.nodes.empty()) {
      addEdge(cfg.start, cfg.end);
    } else if (!cfg.explicitEdges) {
      addEdge(cfg.start, cfg.nodes.front());
      for (size_t i = 0; i + 1 < cfg.nodes.size(); ++i)
        addEdge(cfg.nodes[i], cfg.nodes[i + 1]);
      addEdge(cfg.nodes.back(), cfg.end);
    } else {
      std::set<std::string> inFunc(cfg.nodes.begin(), cfg.nodes.end());
      std::set<std::pair<std::string, std::string>> seenEdges;
      for (const auto& [a, b] : cfg.edgeList) {
        if (!inFunc.count(a) || !inFunc.count(b))
          throw ParseError(ParseCode::SyntaxError, 0, 0,
                           "edge references a label outside function '" +
                               cfg.name + "': " + a + "->" + b);
        if (seenEdges.emplace(a, b).second) addEdge(a, b);
      }
      // the first statement is always an entry and the last always exits
      // (a loop edge must not strand them); anything else without an
      // in-edge enters, anything without an out-edge exits
      addEdge(cfg.start, cfg.nodes.front());
      addEdge(cfg.nodes.back(), cfg.end);
      for (const auto& n : cfg.nodes) {
        if (cfg.pred[n].empty()) addEdge(cfg.start, n);
        if (cfg.succ[n].empty()) addEdge(n, cfg.end);
      }
    }

    // Reachability both ways; the analysis relies on it.
    auto reach = [&](const std::string& from,
                     const std::map<std::string, std::vector<std::string>>&
                         adj) {
      std::set<std::string> seen{from};
      std::deque<std::string> work{from};
      while (!work.empty()) {
        auto cur = work.front();
        work.pop_front();
        auto it = adj.find(cur);
        if (it == adj.end()) continue;
        for (const auto& nxt : it->second)
          if (seen.insert(nxt).second) work.push_back(nxt);
      }
      return seen;
    };
    auto fwd = reach(cfg.start, cfg.succ);
    auto bwd = reach(cfg.end, cfg.pred);
    for (const auto& n : cfg.nodes) {
      if (!fwd.count(n))
        failAt(n, ParseCode::MalformedStatement,
               "node unreachable from start of '" + cfg.name + "'");
      if (!bwd.count(n))
        failAt(n, ParseCode::MalformedStatement,
               "node cannot reach end of '" + cfg.name + "'");
    }
  }

  void finalize() {
    checkHierarchy();
    if (p.functions.empty())
      throw ParseError(ParseCode::SyntaxError, 0, 0, "no functions declared");
    checkStatements();
    scanProgramFacts();
    for (auto& [name, cfg] : p.functions) buildCfg(cfg);
    p.entry = p.functions.count("main") ? "main" : p.functionOrder.front();
  }
};

}  // namespace

ProgramIR parse_program(const std::string& text) {
  Parser parser;
  parser.run(text);
  return std::move(parser.p);
}

std::string print_program(const ProgramIR& p) {
  std::ostringstream os;
  if (p.lang == Lang::Java) os << "lang java\n";
  for (const auto& cname : p.classOrder) {
    const ClassDecl& c = p.classes.at(cname);
    os << "class " << c.name;
    if (!c.parent.empty()) os << " : " << c.parent;
    os << " {";
    for (const auto& [f, t] : c.fields) os << " field " << f << ": " << t.text();
    os << " }\n";
  }
  // virtual m in C1, C2 — grouped per method, classes in declaration order
  std::map<std::string, std::vector<std::string>> byMethod;
  for (const auto& cname : p.classOrder)
    for (const auto& m : p.classes.at(cname).virtuals)
      byMethod[m].push_back(cname);
  for (const auto& [m, clss] : byMethod) {
    os << "virtual " << m << " in ";
    for (size_t i = 0; i < clss.size(); ++i) {
      if (i) os << ", ";
      os << clss[i];
    }
    os << "\n";
  }
  for (const auto& fname : p.functionOrder) {
    const Cfg& cfg = p.functions.at(fname);
    os << "func " << fname << "(";
    for (size_t i = 0; i < cfg.params.size(); ++i) {
      if (i) os << ", ";
      os << cfg.params[i] << ": " << p.varTypes.at(cfg.params[i]).text();
    }
    os << ") {\n";
    std::set<std::string> paramSet(cfg.params.begin(), cfg.params.end());
    for (const auto& [v, owner] : p.varOwner) {
      if (owner != fname || paramSet.count(v)) continue;
      os << "  var " << v << ": " << p.varTypes.at(v).text() << "\n";
    }
    for (const auto& n : cfg.nodes) {
      Statement st = p.stmt(n);
      std::string body = st.text();
      if (st.kind == StmtKind::VirtualCall && p.lang == Lang::Java)
        body = "vcall " + st.receiver + "." + st.method + "()";
      os << "  " << n << ": " << body << "\n";
    }
    if (cfg.explicitEdges) {
      os << "  edges: ";
      bool first = true;
      for (const auto& n : cfg.nodes) {
        for (const auto& s : cfg.succ.at(n)) {
          if (s == cfg.end) continue;
          if (!first) os << ", ";
          os << n << "->" << s;
          first = false;
        }
      }
      os << "\n";
    }
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Supergraph
// ---------------------------------------------------------------------------

void Supergraph::addEdge(const std::string& from, const std::string& to) {
  if (hasEdge(from, to)) return;
  succ[from].push_back(to);
  pred[to].push_back(from);
}

bool Supergraph::hasEdge(const std::string& from,
                         const std::string& to) const {
  auto it = succ.find(from);
  if (it == succ.end()) return false;
  return std::find(it->second.begin(), it->second.end(), to) !=
         it->second.end();
}

bool Supergraph::spliceVirtualCallee(const ProgramIR& p,
                                     const std::string& callId,
                                     const std::string& calleeFn) {
  if (splicedCallees[callId].count(calleeFn)) return false;
  splicedCallees[callId].insert(calleeFn);
  auto it = p.functions.find(calleeFn);
  if (it == p.functions.end()) return false;  // no body: call-graph edge only
  addEdge(callId, it->second.start);
  for (const auto& ret : virtualReturnSites.at(callId))
    addEdge(it->second.end, ret);
  return true;
}

Supergraph build_supergraph(const ProgramIR& p) {
  Supergraph g;
  for (const auto& fname : p.functionOrder) {
    const Cfg& cfg = p.functions.at(fname);
    g.nodes[cfg.start] = p.stmt(cfg.start);
    g.nodes[cfg.end] = p.stmt(cfg.end);
    for (const auto& n : cfg.nodes) g.nodes[n] = p.stmt(n);
    for (const auto& [a, succs] : cfg.succ)
      for (const auto& b : succs) g.addEdge(a, b);
  }
  g.entryStart = p.functions.at(p.entry).start;
  g.entryEnd = p.functions.at(p.entry).end;

  auto detachSuccs = [&](const std::string& call) {
    std::vector<std::string> out = g.succ[call];
    for (const auto& s : out) {
      auto& ps = g.pred[s];
      ps.erase(std::remove(ps.begin(), ps.end(), call), ps.end());
    }
    g.succ[call].clear();
    return out;
  };

  // Binds call arguments to callee formals (and back through `ret`) with
  // plain copy assignments so the ordinary transfer functions apply.
  auto wireCall = [&](const Statement& call, const std::string& calleeFn,
                      const std::vector<std::string>& returnSites,
                      const std::string& chainTag) {
    auto fit = p.functions.find(calleeFn);
    if (fit == p.functions.end())
      throw ParseError(ParseCode::UnknownCallee, 0, 0,
                       "call to undeclared function '" + calleeFn +
                           "' (statement " + call.id + ")");
    const Cfg& callee = fit->second;
    if (callee.params.size() != call.args.size())
      throw ParseError(ParseCode::UnknownCallee, 0, 0,
                       "arity mismatch calling '" + calleeFn + "' at " +
                           call.id);
    std::string prev = call.id;
    for (size_t i = 0; i < call.args.size(); ++i) {
      Statement bind;
      bind.id = call.id + ".bind" + std::to_string(i) + chainTag;
      bind.kind = StmtKind::Assign;
      bind.lhs = AccessExpr::makeVar(callee.params[i]);
      bind.rhs = AccessExpr::makeVar(call.args[i]);
      g.nodes[bind.id] = bind;
      g.addEdge(prev, bind.id);
      prev = bind.id;
    }
    g.addEdge(prev, callee.start);
    if (!call.retBind.empty()) {
      Statement ret;
      ret.id = call.id + ".ret" + chainTag;
      if (p.varTypes.count("ret") && p.varOwner.at("ret") == calleeFn) {
        ret.kind = StmtKind::Assign;
        ret.lhs = AccessExpr::makeVar(call.retBind);
        ret.rhs = AccessExpr::makeVar("ret");
      } else {
        ret.kind = StmtKind::Skip;
      }
      g.nodes[ret.id] = ret;
      g.addEdge(callee.end, ret.id);
      for (const auto& s : returnSites) g.addEdge(ret.id, s);
    } else {
      for (const auto& s : returnSites) g.addEdge(callee.end, s);
    }
  };

  for (const auto& fname : p.functionOrder) {
    const Cfg& cfg = p.functions.at(fname);
    for (const auto& n : cfg.nodes) {
      const Statement& st = p.stmt(n);
      if (st.kind == StmtKind::DirectCall) {
        auto rets = detachSuccs(n);
        wireCall(st, st.callee, rets, "");
      } else if (st.kind == StmtKind::IndirectCall) {
        auto rets = detachSuccs(n);
        for (const auto& t : st.targets) wireCall(st, t, rets, "@" + t);
      } else if (st.kind == StmtKind::VirtualCall) {
        // keep fallthrough; callees are discovered during the solve
        g.virtualReturnSites[n] = g.succ[n];
      }
    }
  }
  for (const auto& [id, st] : g.nodes) {
    g.succ[id];
    g.pred[id];
  }
  return g;
}

}  // namespace aa
