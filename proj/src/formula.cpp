#include "yonet/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace yonet {

namespace {
FormulaPtr node(Conn tag, std::string var, FormulaPtr l, FormulaPtr r, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  const_cast<Formula&>(*f).tag = tag;
  const_cast<Formula&>(*f).var = std::move(var);
  const_cast<Formula&>(*f).left = std::move(l);
  const_cast<Formula&>(*f).right = std::move(r);
  const_cast<Formula&>(*f).body = std::move(b);
  return f;
}
}  // namespace

FormulaPtr Formula::atom(const std::string& v) { return node(Conn::Atom, v, nullptr, nullptr, nullptr); }
FormulaPtr Formula::natom(const std::string& v) { return node(Conn::NegAtom, v, nullptr, nullptr, nullptr); }
FormulaPtr Formula::tensor(FormulaPtr l, FormulaPtr r) { return node(Conn::Tensor, "", std::move(l), std::move(r), nullptr); }
FormulaPtr Formula::par(FormulaPtr l, FormulaPtr r) { return node(Conn::Par, "", std::move(l), std::move(r), nullptr); }
FormulaPtr Formula::forall(const std::string& v, FormulaPtr b) { return node(Conn::Forall, v, nullptr, nullptr, std::move(b)); }
FormulaPtr Formula::exists(const std::string& v, FormulaPtr b) { return node(Conn::Exists, v, nullptr, nullptr, std::move(b)); }
FormulaPtr Formula::one() { return node(Conn::One, "", nullptr, nullptr, nullptr); }
FormulaPtr Formula::bot() { return node(Conn::Bot, "", nullptr, nullptr, nullptr); }

// ---------------------------------------------------------------- parsing

namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    if (pos >= text.size() || !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      throw ParseError("expected identifier", pos);
    while (pos < text.size() && ident_char(text[pos])) pos++;
    return text.substr(start, pos - start);
  }
  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    pos++;
  }
};

FormulaPtr parse_expr(Lexer& lx) {
  lx.skip_ws();
  if (lx.pos >= lx.text.size()) throw ParseError("unexpected end of input", lx.pos);
  char c = lx.text[lx.pos];
  if (c == '~') {
    lx.pos++;
    FormulaPtr f = parse_expr(lx);
    return dual(f);
  }
  if (c == '(') {
    lx.pos++;
    FormulaPtr l = parse_expr(lx);
    lx.skip_ws();
    if (lx.pos >= lx.text.size()) throw ParseError("expected '*' or '@'", lx.pos);
    char op = lx.text[lx.pos];
    if (op != '*' && op != '@') throw ParseError("expected '*' or '@'", lx.pos);
    lx.pos++;
    FormulaPtr r = parse_expr(lx);
    lx.expect(')');
    return op == '*' ? Formula::tensor(l, r) : Formula::par(l, r);
  }
  if (c == '1') {
    lx.pos++;
    return Formula::one();
  }
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    size_t at = lx.pos;
    std::string id = lx.ident();
    if (id == "bot") return Formula::bot();
    if (id == "all" || id == "ex") {
      std::string v = lx.ident();
      if (v == "all" || v == "ex" || v == "bot") throw ParseError("reserved word used as variable", at);
      lx.expect('.');
      FormulaPtr b = parse_expr(lx);
      return id == "all" ? Formula::forall(v, b) : Formula::exists(v, b);
    }
    return Formula::atom(id);
  }
  throw ParseError("unknown token", lx.pos);
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  Lexer lx(text);
  FormulaPtr f = parse_expr(lx);
  if (!lx.eof()) throw ParseError("trailing input", lx.pos);
  return f;
}

std::string render(const FormulaPtr& f) {
  switch (f->tag) {
    case Conn::Atom: return f->var;
    case Conn::NegAtom: return "~" + f->var;
    case Conn::Tensor: return "(" + render(f->left) + " * " + render(f->right) + ")";
    case Conn::Par: return "(" + render(f->left) + " @ " + render(f->right) + ")";
    case Conn::Forall: return "all " + f->var + "." + render(f->body);
    case Conn::Exists: return "ex " + f->var + "." + render(f->body);
    case Conn::One: return "1";
    case Conn::Bot: return "bot";
  }
  return "?";
}

// ------------------------------------------------------------- structure

FormulaPtr dual(const FormulaPtr& f) {
  switch (f->tag) {
    case Conn::Atom: return Formula::natom(f->var);
    case Conn::NegAtom: return Formula::atom(f->var);
    case Conn::Tensor: return Formula::par(dual(f->left), dual(f->right));
    case Conn::Par: return Formula::tensor(dual(f->left), dual(f->right));
    case Conn::Forall: return Formula::exists(f->var, dual(f->body));
    case Conn::Exists: return Formula::forall(f->var, dual(f->body));
    case Conn::One: return Formula::bot();
    case Conn::Bot: return Formula::one();
  }
  return f;
}

namespace {
void vars_rec(const FormulaPtr& f, std::set<std::string>& bound_here,
              std::set<std::string>& free_out, std::set<std::string>& bound_out) {
  switch (f->tag) {
    case Conn::Atom:
    case Conn::NegAtom:
      if (!bound_here.count(f->var)) free_out.insert(f->var);
      break;
    case Conn::Tensor:
    case Conn::Par:
      vars_rec(f->left, bound_here, free_out, bound_out);
      vars_rec(f->right, bound_here, free_out, bound_out);
      break;
    case Conn::Forall:
    case Conn::Exists: {
      bound_out.insert(f->var);
      bool fresh = bound_here.insert(f->var).second;
      vars_rec(f->body, bound_here, free_out, bound_out);
      if (fresh) bound_here.erase(f->var);
      break;
    }
    case Conn::One:
    case Conn::Bot: break;
  }
}
}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> b, fr, bo;
  vars_rec(f, b, fr, bo);
  return fr;
}

std::set<std::string> bound_vars(const FormulaPtr& f) {
  std::set<std::string> b, fr, bo;
  vars_rec(f, b, fr, bo);
  return bo;
}

std::set<std::string> all_vars(const FormulaPtr& f) {
  std::set<std::string> b, fr, bo;
  vars_rec(f, b, fr, bo);
  fr.insert(bo.begin(), bo.end());
  return fr;
}

bool occurs_free(const FormulaPtr& f, const std::string& var) {
  return free_vars(f).count(var) > 0;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  for (int i = 1;; i++) {
    std::string cand = base + std::to_string(i);
    if (!used.count(cand)) return cand;
  }
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const FormulaPtr& replacement) {
  switch (f->tag) {
    case Conn::Atom:
      return f->var == var ? replacement : f;
    case Conn::NegAtom:
      return f->var == var ? dual(replacement) : f;
    case Conn::Tensor:
      return Formula::tensor(substitute(f->left, var, replacement),
                             substitute(f->right, var, replacement));
    case Conn::Par:
      return Formula::par(substitute(f->left, var, replacement),
                          substitute(f->right, var, replacement));
    case Conn::Forall:
    case Conn::Exists: {
      if (f->var == var) return f;  // shadowed
      if (!occurs_free(f->body, var)) return f;
      std::string v = f->var;
      FormulaPtr body = f->body;
      if (occurs_free(replacement, v)) {
        std::set<std::string> used = all_vars(replacement);
        auto bv = all_vars(body);
        used.insert(bv.begin(), bv.end());
        used.insert(var);
        std::string v2 = fresh_name(v, used);
        body = substitute(body, v, Formula::atom(v2));
        v = v2;
      }
      body = substitute(body, var, replacement);
      return f->tag == Conn::Forall ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    case Conn::One:
    case Conn::Bot:
      return f;
  }
  return f;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Conn::Atom:
    case Conn::NegAtom: return a->var == b->var;
    case Conn::Tensor:
    case Conn::Par: return equal(a->left, b->left) && equal(a->right, b->right);
    case Conn::Forall:
    case Conn::Exists: return a->var == b->var && equal(a->body, b->body);
    case Conn::One:
    case Conn::Bot: return true;
  }
  return false;
}

namespace {
bool alpha_rec(const FormulaPtr& a, const FormulaPtr& b,
               std::vector<std::pair<std::string, std::string>>& env) {
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case Conn::Atom:
    case Conn::NegAtom: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == a->var || it->second == b->var)
          return it->first == a->var && it->second == b->var;
      }
      return a->var == b->var;
    }
    case Conn::Tensor:
    case Conn::Par:
      return alpha_rec(a->left, b->left, env) && alpha_rec(a->right, b->right, env);
    case Conn::Forall:
    case Conn::Exists: {
      env.emplace_back(a->var, b->var);
      bool ok = alpha_rec(a->body, b->body, env);
      env.pop_back();
      return ok;
    }
    case Conn::One:
    case Conn::Bot: return true;
  }
  return false;
}
}  // namespace

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  std::vector<std::pair<std::string, std::string>> env;
  return alpha_rec(a, b, env);
}

FormulaPtr subformula_at(const FormulaPtr& f, const std::string& path) {
  FormulaPtr cur = f;
  for (char c : path) {
    switch (c) {
      case 'L':
        if (!cur->is_binary()) throw std::runtime_error("bad path (L) in " + render(f));
        cur = cur->left;
        break;
      case 'R':
        if (!cur->is_binary()) throw std::runtime_error("bad path (R) in " + render(f));
        cur = cur->right;
        break;
      case 'B':
        if (!cur->is_quant()) throw std::runtime_error("bad path (B) in " + render(f));
        cur = cur->body;
        break;
      default:
        throw std::runtime_error("bad path char");
    }
  }
  return cur;
}

FormulaPtr replace_at(const FormulaPtr& f, const std::string& path, const FormulaPtr& sub) {
  if (path.empty()) return sub;
  char c = path[0];
  std::string rest = path.substr(1);
  switch (c) {
    case 'L': {
      if (!f->is_binary()) throw std::runtime_error("bad path");
      auto l = replace_at(f->left, rest, sub);
      return f->tag == Conn::Tensor ? Formula::tensor(l, f->right) : Formula::par(l, f->right);
    }
    case 'R': {
      if (!f->is_binary()) throw std::runtime_error("bad path");
      auto r = replace_at(f->right, rest, sub);
      return f->tag == Conn::Tensor ? Formula::tensor(f->left, r) : Formula::par(f->left, r);
    }
    case 'B': {
      if (!f->is_quant()) throw std::runtime_error("bad path");
      auto b = replace_at(f->body, rest, sub);
      return f->tag == Conn::Forall ? Formula::forall(f->var, b) : Formula::exists(f->var, b);
    }
    default: throw std::runtime_error("bad path char");
  }
}

NodeRef NodeRef::parse(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::runtime_error("bad node ref: " + s);
  NodeRef r;
  r.root = std::stoi(s.substr(0, colon));
  r.path = s.substr(colon + 1);
  return r;
}

// -------------------------------------------------------------- sequents

std::vector<int> Sequent::conclusion_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(formulas.size()); i++)
    if (!is_cut_formula(i)) out.push_back(i);
  return out;
}

bool is_clean(const Sequent& s) {
  std::set<std::string> free_all, bound_all;
  int binders = 0;
  for (auto& f : s.formulas) {
    auto fr = free_vars(f);
    free_all.insert(fr.begin(), fr.end());
    std::set<std::string> b, frx, bo;
    vars_rec(f, b, frx, bo);
    bound_all.insert(bo.begin(), bo.end());
    // count binder occurrences
    std::vector<FormulaPtr> stack{f};
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      if (cur->is_quant()) binders++;
      if (cur->is_binary()) { stack.push_back(cur->left); stack.push_back(cur->right); }
      if (cur->is_quant()) stack.push_back(cur->body);
    }
  }
  for (auto& v : bound_all)
    if (free_all.count(v)) return false;
  return binders == static_cast<int>(bound_all.size());
}

FormulaPtr cleaned_formula(const FormulaPtr& f, std::set<std::string>& used) {
  struct Walk {
    std::set<std::string>& used;
    FormulaPtr go(const FormulaPtr& g, std::vector<std::pair<std::string, std::string>>& env) {
      switch (g->tag) {
        case Conn::Atom:
        case Conn::NegAtom: {
          for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == g->var)
              return g->tag == Conn::Atom ? Formula::atom(it->second) : Formula::natom(it->second);
          return g;
        }
        case Conn::Tensor: return Formula::tensor(go(g->left, env), go(g->right, env));
        case Conn::Par: return Formula::par(go(g->left, env), go(g->right, env));
        case Conn::Forall:
        case Conn::Exists: {
          std::string v = fresh_name(g->var, used);
          used.insert(v);
          env.emplace_back(g->var, v);
          FormulaPtr b = go(g->body, env);
          env.pop_back();
          return g->tag == Conn::Forall ? Formula::forall(v, b) : Formula::exists(v, b);
        }
        case Conn::One:
        case Conn::Bot: return g;
      }
      return g;
    }
  } walk{used};
  std::vector<std::pair<std::string, std::string>> env;
  return walk.go(f, env);
}

Sequent cleaned(const Sequent& s) {
  std::set<std::string> used;
  for (auto& f : s.formulas) {
    auto fr = free_vars(f);
    used.insert(fr.begin(), fr.end());
  }
  Sequent out;
  out.cuts = s.cuts;
  for (auto& f : s.formulas) out.formulas.push_back(cleaned_formula(f, used));
  return out;
}

// ------------------------------------------------------- Yoneda fragment

namespace {
// Counts free occurrences of var with the given polarity (true = positive).
int count_occ(const FormulaPtr& f, const std::string& var, bool positive) {
  switch (f->tag) {
    case Conn::Atom: return (positive && f->var == var) ? 1 : 0;
    case Conn::NegAtom: return (!positive && f->var == var) ? 1 : 0;
    case Conn::Tensor:
    case Conn::Par:
      return count_occ(f->left, var, positive) + count_occ(f->right, var, positive);
    case Conn::Forall:
    case Conn::Exists:
      return f->var == var ? 0 : count_occ(f->body, var, positive);
    case Conn::One:
    case Conn::Bot: return 0;
  }
  return 0;
}

// Path of the unique free occurrence of var with given polarity, if any.
bool find_occ(const FormulaPtr& f, const std::string& var, bool positive, std::string& path) {
  switch (f->tag) {
    case Conn::Atom: return positive && f->var == var;
    case Conn::NegAtom: return !positive && f->var == var;
    case Conn::Tensor:
    case Conn::Par: {
      std::string save = path;
      path += 'L';
      if (find_occ(f->left, var, positive, path)) return true;
      path = save + 'R';
      if (find_occ(f->right, var, positive, path)) return true;
      path = save;
      return false;
    }
    case Conn::Forall:
    case Conn::Exists: {
      if (f->var == var) return false;
      std::string save = path;
      path += 'B';
      if (find_occ(f->body, var, positive, path)) return true;
      path = save;
      return false;
    }
    default: return false;
  }
}
}  // namespace

std::optional<YonedaDecomposition> yoneda_decompose(const FormulaPtr& f) {
  if (!f->is_quant()) return std::nullopt;
  const std::string& x = f->var;
  FormulaPtr body = f->body;
  YonedaDecomposition d;
  d.var = x;
  d.co = f->tag == Conn::Exists;

  Conn outer = d.co ? Conn::Tensor : Conn::Par;   // body connective
  Conn spine = d.co ? Conn::Par : Conn::Tensor;   // left factor spine
  if (body->tag != outer) return std::nullopt;
  d.spine_path = "L";

  // Walk the spine: C1 . (C2 . ... (Cn . slot)) where slot is ~X (resp. X).
  FormulaPtr cur = body->left;
  std::string slot = "L";
  while (cur->tag == spine) {
    if (count_occ(cur->left, x, true) + count_occ(cur->left, x, false) != 0) return std::nullopt;
    d.sides.push_back(cur->left);
    slot += 'R';
    cur = cur->right;
  }
  bool slot_ok = d.co ? (cur->tag == Conn::Atom && cur->var == x)
                      : (cur->tag == Conn::NegAtom && cur->var == x);
  if (!slot_ok) return std::nullopt;
  d.slot_path = slot;

  // The other factor is D with exactly one hole occurrence and nothing else.
  FormulaPtr dpart = body->right;
  bool hole_pos = !d.co;  // Forall: positive X in D; Exists: negative
  if (count_occ(dpart, x, hole_pos) != 1 || count_occ(dpart, x, !hole_pos) != 0)
    return std::nullopt;
  std::string hole = "R";
  if (!find_occ(dpart, x, hole_pos, hole)) return std::nullopt;
  d.hole_path = hole;
  return d;
}

bool is_unit_forall(const FormulaPtr& f) {
  return f->tag == Conn::Forall && f->body->tag == Conn::Par &&
         f->body->left->tag == Conn::NegAtom && f->body->left->var == f->var &&
         f->body->right->tag == Conn::Atom && f->body->right->var == f->var;
}

bool is_unit_exists(const FormulaPtr& f) {
  return f->tag == Conn::Exists && f->body->tag == Conn::Tensor &&
         f->body->left->tag == Conn::Atom && f->body->left->var == f->var &&
         f->body->right->tag == Conn::NegAtom && f->body->right->var == f->var;
}

bool in_yoneda_fragment(const FormulaPtr& f) {
  switch (f->tag) {
    case Conn::Atom:
    case Conn::NegAtom: return true;
    case Conn::One:
    case Conn::Bot: return false;
    case Conn::Tensor:
    case Conn::Par: return in_yoneda_fragment(f->left) && in_yoneda_fragment(f->right);
    case Conn::Forall:
    case Conn::Exists:
      return yoneda_decompose(f).has_value() && in_yoneda_fragment(f->body);
  }
  return false;
}

Fragment classify_fragment(const Sequent& s) {
  bool unit_only = true;
  for (auto& f : s.formulas) {
    std::vector<FormulaPtr> stack{f};
    while (!stack.empty()) {
      FormulaPtr cur = stack.back();
      stack.pop_back();
      if (cur->is_unit()) return Fragment::Full;
      if (cur->is_quant()) {
        if (!yoneda_decompose(cur)) return Fragment::Full;
        if (!(is_unit_forall(cur) || is_unit_exists(cur))) unit_only = false;
        stack.push_back(cur->body);
      }
      if (cur->is_binary()) { stack.push_back(cur->left); stack.push_back(cur->right); }
    }
  }
  return unit_only ? Fragment::UnitOnly : Fragment::Yoneda;
}

FormulaPtr yoneda_translate_formula(const FormulaPtr& f) {
  switch (f->tag) {
    case Conn::Atom:
    case Conn::NegAtom:
    case Conn::One:
    case Conn::Bot: return f;
    case Conn::Tensor:
      return Formula::tensor(yoneda_translate_formula(f->left), yoneda_translate_formula(f->right));
    case Conn::Par:
      return Formula::par(yoneda_translate_formula(f->left), yoneda_translate_formula(f->right));
    case Conn::Forall:
    case Conn::Exists: {
      FormulaPtr tbody = yoneda_translate_formula(f->body);
      FormulaPtr tf = f->tag == Conn::Forall ? Formula::forall(f->var, tbody)
                                             : Formula::exists(f->var, tbody);
      auto d = yoneda_decompose(tf);
      if (!d) throw NotInFragment("not a Yoneda quantifier: " + render(f));
      // Replace the ~X (resp. X) slot by 1 (resp. bot), then plug the whole
      // spine into the hole of D. Shapes are preserved as written.
      FormulaPtr unit = f->tag == Conn::Forall ? Formula::one() : Formula::bot();
      FormulaPtr spine = subformula_at(tbody, d->spine_path);
      FormulaPtr filled = replace_at(spine, d->slot_path.substr(1), unit);
      FormulaPtr dpart = tbody->right;
      return replace_at(dpart, d->hole_path.substr(1), filled);
    }
  }
  return f;
}

int s_measure(const FormulaPtr& f) {
  switch (f->tag) {
    case Conn::Atom:
    case Conn::NegAtom: return 0;
    case Conn::Tensor:
    case Conn::Par: return s_measure(f->left) + s_measure(f->right) + 1;
    case Conn::One:
    case Conn::Bot: throw NotInFragment("s undefined on units");
    case Conn::Forall:
    case Conn::Exists: {
      if (is_unit_forall(f) || is_unit_exists(f)) return 1;
      auto d = yoneda_decompose(f);
      if (!d) throw NotInFragment("not a Yoneda quantifier: " + render(f));
      // s(D[C]) + 3 where C is the tensor (resp. par) of the side formulas.
      int sd = 0;
      FormulaPtr dpart = f->body->right;
      FormulaPtr hole_filled = replace_at(dpart, d->hole_path.substr(1), Formula::atom(d->var));
      sd += s_measure(hole_filled);
      int sc = 0;
      for (auto& c : d->sides) sc += s_measure(c);
      if (!d->sides.empty()) sc += static_cast<int>(d->sides.size()) - 1;
      return sd + sc + 3;
    }
  }
  return 0;
}

}  // namespace yonet
