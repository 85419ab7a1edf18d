#ifndef YONET_FORMULA_HPP
#define YONET_FORMULA_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// The object language: second-order multiplicative formulas in negation
// normal form, with units for the extended nets. Formulas are immutable
// trees shared by handle; every node is addressed by a path over {L,R,B}
// from its root.

namespace yonet {

enum class Conn { Atom, NegAtom, Tensor, Par, Forall, Exists, One, Bot };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

class Formula : public std::enable_shared_from_this<Formula> {
public:
  Conn tag;
  std::string var;    // Atom/NegAtom: variable name; Forall/Exists: bound variable
  FormulaPtr left;    // Tensor/Par
  FormulaPtr right;   // Tensor/Par
  FormulaPtr body;    // Forall/Exists

  static FormulaPtr atom(const std::string& v);
  static FormulaPtr natom(const std::string& v);
  static FormulaPtr tensor(FormulaPtr l, FormulaPtr r);
  static FormulaPtr par(FormulaPtr l, FormulaPtr r);
  static FormulaPtr forall(const std::string& v, FormulaPtr b);
  static FormulaPtr exists(const std::string& v, FormulaPtr b);
  static FormulaPtr one();
  static FormulaPtr bot();

  bool is_atom() const { return tag == Conn::Atom || tag == Conn::NegAtom; }
  bool is_binary() const { return tag == Conn::Tensor || tag == Conn::Par; }
  bool is_quant() const { return tag == Conn::Forall || tag == Conn::Exists; }
  bool is_unit() const { return tag == Conn::One || tag == Conn::Bot; }
  bool is_leaf() const { return is_atom() || is_unit(); }
};

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

struct NotInFragment : std::runtime_error {
  explicit NotInFragment(const std::string& msg) : std::runtime_error(msg) {}
};

// Grammar (ASCII): F ::= ident | "~" F | "(" F "*" F ")" | "(" F "@" F ")"
//                      | "all" ident "." F | "ex" ident "." F | "1" | "bot"
FormulaPtr parse_formula(const std::string& text);
std::string render(const FormulaPtr& f);

FormulaPtr dual(const FormulaPtr& f);

// Capture-avoiding; binders in f are freshened when they would capture.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const FormulaPtr& replacement);

bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

std::set<std::string> free_vars(const FormulaPtr& f);
std::set<std::string> bound_vars(const FormulaPtr& f);
std::set<std::string> all_vars(const FormulaPtr& f);
bool occurs_free(const FormulaPtr& f, const std::string& var);

// Paths: "" is the root, then L/R for binary children, B for quantifier body.
FormulaPtr subformula_at(const FormulaPtr& f, const std::string& path);
FormulaPtr replace_at(const FormulaPtr& f, const std::string& path, const FormulaPtr& sub);

// A subformula occurrence inside a sequent: formula index plus path.
struct NodeRef {
  int root = 0;
  std::string path;

  bool operator==(const NodeRef& o) const { return root == o.root && path == o.path; }
  bool operator!=(const NodeRef& o) const { return !(*this == o); }
  bool operator<(const NodeRef& o) const {
    return root != o.root ? root < o.root : path < o.path;
  }
  std::string str() const { return std::to_string(root) + ":" + path; }
  static NodeRef parse(const std::string& s);
  bool is_prefix_of(const NodeRef& o) const {
    return root == o.root && o.path.compare(0, path.size(), path) == 0;
  }
};

using Edge = std::pair<NodeRef, NodeRef>;
inline Edge mk_edge(NodeRef a, NodeRef b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Sequent: formula list plus cut pairs given as index pairs into the list.
// The second component of a cut pair is the dual of the first up to renaming
// of bound variables.
struct Sequent {
  std::vector<FormulaPtr> formulas;
  std::vector<std::pair<int, int>> cuts;

  bool is_cut_formula(int i) const {
    for (auto& [a, b] : cuts)
      if (a == i || b == i) return true;
    return false;
  }
  std::vector<int> conclusion_indices() const;
};

bool is_clean(const Sequent& s);
// Renames bound variables so that every binder is distinct and no variable
// occurs both free and bound. Free variables are never renamed.
Sequent cleaned(const Sequent& s);
FormulaPtr cleaned_formula(const FormulaPtr& f, std::set<std::string>& used);

enum class Fragment { Full, Yoneda, UnitOnly };
Fragment classify_fragment(const Sequent& s);
bool in_yoneda_fragment(const FormulaPtr& f);

// A is Yoneda in X when A = L par D[X] with L a right-nested tensor spine
// C1 * (C2 * ... (Cn * ~X)), X absent from the Ci, and D a one-hole positive
// context with exactly one occurrence of X. Co-Yoneda is the dual shape.
struct YonedaDecomposition {
  std::string var;
  std::vector<FormulaPtr> sides;  // C1..Cn as they appear (dualized on the co side)
  std::string spine_path;         // path of the spine (left operand) from the body root
  std::string slot_path;          // path of the ~X (resp. X) slot from the body root
  std::string hole_path;          // path of the X (resp. ~X) hole in D from the body root
  bool co = false;                // false: Yoneda (Forall side), true: co-Yoneda (Exists side)
};

// f must be a quantified formula; returns nullopt when the body does not match.
std::optional<YonedaDecomposition> yoneda_decompose(const FormulaPtr& f);

bool is_unit_forall(const FormulaPtr& f);  // all X.(~X @ X)
bool is_unit_exists(const FormulaPtr& f);  // ex X.(X * ~X)

// Quantifier-free MLL+units image of a fragment formula.
FormulaPtr yoneda_translate_formula(const FormulaPtr& f);

// Termination measure for cut elimination; defined on the fragment.
int s_measure(const FormulaPtr& f);

std::string fresh_name(const std::string& base, const std::set<std::string>& used);

}  // namespace yonet

#endif
