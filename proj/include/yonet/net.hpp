#ifndef YONET_NET_HPP
#define YONET_NET_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "yonet/formula.hpp"

// Girard proof structures and nets. A net stores the sequent, the axiom
// edges over the leaves of the instantiated parse forest, the witness
// formula of every existential link, and the lax thinning attachment of
// every bot link. The instantiated forest itself (existential premises
// unfolded with their witnesses) is derived on demand.

namespace yonet {

struct GNet {
  Sequent sequent;
  std::vector<Edge> axioms;
  std::map<NodeRef, FormulaPtr> witnesses;  // Exists node -> witness formula
  std::map<NodeRef, NodeRef> thinning;      // Bot leaf -> attachment node
};

enum class NetFault { DanglingLeaf, DirtySequent, BadWitness };

struct ValidationError : std::runtime_error {
  NetFault fault;
  ValidationError(NetFault f, const std::string& msg) : std::runtime_error(msg), fault(f) {}
};

struct NotSequentializable : std::runtime_error {
  explicit NotSequentializable(const std::string& msg) : std::runtime_error(msg) {}
};

struct NetNode {
  NodeRef ref;
  FormulaPtr formula;   // instantiated formula at this position
  Conn tag;
  std::string var;      // eigenvariable (Forall) or bound variable (Exists)
  FormulaPtr witness;   // Exists only
  int parent = -1;
  std::vector<int> kids;
};

// Derived view of a net: instantiated forest plus the jump relation.
struct NetIndex {
  std::vector<NetNode> nodes;
  std::map<NodeRef, int> by_ref;
  std::vector<int> roots;
  std::vector<std::pair<int, int>> jump_pairs;  // (forall node, exists node)

  explicit NetIndex(const GNet& g);
  const NetNode& at(const NodeRef& r) const;
  int id_of(const NodeRef& r) const;
  bool in_subtree(int node, int root) const;
};

void validate_structure(const GNet& g);

// Switching criterion: every switching acyclic and connected, decided by
// graph contraction (polynomial).
bool is_correct_gnet(const GNet& g, long cap = 1L << 20);

// The same criterion by brute-force enumeration of all switchings; the
// independent oracle for the contraction procedure. Throws when the number
// of switchings exceeds the cap.
bool is_correct_gnet_enumerated(const GNet& g, long cap = 1L << 20);

std::map<NodeRef, std::vector<NodeRef>> jumps(const GNet& g);

// Appendix-style frame: encode jumps as fresh axioms, delete quantifiers.
GNet frame(const GNet& g);

enum class Rule { Ax, Tensor, Par, Forall, Exists, Cut, One, Bot };

struct Derivation;
using DerivationPtr = std::shared_ptr<Derivation>;

struct Derivation {
  Rule rule;
  std::vector<FormulaPtr> conclusions;
  int a = -1;              // principal index (Par/Forall/Exists/Bot/Tensor/Cut)
  FormulaPtr witness;      // Exists
  std::string eigen;       // Forall
  NodeRef bot_target;      // Bot: attachment in the child net
  // Tensor/Cut: how the parent conclusions split between the two children.
  std::vector<int> left_map, right_map;
  std::vector<DerivationPtr> kids;
};

Derivation sequentialize(const GNet& g);
GNet net_of_derivation(const Derivation& d);

// One step of net-level cut elimination on the leftmost cut; nullopt when
// cut-free.
std::optional<GNet> gnet_reduce_step(const GNet& g);
GNet gnet_reduce(const GNet& g);

// Yoneda isomorphism template nets (components of A must carry no nested
// quantifier other than the bound variable pattern itself).
GNet yo1_net(const FormulaPtr& a);  // conclusions: dual(yoneda(A)), all X.A
GNet yo2_net(const FormulaPtr& a);  // conclusions: yoneda(A), dual(all X.A)

// Disjoint union of two nets with a cut between conclusion i1 of g1 and
// conclusion i2 of g2 (formulas must be dual up to renaming).
GNet join_cut(const GNet& g1, int i1, const GNet& g2, int i2);

// Structural isomorphism: same shapes and wiring up to renaming of bound
// variables (conclusions compared positionally).
bool gnet_iso(const GNet& g1, const GNet& g2);

std::string to_json(const GNet& g);
GNet gnet_from_json(const std::string& text);
std::string to_dot(const GNet& g);

}  // namespace yonet

#endif
