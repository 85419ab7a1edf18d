#ifndef YONET_ELINK_HPP
#define YONET_ELINK_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yonet/formula.hpp"
#include "yonet/net.hpp"

// Compact nets: an existential linking is a set of disjoint axiom edges over
// the plain parse forest together with an injective witnessing function from
// co-edges (the paired occurrences of each existentially bound variable) to
// nodes. Expansion recovers the Girard net.

namespace yonet {

struct CoEdge {
  NodeRef exists;  // the exists node owning the pair
  NodeRef pos;     // positive occurrence of the bound variable
  NodeRef neg;     // negative occurrence
  std::string var;

  bool operator<(const CoEdge& o) const { return exists < o.exists; }
};

struct ELinking {
  Sequent sequent;
  std::vector<Edge> edges;
  std::map<NodeRef, NodeRef> witness;  // exists node -> target node
  std::vector<int> auxiliary;          // widening conclusions added by make_ready

  bool operator==(const ELinking& o) const {
    auto norm = [](const ELinking& l) {
      std::vector<Edge> e = l.edges;
      for (auto& x : e) x = mk_edge(x.first, x.second);
      std::sort(e.begin(), e.end());
      return e;
    };
    if (sequent.formulas.size() != o.sequent.formulas.size()) return false;
    for (size_t i = 0; i < sequent.formulas.size(); i++)
      if (!alpha_equal(sequent.formulas[i], o.sequent.formulas[i])) return false;
    return sequent.cuts == o.sequent.cuts && norm(*this) == norm(o) && witness == o.witness;
  }
};

struct CyclicWitness : std::runtime_error {
  explicit CyclicWitness(const std::string& msg) : std::runtime_error(msg) {}
};

FormulaPtr formula_at_ref(const Sequent& s, const NodeRef& r);

// One co-edge per exists node of the plain forest, located through the
// co-Yoneda decomposition of its body.
std::vector<CoEdge> coedges(const Sequent& s);

// Every variable occurring existentially somewhere in the sequent, mapped to
// its co-edge.
std::map<std::string, CoEdge> existential_vars(const Sequent& s);

// Well-formedness: clean sequent, dual cut pairs, disjoint edges covering
// exactly the non-existential atom leaves, injective total witness map.
void validate_elinking(const ELinking& l);

struct DependencyGraph {
  std::vector<CoEdge> coedges;
  std::vector<std::pair<int, int>> arcs;  // c -> c' when W(c) depends on c'
};

DependencyGraph dependency_graph(const ELinking& l);
bool is_acyclic(const ELinking& l);

// W(c) with every existential variable replaced by its ground witness,
// recursively along the dependency graph.
FormulaPtr ground_witness(const ELinking& l, const CoEdge& c);

// The Girard net pi(l), by repeated co-edge expansion in dependency order.
GNet expand(const ELinking& l);

// acyclic and pi(l) is a G-net; false as well when some ground witness
// contains an existential quantifier (no net reading exists for those).
bool is_correct_elinking(const ELinking& l, long cap = 1L << 20);

// Identity linking over dual(A), A; Yoneda-shaped template at quantifiers.
ELinking identity_linking(const FormulaPtr& a);

// Mirror wiring between the dual subtrees at a and b, following the identity
// template at quantifier pairs (eigen edge on the universal side, co-edge
// witnessed by its hole occurrence on the existential side). Subtrees at
// relative paths in skip_rel are left untouched.
void identity_wiring(const NodeRef& a, const FormulaPtr& fa, const NodeRef& b,
                     const FormulaPtr& fb, const std::set<std::string>& skip_rel, ELinking& out);

std::string to_json(const ELinking& l);
ELinking elinking_from_json(const std::string& text);
std::string to_dot(const ELinking& l);

}  // namespace yonet

#endif
