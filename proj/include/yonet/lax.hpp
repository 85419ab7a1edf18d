#ifndef YONET_LAX_HPP
#define YONET_LAX_HPP

#include <map>
#include <string>
#include <vector>

#include "yonet/elink.hpp"
#include "yonet/formula.hpp"
#include "yonet/net.hpp"

// Lax linkings: quantifier-free multiplicative linkings with units, every
// bot carrying a thinning edge to some node. Rewiring moves retarget one
// thinning edge at a time through correct linkings.

namespace yonet {

struct LaxLinking {
  Sequent sequent;
  std::vector<Edge> edges;
  std::map<NodeRef, NodeRef> thinning;

  GNet as_net() const {
    GNet g;
    g.sequent = sequent;
    g.axioms = edges;
    g.thinning = thinning;
    return g;
  }
};

void validate_lax(const LaxLinking& k);
bool is_correct_lax(const LaxLinking& k, long cap = 1L << 20);

// Identity lax linking over dual(f), f; thinning edges attach to the mirror
// occurrence.
LaxLinking lax_identity(const FormulaPtr& f);

// All correct single-retarget rewirings.
std::vector<LaxLinking> lax_neighbors(const LaxLinking& k, long cap = 1L << 20);

// Rewiring equivalence; same sequent and axiom edges required.
bool lax_equivalent(const LaxLinking& k1, const LaxLinking& k2, long max_states = 1000000);

// The linking-level Yoneda translation: co-edges become bot units thinned
// onto their witness target, universal quantifiers become ones.
LaxLinking elink_yoneda(const ELinking& l);

std::string to_json(const LaxLinking& k);
LaxLinking lax_from_json(const std::string& text);
std::string to_dot(const LaxLinking& k);

}  // namespace yonet

#endif
