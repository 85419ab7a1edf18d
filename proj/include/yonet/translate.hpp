#ifndef YONET_TRANSLATE_HPP
#define YONET_TRANSLATE_HPP

#include "yonet/elink.hpp"
#include "yonet/lax.hpp"
#include "yonet/net.hpp"
#include "yonet/rewrite.hpp"

// The two directions between Girard nets and the compact world: the net
// translation into lax linkings, the cut introduction that reads a linking
// off a net, and the induced decision procedure for the coend equivalence.

namespace yonet {

// Quantifier elimination on a correct cut-free net: each quantifier link is
// cut against its Yoneda template, innermost first along a sequentialization.
LaxLinking yon_translate(const GNet& g);

// One fresh axiom and cut over the witness of every existential link.
GNet pi_cut(const GNet& g);

// The unique linking-with-cuts ell_cut with pi(ell_cut) = pi_cut(g);
// requires quantifier-free witness formulas everywhere.
ELinking ell_cut_of_gnet(const GNet& g);

// Normal form of ell_cut: the linking of the net.
ELinking ell_of_gnet(const GNet& g, long max_states = 1000000);

// Coend-induced equivalence, decided through rewitnessing of the linkings.
bool eps_equivalent(const GNet& g1, const GNet& g2, long max_states = 1000000);

}  // namespace yonet

#endif
