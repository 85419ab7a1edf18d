#ifndef YONET_CATLAB_HPP
#define YONET_CATLAB_HPP

#include <string>
#include <vector>

#include "yonet/elink.hpp"
#include "yonet/lax.hpp"
#include "yonet/rewrite.hpp"

// The category of existential linkings: a morphism U -> V is a correct
// linking over dual(U), V; composition is a cut followed by normalization.
// Constructors for the co-wedge data, the functorial actions of Yoneda
// formulas, and the coherence checks live here.

namespace yonet {

struct TypeMismatch : std::runtime_error {
  explicit TypeMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

// l1 : U -> V and l2 : V -> W give l2 . l1 : U -> W.
ELinking compose(const ELinking& l1, const ELinking& l2, long max_states = 1000000);

// pointwise tensor of morphisms
ELinking tensor_linking(const ELinking& l1, const ELinking& l2);

// Instantiation co-wedge Omega_A^B over dual(all X.A)[B at the co-edge],
// A[B/X]; fa must be the universal formula.
ELinking omega(const FormulaPtr& fa, const FormulaPtr& b);

// Functorial actions of a Yoneda formula: splice l : E -> F into the hole
// (covariant) or the slot (contravariant).
ELinking fmap_cov(const FormulaPtr& fa, const ELinking& l);
ELinking fmap_contra(const FormulaPtr& fa, const ELinking& l);

// Linking forms of the Yoneda isomorphism pair, with the multiplicative
// units realized by their quantified forms.
ELinking yo1_linking(const FormulaPtr& fa);  // D[L[1]]~ -> all X.A
ELinking yo2_linking(const FormulaPtr& fa);  // all X.A -> D[L[1]]~

// The quantified unit translation of a fragment formula: the image of the
// Yoneda translation with 1 and bot replaced by their second order forms.
FormulaPtr unit_translate(const FormulaPtr& f);

FormulaPtr one_exists_formula(const std::string& var);   // all v.(~v @ v)
FormulaPtr bot_exists_formula(const std::string& var);   // ex v.(v * ~v)

// structural morphisms
ELinking lambda_linking(const FormulaPtr& a);      // 1 * a -> a
ELinking lambda_inv_linking(const FormulaPtr& a);  // a -> 1 * a
ELinking rho_linking(const FormulaPtr& a);         // a * 1 -> a
ELinking rho_inv_linking(const FormulaPtr& a);     // a -> a * 1
ELinking alpha_linking(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c);
ELinking alpha_inv_linking(const FormulaPtr& a, const FormulaPtr& b, const FormulaPtr& c);
ELinking sigma_linking(const FormulaPtr& a, const FormulaPtr& b);

struct SuiteCheck {
  std::string name;
  bool pass;
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteCheck> checks;
  bool all_pass() const {
    for (auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Unit, associativity, symmetry and Yoneda-pair checks over the given atoms.
SuiteReport coherence_suite(const std::vector<FormulaPtr>& atoms, long max_states = 1000000);

std::string to_json(const SuiteReport& r);

}  // namespace yonet

#endif
