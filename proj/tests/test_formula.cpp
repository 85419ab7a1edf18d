#include "doctest.h"

#include <functional>

#include "gen.hpp"
#include "yonet/formula.hpp"

using namespace yonet;

namespace {

// Brute-force substitution oracle: freshen every binder first, then replace
// without any capture check.
FormulaPtr freshen_all(const FormulaPtr& f, int& counter) {
  switch (f->tag) {
    case Conn::Tensor: return Formula::tensor(freshen_all(f->left, counter), freshen_all(f->right, counter));
    case Conn::Par: return Formula::par(freshen_all(f->left, counter), freshen_all(f->right, counter));
    case Conn::Forall:
    case Conn::Exists: {
      std::string v = "fr" + std::to_string(counter++);
      FormulaPtr body = substitute(f->body, f->var, Formula::atom(v));
      body = freshen_all(body, counter);
      return f->tag == Conn::Forall ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    default: return f;
  }
}

FormulaPtr naive_subst(const FormulaPtr& f, const std::string& var, const FormulaPtr& r) {
  switch (f->tag) {
    case Conn::Atom: return f->var == var ? r : f;
    case Conn::NegAtom: return f->var == var ? dual(r) : f;
    case Conn::Tensor: return Formula::tensor(naive_subst(f->left, var, r), naive_subst(f->right, var, r));
    case Conn::Par: return Formula::par(naive_subst(f->left, var, r), naive_subst(f->right, var, r));
    case Conn::Forall: return Formula::forall(f->var, naive_subst(f->body, var, r));
    case Conn::Exists: return Formula::exists(f->var, naive_subst(f->body, var, r));
    default: return f;
  }
}

}  // namespace

TEST_CASE("parsing and rendering") {
  FormulaPtr f = parse_formula("all X.(~X @ X)");
  CHECK(f->tag == Conn::Forall);
  CHECK(render(f) == "all X.(~X @ X)");

  FormulaPtr g = parse_formula("ex X.((~Y @ X) * ~X)");
  CHECK(g->tag == Conn::Exists);
  CHECK(g->body->tag == Conn::Tensor);
  CHECK(render(g) == "ex X.((~Y @ X) * ~X)");

  CHECK_THROWS_AS(parse_formula("all X.(X *"), ParseError);
  try {
    parse_formula("all X.(X *");
  } catch (const ParseError& e) {
    CHECK(e.offset == 10);
  }

  // negation of a compound pushes to the atoms
  CHECK(render(parse_formula("~(Y * Z)")) == "(~Y @ ~Z)");
  CHECK(render(parse_formula("~all X.(~X @ X)")) == "ex X.(X * ~X)");
  CHECK(render(parse_formula("1")) == "1");
  CHECK(render(parse_formula("bot")) == "bot");
}

TEST_CASE("duality") {
  CHECK(render(dual(parse_formula("X"))) == "~X");
  CHECK(render(dual(parse_formula("all X.(~X @ X)"))) == "ex X.(X * ~X)");
  FormulaPtr a = parse_formula("((Y * Z) @ W)");
  CHECK(equal(dual(dual(a)), a));
}

TEST_CASE("dual is an involution on random formulas") {
  gen::Rng rng(7);
  for (int i = 0; i < 200; i++) {
    FormulaPtr a = gen::random_fragment(rng, 6);
    CHECK(equal(dual(dual(a)), a));
    CHECK(equal(parse_formula(render(a)), a));
  }
}

TEST_CASE("substitution") {
  FormulaPtr f = parse_formula("(~X @ X)");
  CHECK(render(substitute(f, "X", parse_formula("Y"))) == "(~Y @ Y)");
  FormulaPtr d = parse_formula("(Z @ X)");
  CHECK(render(substitute(d, "X", parse_formula("(Y * W)"))) == "(Z @ (Y * W))");

  // substitution under a binder with a clash renames the binder
  FormulaPtr g = parse_formula("all Y.(~X @ (X * (~Y @ Y)))");
  FormulaPtr got = substitute(g->body, "X", parse_formula("Y"));
  int c = 0;
  FormulaPtr want = naive_subst(freshen_all(g->body, c), "X", parse_formula("Y"));
  CHECK(alpha_equal(got, want));
}

TEST_CASE("substitution agrees with the freshening oracle") {
  gen::Rng rng(11);
  const char* vars[] = {"Y", "Z", "X5"};
  for (int i = 0; i < 150; i++) {
    FormulaPtr a = gen::random_fragment(rng, 4);
    FormulaPtr b = gen::random_fragment(rng, 2);
    const std::string v = vars[rng() % 3];
    int c = 0;
    CHECK(alpha_equal(substitute(a, v, b), naive_subst(freshen_all(a, c), v, b)));
  }
}

TEST_CASE("cleanliness") {
  Sequent s;
  s.formulas = {parse_formula("all X.(~X @ X)"), parse_formula("ex X.(X * ~X)")};
  CHECK(!is_clean(s));
  Sequent t = cleaned(s);
  CHECK(is_clean(t));
  CHECK(alpha_equal(t.formulas[0], s.formulas[0]));
  CHECK(alpha_equal(t.formulas[1], s.formulas[1]));

  Sequent u;
  u.formulas = {parse_formula("X"), parse_formula("all X.(~X @ X)")};
  CHECK(!is_clean(u));  // X both free and bound
  CHECK(is_clean(cleaned(u)));
}

TEST_CASE("fragment classification") {
  auto cls = [](std::vector<std::string> fs) {
    Sequent s;
    for (auto& f : fs) s.formulas.push_back(parse_formula(f));
    return classify_fragment(s);
  };
  CHECK(cls({"all X.(~X @ X)"}) == Fragment::UnitOnly);
  CHECK(cls({"all X.((Y * ~X) @ X)"}) == Fragment::Yoneda);
  CHECK(cls({"all X.(X @ X)"}) == Fragment::Full);
  CHECK(cls({"(Y @ ~Y)"}) == Fragment::UnitOnly);
  CHECK(cls({"(1 @ ~Y)"}) == Fragment::Full);
}

TEST_CASE("yoneda decomposition") {
  auto d1 = yoneda_decompose(parse_formula("all X.((Y * ~X) @ X)"));
  REQUIRE(d1.has_value());
  CHECK(d1->var == "X");
  CHECK(d1->sides.size() == 1);
  CHECK(render(d1->sides[0]) == "Y");
  CHECK(d1->slot_path == "LR");
  CHECK(d1->hole_path == "R");
  CHECK(!d1->co);

  auto d2 = yoneda_decompose(parse_formula("all X.(~X @ X)"));
  REQUIRE(d2.has_value());
  CHECK(d2->sides.empty());
  CHECK(d2->slot_path == "L");

  CHECK(!yoneda_decompose(parse_formula("all X.(~X @ (X * X))")).has_value());
  CHECK(!yoneda_decompose(parse_formula("all X.(X @ X)")).has_value());

  auto d3 = yoneda_decompose(parse_formula("ex X.((~Y @ X) * ~X)"));
  REQUIRE(d3.has_value());
  CHECK(d3->co);
  CHECK(render(d3->sides[0]) == "~Y");
}

TEST_CASE("yoneda translation") {
  CHECK(render(yoneda_translate_formula(parse_formula("all X.(~X @ X)"))) == "1");
  CHECK(render(yoneda_translate_formula(parse_formula("all X.((Y * ~X) @ X)"))) == "(Y * 1)");
  CHECK(render(yoneda_translate_formula(parse_formula("ex X.((~Y @ X) * ~X)"))) == "(~Y @ bot)");
  CHECK_THROWS_AS(yoneda_translate_formula(parse_formula("all X.(X @ X)")), NotInFragment);
}

TEST_CASE("translation commutes with duality and kills quantifiers") {
  gen::Rng rng(23);
  for (int i = 0; i < 150; i++) {
    FormulaPtr a = gen::random_fragment(rng, 5);
    FormulaPtr t = yoneda_translate_formula(a);
    CHECK(bound_vars(t).empty());
    CHECK(alpha_equal(dual(t), yoneda_translate_formula(dual(a))));
  }
}

TEST_CASE("s measure") {
  CHECK(s_measure(parse_formula("X")) == 0);
  CHECK(s_measure(parse_formula("all X.(~X @ X)")) == 1);
  CHECK(s_measure(parse_formula("ex X.(X * ~X)")) == 1);
  CHECK(s_measure(parse_formula("all X.((Y * ~X) @ X)")) == 3);
}

TEST_CASE("s measure is self-dual") {
  gen::Rng rng(31);
  for (int i = 0; i < 150; i++) {
    FormulaPtr a = gen::random_fragment(rng, 5);
    CHECK(s_measure(a) == s_measure(dual(a)));
  }
}

TEST_CASE("paths address subformulas") {
  FormulaPtr f = parse_formula("all X.((Y * ~X) @ X)");
  CHECK(render(subformula_at(f, "B")) == "((Y * ~X) @ X)");
  CHECK(render(subformula_at(f, "BL")) == "(Y * ~X)");
  CHECK(render(subformula_at(f, "BLL")) == "Y");
  CHECK(render(subformula_at(f, "BR")) == "X");
  FormulaPtr g = replace_at(f, "BLL", parse_formula("(Z @ Z)"));
  CHECK(render(g) == "all X.(((Z @ Z) * ~X) @ X)");
}
