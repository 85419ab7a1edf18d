#ifndef YONET_REWRITE_HPP
#define YONET_REWRITE_HPP

#include <optional>
#include <string>
#include <vector>

#include "yonet/elink.hpp"

// Rewitnessing moves and the equivalence they generate, the ready-making
// procedure for cut sequents, and cut elimination over existential linkings.

namespace yonet {

struct SequentMismatch : std::runtime_error {
  explicit SequentMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotReady : std::runtime_error {
  explicit NotReady(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoCut : std::runtime_error {
  explicit NoCut(const std::string& msg) : std::runtime_error(msg) {}
};

struct Move {
  enum class Kind { Retarget, Swap };
  Kind kind;
  NodeRef coedge;          // the moved co-edge (Swap: the one whose target enters the other)
  NodeRef to;              // Retarget: new target; Swap: the chosen leaf of `coedge`...
  NodeRef other;           // Swap: the consecutive co-edge
};

// Applies without any correctness filtering.
ELinking apply_move(const ELinking& l, const Move& m);

// Moves that keep the witnessing function injective and the targets free of
// existential quantifiers; no correctness filtering.
std::vector<Move> all_moves(const ELinking& l);

// All correct results of a single move.
std::vector<ELinking> neighbors(const ELinking& l, long cap = 1L << 20);

// Reflexive-transitive closure of single moves through correct linkings.
// Throws SequentMismatch when the sequents differ; different edge sets are
// never equivalent.
bool equivalent(const ELinking& l1, const ELinking& l2, long max_states = 1000000);

// Minimum of the equivalence class under the lexicographic witness order.
ELinking canonicalize(const ELinking& l, long max_states = 1000000);

bool is_ready(const ELinking& l);

// Nearest ready linking in the class, widening the sequent with auxiliary
// bot-existential conclusions when the class has no ready element.
ELinking make_ready(const ELinking& l, long max_states = 1000000);

struct TraceEntry {
  int step;
  std::string rule;
  int cut_index;
  int s_before;
  int s_after;
};

// Sum of s over the cut formulas.
int s_of(const ELinking& l);

// One cut-elimination step on a ready linking; rules tried in order
// ax/ax, tensor/par, unit quantifier, quantifier.
ELinking reduce_step(const ELinking& l);

// Cut-free normal form; ready-making is interleaved and auxiliary widening
// conclusions are absorbed at the end.
ELinking normalize(const ELinking& l, std::vector<TraceEntry>* trace = nullptr,
                   long max_states = 1000000);

}  // namespace yonet

#endif
