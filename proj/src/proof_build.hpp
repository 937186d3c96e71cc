#pragma once

#include <optional>
#include <vector>

#include "lcre/proof.hpp"

namespace lcre::build {

// All nodes share the frame ⟨X⟩ ... [φ].
struct Frame {
  VarSet x;
  Term phi;
};

Derivation refl(const Frame& f, const Term& t);
Derivation axiom(const Frame& f, const Term& s, const Term& t);
Derivation sym(const Derivation& d);
Derivation trans(const Derivation& a, const Derivation& b);
// Right-nested Trans; `parts` must be non-empty and chained.
Derivation chain(std::vector<Derivation> parts);
// Embeds d : ⟨X⟩ u ≈ v [φ] at position p of `context` via Cong with Refl siblings.
Derivation lift(const Frame& f, const Term& context, const Position& p, const Derivation& d);
// Weaken(TInst σ (Rule e)) oriented by `dir`, unlifted.
Derivation rule_instance(const CETheory& th, const Frame& f, int equation, Direction dir, const Substitution& s);

// Cong/Refl/Axiom closure of s ≈ t; Axiom pairs are checked with the oracle.
std::optional<Derivation> close_gap(const Frame& f, const Term& s, const Term& t, const UnderlyingModel& m,
                                    ValidityOracle& oracle);

}  // namespace lcre::build
