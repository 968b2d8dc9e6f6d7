"""Reaction networks, mass-action induction and the canonical inverse construction.

A network is a species tuple plus a list of reactions ``reactant -> product``
with positive mass-action rate constants.  ``induce_kinetics`` builds the
mass-action ODE system; ``canonicalize`` inverts it by emitting one
unit-change reaction per monomial of a kinetic system.  A plain text format
(one reaction per line) round-trips through ``parse_network`` /
``serialize_network``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from .classify import find_cross_negative_terms
from .errors import (
    DimensionMismatchError,
    EmptySystemError,
    NotKineticError,
    ParseError,
)
from .poly import Polynomial, PolySystem

#: Reactions above this order trigger a warning (not an error).
MAX_EXPECTED_ORDER = 3


@dataclass(frozen=True)
class Complex:
    """Stoichiometry vector over the owning network's species list.

    The zero complex (all entries 0) is permitted and denotes the empty
    complex used for pure input/output quasireactions.
    """

    stoich: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 for c in self.stoich):
            raise ValueError(f"negative stoichiometry in {self.stoich}")

    @property
    def order(self) -> int:
        return sum(self.stoich)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.stoich)

    def support(self) -> set[int]:
        return {i for i, c in enumerate(self.stoich) if c != 0}

    def format(self, species: Sequence[str]) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for name, c in zip(species, self.stoich):
            if c == 1:
                parts.append(name)
            elif c > 1:
                parts.append(f"{c} {name}")
        return " + ".join(parts)


@dataclass(frozen=True)
class Reaction:
    """``reactant -> product`` with a positive mass-action rate constant."""

    reactant: Complex
    product: Complex
    rate: float

    def __post_init__(self):
        if self.reactant == self.product:
            raise ValueError("self-loop reaction (c -> c) is not allowed")
        if not self.rate > 0.0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.reactant.order > MAX_EXPECTED_ORDER:
            warnings.warn(
                f"reaction order {self.reactant.order} exceeds "
                f"{MAX_EXPECTED_ORDER}; more than three reactants is not "
                f"chemically plausible",
                stacklevel=3,
            )

    def format(self, species: Sequence[str]) -> str:
        return (
            f"{self.reactant.format(species)} -> {self.product.format(species)}"
        )


class ReactionNetwork:
    """Species tuple plus reactions; duplicates merged by summing rates."""

    __slots__ = ("species", "reactions")

    def __init__(self, species: Sequence[str], reactions: Iterable[Reaction]):
        species = tuple(species)
        merged: dict[tuple[Complex, Complex], float] = {}
        order: list[tuple[Complex, Complex]] = []
        for r in reactions:
            if len(r.reactant.stoich) != len(species) or len(
                r.product.stoich
            ) != len(species):
                raise DimensionMismatchError(
                    "complex length does not match species count"
                )
            key = (r.reactant, r.product)
            if key in merged:
                merged[key] += r.rate
            else:
                merged[key] = r.rate
                order.append(key)
        object.__setattr__(
            self,
            "species",
            species,
        )
        object.__setattr__(
            self,
            "reactions",
            tuple(Reaction(k[0], k[1], merged[k]) for k in order),
        )
        covered = set()
        for r in self.reactions:
            covered |= r.reactant.support() | r.product.support()
        if covered != set(range(len(species))):
            missing = [species[i] for i in range(len(species)) if i not in covered]
            warnings.warn(
                f"species {missing} appear in no complex; "
                f"the network does not cover its species set",
                stacklevel=3,
            )

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("ReactionNetwork is immutable")

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReactionNetwork):
            return NotImplemented
        return self.species == other.species and sorted(
            self.reactions, key=_reaction_key
        ) == sorted(other.reactions, key=_reaction_key)

    def __hash__(self):
        return hash(
            (self.species, tuple(sorted(self.reactions, key=_reaction_key)))
        )

    def allclose(self, other: "ReactionNetwork", tol: float = 1e-12) -> bool:
        """Same species and reaction set, with rates compared within ``tol``."""
        if self.species != other.species or self.n_reactions != other.n_reactions:
            return False
        mine = sorted(self.reactions, key=_reaction_key)
        theirs = sorted(other.reactions, key=_reaction_key)
        for a, b in zip(mine, theirs):
            if a.reactant != b.reactant or a.product != b.product:
                return False
            if abs(a.rate - b.rate) > tol:
                return False
        return True

    def __repr__(self):
        lines = [r.format(self.species) + f"  (k={r.rate:g})" for r in self.reactions]
        return "ReactionNetwork(\n  " + "\n  ".join(lines) + "\n)"


def _reaction_key(r: Reaction):
    return (r.reactant.stoich, r.product.stoich)


def induce_kinetics(net: ReactionNetwork) -> PolySystem:
    """Mass-action kinetic equations ``dx/dt = sum_r k_r (c' - c) x^c``."""
    variables = net.species
    n = len(variables)
    acc = [dict() for _ in range(n)]
    for r in net.reactions:
        c = r.reactant.stoich
        for s in range(n):
            delta = r.product.stoich[s] - c[s]
            if delta == 0:
                continue
            acc[s][c] = acc[s].get(c, 0.0) + r.rate * delta
    equations = [
        Polynomial._from_dict(variables, acc_s, drop_tol=0.0) for acc_s in acc
    ]
    return PolySystem(variables, equations)


def canonicalize(sys: PolySystem) -> ReactionNetwork:
    """Canonical network: one unit-change reaction per monomial.

    For each monomial ``d * x^c`` of equation ``s`` the reaction
    ``c -> c + sign(d) * e_s`` with rate ``|d|`` is emitted.  Every reaction
    changes exactly one species copy number by exactly one.  The input must
    be kinetic; species names are the system's variable names.
    """
    offenders = find_cross_negative_terms(sys)
    if offenders:
        raise NotKineticError(offenders, "cannot canonicalize")
    if sys.is_zero:
        raise EmptySystemError("all equations are identically zero")
    reactions = []
    for s, eq in enumerate(sys.equations):
        for m in eq.terms:
            reactant = Complex(m.exponents)
            product_stoich = list(m.exponents)
            product_stoich[s] += 1 if m.coeff > 0 else -1
            reactions.append(
                Reaction(reactant, Complex(tuple(product_stoich)), abs(m.coeff))
            )
    return ReactionNetwork(sys.variables, reactions)


# -- text format -----------------------------------------------------------------
#
# One reaction per line:   <id>: <complex> -> <complex> ; k = <positive number>
# Complex grammar:         <nat>? <species> (+ <nat>? <species>)*   |   0
# Comments start with '#'.  serialize_network writes a '# species: ...'
# directive so that parse(serialize(n)) preserves the species ordering even
# when it differs from first-appearance order.

_SPECIES_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_DIRECTIVE_RE = re.compile(r"^#\s*species\s*:\s*(.+)$")


def serialize_network(net: ReactionNetwork) -> str:
    lines = ["# species: " + " ".join(net.species)]
    width = len(str(net.n_reactions))
    for i, r in enumerate(net.reactions, start=1):
        lines.append(f"r{i:0{width}d}: {r.format(net.species)} ; k = {r.rate:.17g}")
    return "\n".join(lines) + "\n"


class _LineParser:
    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str):
        raise ParseError(self.lineno, self.pos + 1, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def expect(self, token: str):
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def parse_complex(self, species_index: dict[str, int], inferring: bool):
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "0":
            nxt = self.pos + 1
            if nxt >= len(self.text) or not (
                self.text[nxt].isalnum() or self.text[nxt] == "_"
            ):
                self.pos += 1
                return {}
        counts: dict[str, int] = {}
        while True:
            self.skip_ws()
            m = re.match(r"\d+", self.text[self.pos :])
            coeff = 1
            if m:
                coeff = int(m.group(0))
                self.pos += m.end()
                self.skip_ws()
            m = _SPECIES_RE.match(self.text, self.pos)
            if not m:
                self.error("expected a species name")
            name = m.group(0)
            self.pos = m.end()
            if not inferring and name not in species_index:
                self.error(f"unknown species {name!r}")
            counts[name] = counts.get(name, 0) + coeff
            self.skip_ws()
            if self.pos < len(self.text) and self.text[self.pos] == "+":
                self.pos += 1
                continue
            return counts


def parse_network(text: str) -> ReactionNetwork:
    """Parse the reaction text format; see module docstring for the grammar."""
    declared: list[str] | None = None
    raw: list[tuple[int, str, dict, dict, float]] = []
    appearance: list[str] = []

    for lineno, line in enumerate(text.splitlines(), start=1):
        directive = _DIRECTIVE_RE.match(line.strip())
        if directive:
            declared = directive.group(1).split()
            continue
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        lp = _LineParser(body, lineno)
        m = re.match(r"[A-Za-z0-9_]+\s*:", body)
        if not m:
            lp.error("expected '<id>:' at line start")
        lp.pos = m.end()
        inferring = declared is None
        index = {} if inferring else {s: i for i, s in enumerate(declared)}
        reactant = lp.parse_complex(index, inferring)
        lp.expect("->")
        product = lp.parse_complex(index, inferring)
        lp.expect(";")
        lp.expect("k")
        lp.expect("=")
        lp.skip_ws()
        num = body[lp.pos :].strip()
        try:
            rate = float(num)
        except ValueError:
            lp.error(f"invalid rate constant {num!r}")
        if not rate > 0.0:
            lp.error(f"rate constant must be positive, got {rate}")
        for name in list(reactant) + list(product):
            if name not in appearance:
                appearance.append(name)
        raw.append((lineno, body, reactant, product, rate))

    species = tuple(declared) if declared is not None else tuple(appearance)
    index = {s: i for i, s in enumerate(species)}

    def to_complex(counts: dict[str, int]) -> Complex:
        stoich = [0] * len(species)
        for name, c in counts.items():
            stoich[index[name]] = c
        return Complex(tuple(stoich))

    reactions = []
    for lineno, body, reactant, product, rate in raw:
        try:
            reactions.append(Reaction(to_complex(reactant), to_complex(product), rate))
        except ValueError as exc:
            raise ParseError(lineno, 1, str(exc)) from exc
    return ReactionNetwork(species, reactions)


def load_network(path) -> ReactionNetwork:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read())


def save_network(net: ReactionNetwork, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_network(net))
