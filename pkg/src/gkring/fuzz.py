"""Seeded random formulas and the engine-versus-oracle differential check."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .errors import DepthBudgetExceeded
from .grothendieck import cardinality, class_of_formula, satisfiable
from .oracle import oracle_count, poly_cardinality, problem_constants
from .syntax import (
    Eq,
    Formula,
    Neq,
    Not,
    Term,
    Var,
    X,
    conj,
    const,
    disj,
    pack_variables,
    suffixes,
    to_text,
)

X1, X2 = Var("x1"), Var("x2")


@dataclass
class FuzzConfig:
    n: int = 1000
    seed: int = 0
    max_depth: int = 3  # packed depth
    max_vars: int = 2
    constants: tuple = ("c", "d")
    max_atoms: int = 5
    # leaf-level constants in the packed problem; the oracle is exponential in it
    max_leaf_constants: int = 5
    const_path_prob: float = 0.25


def _paths_upto(d: int) -> list[str]:
    return [w for k in range(d + 1) for w in suffixes(k)] if d > 0 else [""]


class FormulaGenerator:
    """Random quantifier-free formulas whose packed form is uniform."""

    def __init__(self, cfg: FuzzConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)

    def _const(self, room: int) -> Term:
        rng = self.rng
        name = rng.choice(self.cfg.constants)
        path = rng.choice(["l", "r"]) if room > 0 and rng.random() < self.cfg.const_path_prob else ""
        return const(name, path)

    def _atom(self, vs: list, var_depth: int) -> Formula:
        rng = self.rng
        v = rng.choice(vs)
        w = rng.choice(_paths_upto(var_depth))
        lhs = Term(v, w)
        if rng.random() < 0.5:
            # same length on both sides keeps the packed atom uniform
            v2 = rng.choice(vs)
            w2 = rng.choice(suffixes(len(w))) if w else ""
            rhs = Term(v2, w2)
        else:
            rhs = self._const(var_depth - len(w))
        return Eq(lhs, rhs) if rng.random() < 0.6 else Neq(lhs, rhs)

    def _tree(self, leaves: list) -> Formula:
        rng = self.rng
        if len(leaves) == 1:
            f = leaves[0]
        else:
            k = rng.randint(1, len(leaves) - 1)
            parts = [self._tree(leaves[:k]), self._tree(leaves[k:])]
            f = conj(parts) if rng.random() < 0.5 else disj(parts)
        return Not(f) if rng.random() < 0.15 else f

    def formula(self) -> Formula:
        cfg, rng = self.cfg, self.rng
        nvars = rng.randint(1, cfg.max_vars)
        vs = [X] if nvars == 1 else [X1, X2][:nvars]
        var_depth = cfg.max_depth - (0 if nvars == 1 else 1)
        k = rng.randint(1, cfg.max_atoms)
        return self._tree([self._atom(vs, var_depth) for _ in range(k)])

    def __iter__(self):
        made = 0
        while made < self.cfg.n:
            f = self.formula()
            if len(problem_constants(pack_variables(f))) > self.cfg.max_leaf_constants:
                continue
            made += 1
            yield f


@dataclass
class Disagreement:
    formula: str
    what: str
    engine: str
    oracle: str

    def to_json(self) -> dict:
        return {"formula": self.formula, "what": self.what, "engine": self.engine, "oracle": self.oracle}


@dataclass
class FuzzReport:
    config: FuzzConfig
    checked: int = 0
    budget_errors: int = 0
    disagreements: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_json(self) -> dict:
        return {
            "n": self.checked,
            "seed": self.config.seed,
            "maxDepth": self.config.max_depth,
            "budgetErrors": self.budget_errors,
            "disagreements": [d.to_json() for d in self.disagreements],
            "seconds": round(self.seconds, 3),
        }


def compare(f: Formula) -> list[Disagreement]:
    """Engine and oracle on one formula: class, satisfiability, cardinality."""
    g = pack_variables(f)
    text = to_text(f)
    poly = oracle_count(g)
    out = []
    pairs = [
        ("class", class_of_formula(f), poly.class_value()),
        ("sat", satisfiable(f), not poly.is_zero),
        ("cardinality", cardinality(f), poly_cardinality(poly)),
    ]
    for what, mine, theirs in pairs:
        if mine != theirs:
            out.append(Disagreement(text, what, str(mine), str(theirs)))
    return out


def run_fuzz(cfg: Optional[FuzzConfig] = None, progress=None) -> FuzzReport:
    cfg = cfg or FuzzConfig()
    report = FuzzReport(cfg)
    start = time.perf_counter()
    for f in FormulaGenerator(cfg):
        try:
            report.disagreements += compare(f)
        except DepthBudgetExceeded:
            report.budget_errors += 1
        report.checked += 1
        if progress is not None:
            progress(report)
    report.seconds = time.perf_counter() - start
    return report
