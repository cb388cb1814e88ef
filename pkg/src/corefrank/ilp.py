"""Joint inference over anaphoricity and pairwise coreference decisions.

The 0/1 program has one variable y_k per mention (anaphoric or not) and
one variable x_(j,k) per ordered pair j < k (coreferent or not).  Costs
are negative log probabilities from independently trained log-loss
models, and the feasible set couples the variables per mention:

    x_(j,k) <= y_k                (a linked mention is anaphoric)
    y_k <= sum_j x_(j,k)          (an anaphoric mention links somewhere)

The third published family (non-anaphoric mentions link nowhere) is the
contrapositive of the first and needs no separate constraints.  Documents
are desk-scale, so the solver is an exact depth-first branch and bound
with constraint propagation, certified against exhaustive enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import feats, learn
from .corpus import Document, Partition

PROB_CLAMP = 1e-6


@dataclass
class IlpProgram:
    doc_id: str
    n: int
    coref_cost: dict[tuple[int, int], float]
    coref_cost_bar: dict[tuple[int, int], float]
    anaph_cost: dict[int, float]
    anaph_cost_bar: dict[int, float]

    def n_variables(self) -> int:
        return len(self.coref_cost) + self.n

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.coref_cost)


@dataclass
class IlpSolution:
    x: dict[tuple[int, int], int]
    y: dict[int, int]
    objective: float


def _cost(prob: float) -> float:
    return -math.log(min(max(prob, PROB_CLAMP), 1.0 - PROB_CLAMP))


def build_program(
    doc: Document,
    coref_model: learn.LinearModel,
    anaph_model: learn.LinearModel,
    fs: str = feats.CONVENTIONAL,
) -> IlpProgram:
    """Assemble assignment costs from the two probabilistic models.

    Pair probabilities come from the mention-pair features of ``fs``
    applied to every ordered pair; anaphoricity probabilities come from
    the anaphoricity feature set.
    """
    for name, model in (("coreference", coref_model), ("anaphoricity", anaph_model)):
        if model.loss != learn.LOG:
            raise ValueError(f"the {name} model must be log-loss to provide probabilities")
    n = len(doc.mentions)
    coref_cost = {}
    coref_cost_bar = {}
    for k in range(n):
        for j in range(k):
            p = learn.predict_prob(coref_model, feats.pair_features(doc, j, k, fs))
            coref_cost[(j, k)] = _cost(p)
            coref_cost_bar[(j, k)] = _cost(1.0 - p)
    anaph_cost = {}
    anaph_cost_bar = {}
    for k in range(n):
        p = learn.predict_prob(anaph_model, feats.anaphoricity(doc, k))
        anaph_cost[k] = _cost(p)
        anaph_cost_bar[k] = _cost(1.0 - p)
    return IlpProgram(doc.doc_id, n, coref_cost, coref_cost_bar, anaph_cost, anaph_cost_bar)


def objective_value(p: IlpProgram, x: dict[tuple[int, int], int], y: dict[int, int]) -> float:
    total = 0.0
    for pair, cost in p.coref_cost.items():
        total += cost if x[pair] else p.coref_cost_bar[pair]
    for k in range(p.n):
        total += p.anaph_cost[k] if y[k] else p.anaph_cost_bar[k]
    return total


def _feasible(p: IlpProgram, x: dict[tuple[int, int], int], y: dict[int, int]) -> bool:
    for (j, k), value in x.items():
        if value and not y[k]:
            return False
    for k in range(p.n):
        if y[k] and not any(x.get((j, k), 0) for j in range(k)):
            return False
    return True


class _MentionFamily:
    """The variables owned by one mention: y_k and the x_(j,k) links into it."""

    def __init__(self, p: IlpProgram, k: int):
        self.k = k
        self.y_cost = (p.anaph_cost_bar[k], p.anaph_cost[k])  # indexed by value
        self.links = [(j, p.coref_cost_bar[(j, k)], p.coref_cost[(j, k)]) for j in range(k)]
        # Cheapest completions of the x block under each y value; used both
        # for bounds and for expanding a chosen branch.
        self.zero_block = sum(off for _, off, _ in self.links)
        best_free = 0.0
        for _, off, on in self.links:
            best_free += min(off, on)
        forced = math.inf
        if self.links:
            forced = best_free
            if all(on > off for _, off, on in self.links):
                # Nothing wants to link: pay the cheapest forced link.
                forced = best_free + min(on - off for _, off, on in self.links)
        self.y0_bound = self.y_cost[0] + self.zero_block
        self.y1_bound = self.y_cost[1] + forced
        self.lower_bound = min(self.y0_bound, self.y1_bound)

    def assignment(self, y_value: int) -> tuple[float, dict[tuple[int, int], int]]:
        """Optimal x block for this mention under the given y value."""
        x: dict[tuple[int, int], int] = {}
        if y_value == 0:
            for j, _, _ in self.links:
                x[(j, self.k)] = 0
            return self.y0_bound, x
        cost = self.y_cost[1]
        chosen_any = False
        for j, off, on in self.links:
            take = on < off
            x[(j, self.k)] = int(take)
            cost += on if take else off
            chosen_any = chosen_any or take
        if not chosen_any:
            best_j, extra = None, math.inf
            for j, off, on in self.links:
                if on - off < extra:
                    best_j, extra = j, on - off
            x[(best_j, self.k)] = 1
            cost += extra
        return cost, x


def solve_exact(p: IlpProgram, max_vars: int = 40) -> IlpSolution:
    """Minimize the program exactly by depth-first branch and bound.

    Branches on the anaphoricity variable of one mention at a time; the x
    variables of a mention are forced to 0 on the y=0 branch and settle to
    their cheapest feasible block on the y=1 branch (they appear in no
    other constraint).  The bound adds each undecided mention's cheapest
    branch, so the returned objective is certified optimal.
    """
    if p.n_variables() > max_vars:
        raise ValueError(
            f"program has {p.n_variables()} variables, above the exact-solver limit {max_vars}"
        )
    families = [_MentionFamily(p, k) for k in range(p.n)]
    suffix_bound = [0.0] * (p.n + 1)
    for k in range(p.n - 1, -1, -1):
        suffix_bound[k] = suffix_bound[k + 1] + families[k].lower_bound

    best_obj = math.inf
    best_x: dict[tuple[int, int], int] = {}
    best_y: dict[int, int] = {}
    x_partial: dict[tuple[int, int], int] = {}
    y_partial: dict[int, int] = {}

    def dfs(k: int, cost_so_far: float) -> None:
        nonlocal best_obj, best_x, best_y
        if cost_so_far + suffix_bound[k] >= best_obj and best_y:
            return
        if k == p.n:
            if cost_so_far < best_obj:
                best_obj = cost_so_far
                best_x = dict(x_partial)
                best_y = dict(y_partial)
            return
        fam = families[k]
        branches = sorted((0, 1), key=lambda value: (fam.y0_bound, fam.y1_bound)[value])
        if not fam.links:
            branches = [0]  # family 3 propagation: no predecessors forces y = 0
        for value in branches:
            block_cost, block_x = fam.assignment(value)
            y_partial[k] = value
            x_partial.update(block_x)
            dfs(k + 1, cost_so_far + block_cost)
            del y_partial[k]
            for key in block_x:
                del x_partial[key]

    dfs(0, 0.0)
    solution = IlpSolution(best_x, best_y, best_obj)
    assert _feasible(p, solution.x, solution.y)
    return solution


def decode_partition(solution: IlpSolution, doc: Document) -> Partition:
    """Closest-link decoding: transitive closure over every pair set to 1."""
    n = len(doc.mentions)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (j, k), value in solution.x.items():
        if value:
            rj, rk = find(j), find(k)
            if rj != rk:
                parent[rk] = rj
    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    return Partition(clusters.values())


def resolve_ilp(
    doc: Document,
    coref_model: learn.LinearModel,
    anaph_model: learn.LinearModel,
    fs: str = feats.CONVENTIONAL,
    max_vars: int = 40,
) -> Partition:
    program = build_program(doc, coref_model, anaph_model, fs)
    return decode_partition(solve_exact(program, max_vars), doc)


def write_lp(p: IlpProgram, path: str) -> None:
    """Dump the program in LP text format for cross-checking with external
    solvers."""
    lines = ["minimize", "obj:"]
    terms = []
    constant = 0.0
    for (j, k), cost in sorted(p.coref_cost.items()):
        bar = p.coref_cost_bar[(j, k)]
        constant += bar
        terms.append(f"{cost - bar:+.12g} x_{j}_{k}")
    for k in range(p.n):
        constant += p.anaph_cost_bar[k]
        terms.append(f"{p.anaph_cost[k] - p.anaph_cost_bar[k]:+.12g} y_{k}")
    lines.append("  " + " ".join(terms) + f" {constant:+.12g}")
    lines.append("subject to")
    for j, k in sorted(p.coref_cost):
        lines.append(f"  link_{j}_{k}: x_{j}_{k} - y_{k} <= 0")
    for k in range(1, p.n):
        xs = " ".join(f"- x_{j}_{k}" for j in range(k))
        lines.append(f"  anaph_{k}: y_{k} {xs} <= 0")
    lines.append("binary")
    names = [f"x_{j}_{k}" for j, k in sorted(p.coref_cost)] + [f"y_{k}" for k in range(p.n)]
    lines.append("  " + " ".join(names))
    lines.append("end")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
