"""Embedding a partial system in a complete one with no new subsystems, and
the amalgamation machinery built on top of it.

The pipeline pads the input with isolated points to a suitable order, splits
the padded leave into hexagons and doubles once per hexagon.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .core import LeaveGraph, PartialSTS, glue_injection, glued_union, leave_graph, pad
from .doubling import DoublingResult, SixCycle, double, verify_doubling
from .errors import (BadDegrees, BadEdgeCount, DecompositionNotFound, InternalInconsistency,
                     OverlapNotSubsystem, STSError, StepFailed, WitnessInvalid, WitnessNotFound)
from .generators import catalog
from .subsystems import (are_isomorphic, class_violations, enumerate_subsystems,
                         is_embedded_subsystem, is_subsystem_free, new_subsystem_violations,
                         subsystem_from_points)


def padding_order(u: int, block_parity: int | str, lower: int = 0) -> int:
    """Smallest order ``>= max(lower, u, 13)`` that is 1 or 9 mod 12 when the
    block count is even and 3 or 7 mod 12 when it is odd.

    ``block_parity`` is either the block count or ``"even"``/``"odd"``.
    """
    if isinstance(block_parity, str):
        odd = block_parity == "odd"
    else:
        odd = block_parity % 2 == 1
    residues = (3, 7) if odd else (1, 9)
    n = max(lower, u, 13)
    while n % 12 not in residues:
        n += 1
    return n


class _Restart(Exception):
    pass


def _components_ok(adj: dict[int, set[int]]) -> bool:
    """Every connected component has a multiple of six edges."""
    seen = set()
    for s in adj:
        if s in seen or not adj[s]:
            continue
        stack = [s]
        seen.add(s)
        deg_sum = 0
        while stack:
            x = stack.pop()
            deg_sum += len(adj[x])
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if (deg_sum // 2) % 6:
            return False
    return True


def _cycles_through(adj, v, w, rng):
    """Lazily yield 6-cycles ``v, w, a, b, c, d`` in the current graph."""
    def nbrs(x, used):
        out = [y for y in adj[x] if y not in used]
        rng.shuffle(out)
        return out

    used = {v, w}
    for a in nbrs(w, used):
        used.add(a)
        for b in nbrs(a, used):
            used.add(b)
            for c in nbrs(b, used):
                used.add(c)
                for d in nbrs(c, used):
                    if v in adj[d]:
                        yield (v, w, a, b, c, d)
                used.discard(c)
            used.discard(b)
        used.discard(a)


def six_cycle_decomposition(L: LeaveGraph, budget: int = 200_000, seed: int = 0,
                            restarts: int = 8) -> list[SixCycle] | None:
    """Edge-disjoint hexagons covering every edge of ``L``, or None when the
    search runs out of nodes.

    Depth-first: the vertex of least positive degree must be covered next, so
    branch over the hexagons through one of its edges.  Branches leaving a
    component whose edge count is not a multiple of six are cut.
    """
    deg = L.degrees()
    if any(d % 2 for d in deg):
        raise BadDegrees("leave has a vertex of odd degree")
    if len(L.edges) % 6:
        raise BadEdgeCount(f"{len(L.edges)} edges is not a multiple of 6")
    base_adj = {x: set(ys) for x, ys in L.adjacency().items()}
    if not _components_ok(base_adj):
        return None
    per_try = max(1, budget // restarts)

    for attempt in range(restarts):
        rng = random.Random(seed * 1_000_003 + attempt)
        adj = {x: set(ys) for x, ys in base_adj.items()}
        chosen: list[tuple[int, ...]] = []
        nodes = [0]

        def remove(cyc, back=False):
            for k in range(6):
                x, y = cyc[k], cyc[(k + 1) % 6]
                if back:
                    adj[x].add(y)
                    adj[y].add(x)
                else:
                    adj[x].discard(y)
                    adj[y].discard(x)

        def solve() -> bool:
            live = [x for x in adj if adj[x]]
            if not live:
                return True
            v = min(live, key=lambda x: (len(adj[x]), x))
            w = min(adj[v])
            for cyc in _cycles_through(adj, v, w, rng):
                nodes[0] += 1
                if nodes[0] > per_try:
                    raise _Restart
                remove(cyc)
                if _components_ok(adj):
                    chosen.append(cyc)
                    if solve():
                        return True
                    chosen.pop()
                remove(cyc, back=True)
            return False

        try:
            if solve():
                return sorted((SixCycle(c).normalised() for c in chosen),
                              key=lambda h: tuple(sorted(h.points)))
            return None
        except _Restart:
            continue
        except RecursionError:
            continue
    return None


@dataclass
class EmbeddingPlan:
    input: PartialSTS
    padded_order: int
    cycles: list[SixCycle]

    @property
    def t(self) -> int:
        return len(self.cycles)

    @property
    def padded(self) -> PartialSTS:
        return pad(self.input, self.padded_order)

    def order_after(self, k: int) -> int:
        return self.padded_order * 2 ** k + 2 ** k - 1


def _check_padded_leave(L: LeaveGraph, order: int) -> None:
    if any(d % 2 for d in L.degrees()):
        raise InternalInconsistency(f"padded leave at order {order} has odd degrees")
    if len(L.edges) % 6:
        raise InternalInconsistency(f"padded leave at order {order} has {len(L.edges)} edges")


def plan_embedding(ps: PartialSTS, seed: int = 0, budget: int = 200_000,
                   lower: int = 0, escalations: int = 6) -> EmbeddingPlan:
    """Pad, decompose the padded leave into hexagons and order them."""
    order = padding_order(ps.order, len(ps.blocks), lower)
    for _ in range(escalations + 1):
        L = leave_graph(pad(ps, order))
        _check_padded_leave(L, order)
        cycles = six_cycle_decomposition(L, budget=budget, seed=seed)
        if cycles is not None:
            return EmbeddingPlan(ps, order, cycles)
        order = padding_order(order + 1, len(ps.blocks))
    raise DecompositionNotFound(f"no hexagon decomposition found up to order {order}")


@dataclass
class StepCertificate:
    step: int
    input_order: int
    output_order: int
    line: str
    verified: bool
    failures: list[str] = field(default_factory=list)


@dataclass
class EmbeddingRun:
    plan: EmbeddingPlan
    current: PartialSTS
    steps: int = 0
    certificates: list[StepCertificate] = field(default_factory=list)
    status: str = "complete"
    reason: str = ""
    final_violations: list | None = None

    @property
    def certified(self) -> bool:
        return all(c.verified and not c.failures for c in self.certificates) and \
            self.status != "failed"


def _remaining_edges(cycles: Sequence[SixCycle]) -> set[tuple[int, int]]:
    out = set()
    for h in cycles:
        out.update(h.edges())
    return out


def run_embedding(plan: EmbeddingPlan, step_limit: int = 3, verify: str = "steps",
                  seed: int = 0, verify_max_order: int = 500, max_order: int = 4096,
                  out_dir: str | Path | None = None, name: str = "embed",
                  step_hook: Callable[[int, DoublingResult, PartialSTS], None] | None = None
                  ) -> EmbeddingRun:
    """Apply one doubling per planned hexagon, up to ``step_limit`` of them.

    ``verify`` is ``"steps"`` (check each step), ``"full"`` (also re-check the
    current system against the original input after every step) or ``"off"``.
    Steps above ``verify_max_order`` are built but not verified, and no step
    producing more than ``max_order`` points is attempted.
    """
    if verify not in ("steps", "full", "off"):
        raise ValueError(f"unknown verify mode {verify!r}")
    from .fileformat import dumps

    current = plan.padded
    run = EmbeddingRun(plan, current)
    outdir = Path(out_dir) if out_dir is not None else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{name}.cert").write_text("")

    limit = min(plan.t, step_limit)
    for k in range(limit):
        H = plan.cycles[k]
        if 2 * current.order + 1 > max_order:
            run.status, run.reason = "truncated", f"order cap {max_order} reached"
            break
        try:
            result = double(current, H, seed)
        except STSError as exc:
            raise StepFailed(f"step {k + 1}: {exc}") from exc
        nxt = result.output
        failures = []
        verified = verify != "off" and nxt.order <= verify_max_order
        if verified:
            failures.extend(verify_doubling(current, result, H).failures)
            if verify == "full":
                bad = new_subsystem_violations(nxt, plan.input)
                if bad:
                    failures.append(f"{len(bad)} subsystem(s) not in the original input")
        if set(nxt.leave_edges()) != _remaining_edges(plan.cycles[k + 1:]):
            failures.append("leave differs from the union of the remaining hexagons")
        cert = StepCertificate(k + 1, current.order, nxt.order, result.certificate_line(),
                               verified, failures)
        run.certificates.append(cert)
        if outdir is not None:
            (outdir / f"{name}.step{k + 1}.sts").write_text(dumps(nxt))
            with open(outdir / f"{name}.cert", "a") as fh:
                fh.write(cert.line + f" verified={int(verified)} ok={int(not failures)}\n")
        if step_hook is not None:
            step_hook(k + 1, result, nxt)
        current = nxt
        run.current = current
        run.steps = k + 1
        if failures:
            run.status, run.reason = "failed", f"step {k + 1}: " + "; ".join(failures)
            return run

    if run.status == "complete" and run.steps < plan.t:
        run.status = "truncated"
        run.reason = run.reason or f"stopped after {run.steps} of {plan.t} steps"
    if run.status == "complete" and verify != "off" and current.order <= verify_max_order:
        run.final_violations = new_subsystem_violations(current, plan.input)
        if run.final_violations:
            run.status, run.reason = "failed", "final system has new subsystems"
    return run


@dataclass
class AmalgamationProblem:
    """``identification`` maps points of ``left`` to points of ``right``; an
    empty map asks for a joint embedding."""

    left: PartialSTS
    right: PartialSTS
    identification: Mapping[int, int] = field(default_factory=dict)
    forbidden: Sequence[PartialSTS] = ()
    witness: PartialSTS | None = None


@dataclass
class AmalgamationRun:
    problem: AmalgamationProblem
    union: PartialSTS
    injections: dict[str, list[int]]
    embedding: EmbeddingRun
    step_checks: list[dict] = field(default_factory=list)
    proper_free: bool | None = None
    whole_not_forbidden: bool | None = None

    @property
    def status(self) -> str:
        if any(not c["ok"] for c in self.step_checks if c["checked"]):
            return "failed"
        return self.embedding.status


def check_overlap(problem: AmalgamationProblem) -> None:
    ident = dict(problem.identification)
    left_pts = sorted(ident)
    right_pts = [ident[p] for p in left_pts]
    if len(ident) > 1:
        a = subsystem_from_points(problem.left, left_pts)
        b = subsystem_from_points(problem.right, right_pts)
        if a is None or b is None:
            raise OverlapNotSubsystem("identified points do not span a subsystem of both inputs")
        mapped = {tuple(sorted(ident[p] for p in blk)) for blk in a.blocks}
        if mapped != set(b.blocks):
            raise OverlapNotSubsystem("identified subsystems have different blocks")


def _subsystem_of_member(w: PartialSTS, f: PartialSTS) -> bool:
    if w.order > f.order:
        return False
    if w.order == f.order:
        return are_isomorphic(w, f)
    lattice = enumerate_subsystems(f, max_order=w.order)
    return any(are_isomorphic(r.as_system(), w) for r in lattice.of_order(w.order))


def check_witness(witness: PartialSTS, forbidden: Sequence[PartialSTS]) -> None:
    if not witness.is_complete:
        raise WitnessInvalid("witness must be a complete system")
    if not is_subsystem_free(witness):
        raise WitnessInvalid("witness has a nontrivial proper subsystem")
    for k, f in enumerate(forbidden):
        if _subsystem_of_member(witness, f):
            raise WitnessInvalid(f"witness is isomorphic to a subsystem of forbidden member {k}")


def find_good_witness(forbidden: Sequence[PartialSTS], orders: Sequence[int] = (13, 15, 19, 21, 25, 27),
                      per_order: int = 4) -> PartialSTS:
    """A subsystem-free complete system isomorphic to no subsystem of any
    forbidden member; the classical constructions are tried first."""
    for order in orders:
        for cand in catalog(order, per_order):
            try:
                check_witness(cand, forbidden)
            except WitnessInvalid:
                continue
            return cand
    raise WitnessNotFound("catalog exhausted without a witness")


def amalgamate(problem: AmalgamationProblem, step_limit: int = 1, seed: int = 0,
               verify: str = "steps", verify_max_order: int = 500, **run_opts) -> AmalgamationRun:
    """Embed ``left`` and ``right`` glued on the identified subsystem, plus a
    witness, into a system free of the forbidden class."""
    check_overlap(problem)
    forbidden = list(problem.forbidden)
    witness = problem.witness if problem.witness is not None else find_good_witness(forbidden)
    check_witness(witness, forbidden)

    glued = glued_union(problem.left, problem.right, problem.identification)
    union = glued_union(glued, witness, {})
    injections = {
        "left": list(range(problem.left.order)),
        "right": glue_injection(problem.left.order, problem.right.order, problem.identification),
        "witness": [glued.order + k for k in range(witness.order)],
    }
    inputs = {"left": problem.left, "right": problem.right, "witness": witness}
    checks: list[dict] = []

    def hook(step, result, system):
        checked = verify != "off" and system.order <= verify_max_order
        entry = {"step": step, "order": system.order, "checked": checked}
        if checked:
            found = {key: is_embedded_subsystem(system, inputs[key], injections[key])
                     for key in inputs if inputs[key].is_complete}
            bad = class_violations(system, forbidden) if forbidden else []
            entry.update(inputs_found=found, forbidden_hits=len(bad),
                         ok=all(found.values()) and not bad)
        else:
            entry["ok"] = True
        checks.append(entry)

    plan = plan_embedding(union, seed=seed)
    run = run_embedding(plan, step_limit=step_limit, verify=verify, seed=seed,
                        verify_max_order=verify_max_order, step_hook=hook, **run_opts)
    out = AmalgamationRun(problem, union, injections, run, checks)
    if run.status == "complete" and run.current.order <= verify_max_order:
        final = run.current
        hits = class_violations(final, forbidden) if forbidden else []
        out.proper_free = not any(rec.order < final.order for rec, _ in hits)
        out.whole_not_forbidden = not any(rec.order == final.order for rec, _ in hits)
    return out
