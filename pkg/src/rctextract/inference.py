"""Exact constrained decoding of per-candidate label distributions.

Every candidate gets one of the seven labels. In the constrained modes each
non-null label goes to exactly one candidate, so an assignment is a tuple of
six distinct 1-based positions ``(z_P, z_A1, z_A2, z_OC, z_R1, z_R2)``.

The score of an assignment is the sum of log-probabilities of every candidate
at its label (``O`` for unassigned candidates), minus the distance penalties
``delta_a * (z_A2 - z_A1) + delta_r * (z_R2 - z_R1)`` in full mode. Scores are
always evaluated with ``math.fsum`` so that equal assignments give bit-equal
objectives no matter which search produced them. Ties go to the
lexicographically smallest position tuple.
"""
from __future__ import annotations

import functools
import itertools
import json
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import LABELS, Abstract, Label, SectionClass
from .preprocess.normalize import NON_TAG_TYPE, norm_type
from .preprocess.pipeline import Candidate, filter_candidates

log = logging.getLogger(__name__)

MODES = ("zero", "vanilla", "full")
TARGETS = LABELS[:6]
O_INDEX = 6
P, A1, A2, OC, R1, R2 = range(6)
LOG_FLOOR = math.log(np.finfo(np.float64).tiny)
DEFAULT_DELTA = 1e-5
BRUTE_FORCE_MAX_N = 16
#: Number of the ordering repair ``z_R1 < z_R2`` in :func:`check_constraints`.
R_ORDER = 11
# more near-optimal assignments than this means massive exact ties; the
# search stops collecting and decides among those found
_MAX_NEAR_TIES = 20_000
_NEG = -np.inf


class InferenceError(ValueError):
    pass


class EmptyProblem(InferenceError):
    pass


class Infeasible(InferenceError):
    pass


class ProblemTooLarge(InferenceError):
    pass


class ConstraintViolation(RuntimeError):
    pass


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabelingProblem:
    """Decoder input for one abstract.

    Parameters
    ----------
    logp : (N, 7) array
        Log-probabilities in label order ``P, A1, A2, OC, R1, R2, O``.
    section : sequence of SectionClass, length N
    sent_pos : (N,) ints in 0..9
        Sentence index within the paragraph, capped at 9.
    norm_type : (N,) ints in 0..15 or 101
    delta_a, delta_r : float
        Weights of the arm and result distance penalties.
    same_sentence : bool
        Require OC, R1 and R2 in sentences with the same position, instead of
        the default ``q_OC >= min(q_R1, q_R2)``.
    """

    logp: np.ndarray
    section: Tuple[SectionClass, ...]
    sent_pos: np.ndarray
    norm_type: np.ndarray
    delta_a: float = DEFAULT_DELTA
    delta_r: float = DEFAULT_DELTA
    same_sentence: bool = False

    def __post_init__(self):
        logp = np.array(self.logp, dtype=np.float64)
        if logp.ndim != 2 or logp.shape[1] != 7:
            raise ValueError(f"logp must have shape (N, 7), got {logp.shape}")
        n = logp.shape[0]
        if n == 0:
            raise EmptyProblem("no candidates")
        if not np.all(np.isfinite(logp)):
            raise ValueError("logp entries must be finite")
        section = tuple(SectionClass(s) for s in self.section)
        sent_pos = np.array(self.sent_pos, dtype=np.int64)
        ntype = np.array(self.norm_type, dtype=np.int64)
        if len(section) != n or sent_pos.shape != (n,) or ntype.shape != (n,):
            raise ValueError("metadata lengths must equal the number of candidates")
        if np.any((sent_pos < 0) | (sent_pos > 9)):
            raise ValueError("sent_pos values must lie in 0..9")
        if np.any(((ntype < 0) | (ntype > 15)) & (ntype != NON_TAG_TYPE)):
            raise ValueError("norm_type values must lie in 0..15 or equal 101")
        if self.delta_a < 0 or self.delta_r < 0:
            raise ValueError("distance weights must be non-negative")
        object.__setattr__(self, "logp", _readonly(logp))
        object.__setattr__(self, "section", section)
        object.__setattr__(self, "sent_pos", _readonly(sent_pos))
        object.__setattr__(self, "norm_type", _readonly(ntype))
        object.__setattr__(self, "delta_a", float(self.delta_a))
        object.__setattr__(self, "delta_r", float(self.delta_r))

    @property
    def N(self) -> int:
        return self.logp.shape[0]

    def replace(self, **changes) -> "LabelingProblem":
        kw = dict(logp=self.logp, section=self.section, sent_pos=self.sent_pos,
                  norm_type=self.norm_type, delta_a=self.delta_a, delta_r=self.delta_r,
                  same_sentence=self.same_sentence)
        kw.update(changes)
        return LabelingProblem(**kw)

    def to_dict(self) -> dict:
        return {
            "format": "rctextract-problem",
            "version": 1,
            "logp": self.logp.tolist(),
            "section": [s.value for s in self.section],
            "sent_pos": self.sent_pos.tolist(),
            "norm_type": self.norm_type.tolist(),
            "delta_a": self.delta_a,
            "delta_r": self.delta_r,
            "same_sentence": self.same_sentence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelingProblem":
        if d.get("format") != "rctextract-problem" or d.get("version") != 1:
            raise ValueError("not a version 1 problem document")
        return cls(
            logp=np.asarray(d["logp"], dtype=np.float64), section=d["section"],
            sent_pos=d["sent_pos"], norm_type=d["norm_type"], delta_a=d["delta_a"],
            delta_r=d["delta_r"], same_sentence=d.get("same_sentence", False),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class Solution:
    """Decoded labels for the candidates of one problem.

    ``positions`` holds the 1-based ``(z_P, z_A1, z_A2, z_OC, z_R1, z_R2)``
    in the constrained modes and is None in zero mode or when infeasible.
    """

    mode: str
    labels: Tuple[Label, ...]
    positions: Optional[Tuple[int, ...]]
    objective: float
    feasible: bool = True

    @classmethod
    def infeasible(cls, mode: str, n: int) -> "Solution":
        return cls(mode, (Label.O,) * n, None, -math.inf, False)

    def head(self, label) -> Optional[int]:
        """1-based candidate position of ``label`` (constrained modes only)."""
        if self.positions is None:
            return None
        return self.positions[TARGETS.index(Label(label))]


def build_problem(abstract: Abstract, proba, candidates: Optional[Sequence[Candidate]] = None,
                  delta_a: float = DEFAULT_DELTA, delta_r: float = DEFAULT_DELTA,
                  same_sentence: bool = False) -> LabelingProblem:
    """Problem for the candidates of a preprocessed abstract.

    ``proba`` is an (N, 7) array of per-candidate label distributions, rows
    aligned with ``candidates`` (by default :func:`filter_candidates`).
    Probabilities below the smallest positive normal double are floored so
    every log-probability is finite.
    """
    if candidates is None:
        candidates = filter_candidates(abstract)
    if not candidates:
        raise EmptyProblem(f"{abstract.id}: no candidate tokens")
    proba = np.asarray(proba, dtype=np.float64)
    if proba.shape != (len(candidates), 7):
        raise ValueError(f"expected probabilities of shape {(len(candidates), 7)}, got {proba.shape}")
    if np.any(proba < 0) or not np.allclose(proba.sum(axis=1), 1.0, atol=1e-6):
        raise ValueError("probability rows must be distributions")
    toks = [c.token for c in candidates]
    return LabelingProblem(
        logp=np.maximum(np.log(np.maximum(proba, np.finfo(np.float64).tiny)), LOG_FLOOR),
        section=[t.section for t in toks],
        sent_pos=[min(t.sentence_index, 9) for t in toks],
        norm_type=[norm_type(t.normalized) for t in toks],
        delta_a=delta_a, delta_r=delta_r, same_sentence=same_sentence,
    )


# ---------------------------------------------------------------------------
# objective and constraint validation


def _label_indices(n: int, assignment) -> Tuple[List[int], Optional[Tuple[int, ...]]]:
    """Per-candidate label indices plus positions if every target label is used once."""
    assignment = list(assignment)
    if len(assignment) == 6 and all(isinstance(z, (int, np.integer)) for z in assignment):
        pos = tuple(int(z) for z in assignment)
        if len(set(pos)) != 6 or min(pos) < 1 or max(pos) > n:
            raise ValueError(f"positions {pos} must be distinct and within 1..{n}")
        lab = [O_INDEX] * n
        for k, z in enumerate(pos):
            lab[z - 1] = k
        return lab, pos
    if len(assignment) != n:
        raise ValueError("assignment must be 6 positions or one label per candidate")
    lab = [LABELS.index(Label(v)) for v in assignment]
    pos = None
    if all(lab.count(k) == 1 for k in range(6)):
        pos = tuple(lab.index(k) + 1 for k in range(6))
    return lab, pos


def objective(problem: LabelingProblem, assignment, mode: str = "full") -> float:
    """Score of an assignment.

    ``assignment`` is either the six 1-based positions or one label per
    candidate. Full mode subtracts the distance penalties and needs exactly
    one candidate per non-null label.
    """
    _check_mode(mode)
    lab, pos = _label_indices(problem.N, assignment)
    rows = problem.logp.tolist()
    total = math.fsum(rows[i][l] for i, l in enumerate(lab))
    if mode == "full":
        if pos is None:
            raise ValueError("full-mode objective needs exactly one candidate per non-null label")
        total -= problem.delta_a * (pos[A2] - pos[A1]) + problem.delta_r * (pos[R2] - pos[R1])
    return total


def check_constraints(problem: LabelingProblem, positions: Sequence[int], mode: str = "full") -> List[int]:
    """Numbers of the constraints that ``positions`` violates (empty if none).

    1 distinct positions, 2 one in-range position per label, 3 A1 before A2,
    4 OC/R1/R2 after P/A1/A2, 5 results only in RESULTS (or unlabeled)
    sections, 6 no P/A1/A2 in RESULTS, 7 P not between the arms, 8 numeric
    results, 9 same result type, 10 outcome sentence position, and
    ``R_ORDER`` (11) R1 before R2. Vanilla mode checks 1 and 2 only.
    """
    _check_mode(mode)
    z = [int(v) for v in positions]
    bad: List[int] = []
    if len(z) != 6 or any(v < 1 or v > problem.N for v in z):
        return [2]
    if len(set(z)) != 6:
        bad.append(1)
    if mode != "full":
        return bad
    i = [v - 1 for v in z]
    sec = [problem.section[k] for k in i]
    w = [int(problem.norm_type[k]) for k in i]
    q = [int(problem.sent_pos[k]) for k in i]
    if not z[A1] <= z[A2]:
        bad.append(3)
    if not all(late > early for late in (z[OC], z[R1], z[R2]) for early in (z[P], z[A1], z[A2])):
        bad.append(4)
    if any(sec[k] not in (SectionClass.RESULTS, SectionClass.NONE) for k in (R1, R2)):
        bad.append(5)
    if any(sec[k] is SectionClass.RESULTS for k in (P, A1, A2)):
        bad.append(6)
    if not (z[P] <= z[A1] or z[P] >= z[A2]):
        bad.append(7)
    if w[R1] > 100 or w[R2] > 100:
        bad.append(8)
    if w[R1] != w[R2]:
        bad.append(9)
    if problem.same_sentence:
        if not q[OC] == q[R1] == q[R2]:
            bad.append(10)
    elif not (q[OC] >= q[R1] or q[OC] >= q[R2]):
        bad.append(10)
    if not z[R1] <= z[R2]:
        bad.append(R_ORDER)
    return bad


# ---------------------------------------------------------------------------
# shared pieces


def _tolerance(problem: LabelingProblem) -> float:
    return 1e-9 * max(1.0, float(np.abs(problem.logp).max()))


def _pick(problem: LabelingProblem, candidates, mode: str) -> Tuple[Tuple[int, ...], float]:
    """Canonical choice among near-optimal 0-based position tuples."""
    best, best_val = None, -math.inf
    for c in sorted(set(tuple(int(v) + 1 for v in c) for c in candidates)):
        v = objective(problem, c, mode)
        if v > best_val:
            best, best_val = c, v
    return best, best_val


def _solution(problem: LabelingProblem, mode: str, pos: Tuple[int, ...], val: float) -> Solution:
    labels = [Label.O] * problem.N
    for k, z in enumerate(pos):
        labels[z - 1] = TARGETS[k]
    return Solution(mode, tuple(labels), pos, val, True)


def _solve_zero(problem: LabelingProblem) -> Solution:
    idx = np.argmax(problem.logp, axis=1)
    labels = tuple(LABELS[k] for k in idx)
    return Solution("zero", labels, None, objective(problem, labels, "zero"), True)


# ---------------------------------------------------------------------------
# vanilla mode: one distinct candidate per label


def _solve_vanilla(problem: LabelingProblem) -> Solution:
    n = problem.N
    if n < 6:
        raise Infeasible(f"{n} candidates cannot hold six distinct labels")
    g = problem.logp[:, :6] - problem.logp[:, 6:7]
    rows, cols = linear_sum_assignment(g, maximize=True)
    best = float(g[rows, cols].sum())
    tol = _tolerance(problem)
    thr = best - tol
    # near-optimal assignments only use each label's top six candidates
    # (ties within tolerance included): any other choice can be swapped for
    # a free top-six candidate with a strictly larger gain
    allowed = []
    for k in range(6):
        sixth = np.sort(g[:, k])[-6]
        allowed.append(np.flatnonzero(g[:, k] >= sixth - tol))
    top = [float(g[a, k].max()) for k, a in enumerate(allowed)]
    rest = [math.fsum(top[k + 1:]) for k in range(6)]
    found: List[Tuple[int, ...]] = []

    def dfs(k: int, used: Tuple[int, ...], acc: float) -> None:
        if len(found) >= _MAX_NEAR_TIES:
            return
        for i in allowed[k]:
            if i in used:
                continue
            v = acc + g[i, k]
            if v + rest[k] < thr:
                continue
            if k == 5:
                found.append(used + (int(i),))
            else:
                dfs(k + 1, used + (int(i),), v)

    dfs(0, (), 0.0)
    if len(found) >= _MAX_NEAR_TIES:
        log.warning("vanilla decoding: near-tie cap reached, deciding among %d assignments", len(found))
    pos, val = _pick(problem, found, "vanilla")
    return _solution(problem, "vanilla", pos, val)


# ---------------------------------------------------------------------------
# full mode
#
# Constraint 4 splits every feasible assignment at a boundary: the early
# triple (P, A1, A2) lies entirely before the late triple (OC, R1, R2).
# The best early triple whose last position is m and the best late triple
# whose first position is s are each computable with O(N^2) array work, which
# gives the exact optimum V*. A second pass enumerates every assignment
# within tolerance of V*, reusing the same tables as exact bounds.


class _FullTables:
    def __init__(self, problem: LabelingProblem):
        n = problem.N
        g = problem.logp[:, :6] - problem.logp[:, 6:7]
        sec = problem.section
        early_ok = np.array([s is not SectionClass.RESULTS for s in sec])
        w = problem.norm_type
        r_ok = np.array([s in (SectionClass.RESULTS, SectionClass.NONE) for s in sec]) & (w <= 100)
        self.n = n
        self.q = problem.sent_pos
        self.same_sentence = problem.same_sentence
        idx = np.arange(n)
        gap = (idx[None, :] - idx[:, None]).astype(np.float64)
        upper = gap > 0

        self.gP = np.where(early_ok, g[:, P], _NEG)
        gA1 = np.where(early_ok, g[:, A1], _NEG)
        gA2 = np.where(early_ok, g[:, A2], _NEG)
        # pa[a1, a2]: arm pair value, a1 < a2
        self.pa = np.where(upper, gA1[:, None] + gA2[None, :] - problem.delta_a * gap, _NEG)
        self.p_before = np.concatenate([[_NEG], np.maximum.accumulate(self.gP)[:-1]])
        # case X: p < a1 < a2 = m
        self.X = self.pa + self.p_before[:, None]
        ex = self.X.max(axis=0)
        # case Y: a1 < a2 < p = m
        pair_end = self.pa.max(axis=0)
        pair_before = np.concatenate([[_NEG], np.maximum.accumulate(pair_end)[:-1]])
        ey = self.gP + pair_before
        self.E_at = np.maximum(ex, ey)

        self.gOC = g[:, OC]
        pr_ok = upper & r_ok[:, None] & r_ok[None, :] & (w[:, None] == w[None, :])
        if self.same_sentence:
            pr_ok &= self.q[:, None] == self.q[None, :]
        # pr[r1, r2]: result pair value, r1 < r2
        self.pr = np.where(pr_ok, g[:, R1][:, None] + g[:, R2][None, :] - problem.delta_r * gap, _NEG)
        self.qmin = np.minimum(self.q[:, None], self.q[None, :])
        self._late: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        L_at = np.full(n, _NEG)
        for s in range(n):
            by_oc, by_r = self.late(s)
            L_at[s] = max(by_oc.max(initial=_NEG), by_r.max(initial=_NEG))
        self.L_at = L_at
        # L_suf[t]: best late triple starting at t or later; L_suf[n] = -inf
        self.L_suf = np.append(np.maximum.accumulate(L_at[::-1])[::-1], _NEG)

    def late(self, s: int) -> Tuple[np.ndarray, np.ndarray]:
        """Late-triple values with first position ``s``.

        Returns ``by_oc[r1, r2]`` over r1, r2 > s (OC at s) and
        ``by_r[r2, o]`` over r2, o > s (R1 at s), both offset by ``s + 1``.
        """
        hit = self._late.get(s)
        if hit is not None:
            return hit
        t = s + 1
        pr = self.pr[t:, t:]
        q = self.q
        if self.same_sentence:
            ok_oc = q[t:][:, None] == q[s]  # pair already shares one q
            ok_oc = ok_oc & ok_oc.T
        else:
            ok_oc = self.qmin[t:, t:] <= q[s]
        by_oc = np.where(ok_oc, pr + self.gOC[s], _NEG)
        m = self.n - t
        pair = self.pr[s, t:]
        if self.same_sentence:
            ok_r = np.broadcast_to(q[t:][None, :] == q[s], (m, m))
        else:
            ok_r = q[t:][None, :] >= np.minimum(q[s], q[t:])[:, None]
        ok_r = ok_r & ~np.eye(m, dtype=bool)
        by_r = np.where(ok_r, pair[:, None] + self.gOC[t:][None, :], _NEG)
        self._late[s] = (by_oc, by_r)
        return by_oc, by_r

    def optimum(self) -> float:
        E_pre = np.maximum.accumulate(self.E_at)
        return float(np.max(E_pre + self.L_suf[1:]))

    def near_optimal(self, thr: float) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = []
        for m in range(self.n - 1):
            lbest = self.L_suf[m + 1]
            if self.E_at[m] + lbest < thr:
                continue
            early = []
            for a1 in np.flatnonzero(self.X[:, m] + lbest >= thr):
                base = self.pa[a1, m]
                for p in np.flatnonzero(self.gP[:a1] + base + lbest >= thr):
                    early.append(((int(p), int(a1), m), self.gP[p] + base))
            for a1, a2 in zip(*np.nonzero(self.pa[:m, :m] + self.gP[m] + lbest >= thr)):
                early.append(((m, int(a1), int(a2)), self.gP[m] + self.pa[a1, a2]))
            for triple, ev in early:
                need = thr - ev
                for s in np.flatnonzero(self.L_at[m + 1:] >= need) + m + 1:
                    by_oc, by_r = self.late(int(s))
                    t = s + 1
                    for r1, r2 in zip(*np.nonzero(by_oc >= need)):
                        out.append(triple + (int(s), int(r1 + t), int(r2 + t)))
                    for r2, o in zip(*np.nonzero(by_r >= need)):
                        out.append(triple + (int(o + t), int(s), int(r2 + t)))
                    if len(out) >= _MAX_NEAR_TIES:
                        log.warning("full decoding: near-tie cap reached")
                        return out
        return out


def _solve_full(problem: LabelingProblem) -> Solution:
    if problem.N < 6:
        raise Infeasible(f"{problem.N} candidates cannot hold six distinct labels")
    tables = _FullTables(problem)
    best = tables.optimum()
    if best == _NEG:
        raise Infeasible("no assignment satisfies the constraints")
    found = tables.near_optimal(best - _tolerance(problem))
    pos, val = _pick(problem, found, "full")
    return _solution(problem, "full", pos, val)


def solve(problem: LabelingProblem, mode: str = "full") -> Solution:
    """Exact decoding in ``zero``, ``vanilla`` or ``full`` mode.

    Raises :class:`Infeasible` when no assignment satisfies the mode's
    constraints. Every constrained solution is re-validated by
    :func:`check_constraints`.
    """
    _check_mode(mode)
    if problem.N == 0:
        raise EmptyProblem("no candidates")
    if mode == "zero":
        return _solve_zero(problem)
    sol = _solve_vanilla(problem) if mode == "vanilla" else _solve_full(problem)
    bad = check_constraints(problem, sol.positions, mode)
    if bad:
        raise ConstraintViolation(f"{mode} solution {sol.positions} violates constraints {bad}")
    return sol


# ---------------------------------------------------------------------------
# exhaustive oracle


@functools.lru_cache(maxsize=None)
def _permutations(n: int) -> np.ndarray:
    """All ordered 6-tuples of distinct 0-based positions, shape (6, n!/(n-6)!)."""
    flat = np.fromiter(itertools.chain.from_iterable(itertools.permutations(range(n), 6)),
                       dtype=np.int8)
    return _readonly(np.ascontiguousarray(flat.reshape(-1, 6).T))


@functools.lru_cache(maxsize=None)
def _ordered_permutations(n: int) -> np.ndarray:
    """The subset of :func:`_permutations` meeting the purely positional constraints."""
    z = _permutations(n)
    early = np.maximum(np.maximum(z[P], z[A1]), z[A2])
    late = np.minimum(np.minimum(z[OC], z[R1]), z[R2])
    keep = (z[A1] < z[A2]) & (z[R1] < z[R2]) & (late > early) & ((z[P] < z[A1]) | (z[P] > z[A2]))
    return _readonly(np.ascontiguousarray(z[:, keep]))


def brute_force(problem: LabelingProblem, mode: str = "full") -> Solution:
    """Exhaustive reference decoder; identical results to :func:`solve`.

    Enumerates every assignment of six distinct candidates (zero mode
    decomposes per candidate). Limited to N <= 16.
    """
    _check_mode(mode)
    n = problem.N
    if n > BRUTE_FORCE_MAX_N:
        raise ProblemTooLarge(f"brute force limited to {BRUTE_FORCE_MAX_N} candidates, got {n}")
    rows = problem.logp.tolist()
    if mode == "zero":
        labels = []
        for row in rows:
            k = 0
            for j in range(1, 7):
                if row[j] > row[k]:
                    k = j
            labels.append(LABELS[k])
        labels = tuple(labels)
        return Solution("zero", labels, None, objective(problem, labels, "zero"), True)
    if n < 6:
        raise Infeasible(f"{n} candidates cannot hold six distinct labels")
    g = problem.logp[:, :6] - problem.logp[:, 6:7]
    if mode == "vanilla":
        z = _permutations(n)
        value = sum(g[:, k][z[k]] for k in range(6))
    else:
        z = _ordered_permutations(n)
        sec = np.array([s.value for s in problem.section])
        w, q = problem.norm_type, problem.sent_pos
        in_results = sec == SectionClass.RESULTS.value
        results_ok = in_results | (sec == SectionClass.NONE.value)
        keep = ~in_results[z[P]] & ~in_results[z[A1]] & ~in_results[z[A2]]
        keep &= results_ok[z[R1]] & results_ok[z[R2]]
        keep &= (w[z[R1]] <= 100) & (w[z[R2]] <= 100) & (w[z[R1]] == w[z[R2]])
        if problem.same_sentence:
            keep &= (q[z[OC]] == q[z[R1]]) & (q[z[OC]] == q[z[R2]])
        else:
            keep &= (q[z[OC]] >= q[z[R1]]) | (q[z[OC]] >= q[z[R2]])
        z = z[:, keep]
        if z.shape[1] == 0:
            raise Infeasible("no assignment satisfies the constraints")
        zi = z.astype(np.float64)
        value = sum(g[:, k][z[k]] for k in range(6))
        value = value - problem.delta_a * (zi[A2] - zi[A1]) - problem.delta_r * (zi[R2] - zi[R1])
    near = np.flatnonzero(value >= value.max() - _tolerance(problem))
    pos, val = _pick(problem, z[:, near].T.tolist(), mode)
    return _solution(problem, mode, pos, val)


__all__ = [
    "BRUTE_FORCE_MAX_N", "ConstraintViolation", "DEFAULT_DELTA", "EmptyProblem", "Infeasible",
    "InferenceError", "LabelingProblem", "MODES", "ProblemTooLarge", "R_ORDER", "Solution",
    "brute_force", "build_problem", "check_constraints", "objective", "solve",
]
