"""Structural laws of rational periodic points, as predicates over solver output.

Every checker returns a :class:`LawReport`. A failing report carries a
witness holding the raw numbers, and :func:`reproduces_failure` re-evaluates
the law on that witness alone.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Iterable, Sequence

from .numbers import format_rational, lcm, supp
from .solver import PeriodicSet

log = logging.getLogger(__name__)


class LawId(str, enum.Enum):
    PRODUCT_IDENTITY_K = "product_identity_k"
    PAIRWISE_PRODUCT = "pairwise_product"
    ORBIT_PAIR_PRODUCT = "orbit_pair_product"
    SUM_SUPPORT = "sum_support"
    ODD_DENOMINATOR = "odd_denominator"
    DIV16 = "div16"
    CLASS_BOUNDS = "class_bounds"
    SAME_CLASS_SUM = "same_class_sum"
    CYCLE_RESIDUES = "cycle_residues"
    CYCLE_BOUND_3FREE = "cycle_bound_3free"
    FPS_CONJECTURE = "fps_conjecture"
    PREPER_BOUND = "preper_bound"


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class LawReport:
    law_id: LawId
    status: Status
    witness: dict[str, Any] | None = None
    context: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def failed(self) -> bool:
        return self.status is Status.FAIL

    def to_dict(self) -> dict[str, Any]:
        return {
            "law_id": self.law_id.value,
            "status": self.status.value,
            "witness": self.witness,
            "context": self.context,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def _ctx(ps: PeriodicSet, **extra: Any) -> dict[str, Any]:
    out = {"c": format_rational(ps.c.c), "d": ps.d, "s": ps.s, "num_per": list(ps.num_per)}
    out.update(extra)
    return out


def _report(law: LawId, ps: PeriodicSet, witness: dict | None, **extra: Any) -> LawReport:
    status = Status.PASS if witness is None else Status.FAIL
    return LawReport(law, status, witness, _ctx(ps, **extra))


def _na(law: LawId, ps: PeriodicSet, why: str) -> LawReport:
    return LawReport(law, Status.NOT_APPLICABLE, None, _ctx(ps, reason=why))


def _prod(values: Iterable[int]) -> int:
    return math.prod(values)


def _d4(ps: PeriodicSet) -> bool:
    return ps.d is not None and ps.d % 4 == 0


# --- product identities -------------------------------------------------------


def _shift_product(cycle: Sequence[int], k: int) -> int:
    n = len(cycle)
    return _prod(cycle[i] + cycle[(i + k) % n] for i in range(n))


def check_product_identity_k(ps: PeriodicSet, k: int) -> LawReport:
    """``prod_i (X_i + X_{i+k}) = d**L`` along each cycle, indices mod the cycle length ``L``.

    Cycles whose length divides ``k`` pair each point with itself and are
    skipped; if every cycle is skipped the law does not apply.
    """
    n = len(ps.per)
    if n < 1 or not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}] for |Per| = {n}, got {k}")
    d = ps.d
    used = 0
    for cyc in ps.cycle_numerators():
        L = len(cyc)
        if k % L == 0:
            continue
        used += 1
        got = _shift_product(cyc, k)
        if got != d**L:
            return _report(
                LawId.PRODUCT_IDENTITY_K,
                ps,
                {"cycle": list(cyc), "k": k, "d": d, "product": got, "expected": d**L},
                k=k,
            )
    if used == 0:
        return _na(LawId.PRODUCT_IDENTITY_K, ps, f"every cycle length divides k={k}")
    return _report(LawId.PRODUCT_IDENTITY_K, ps, None, k=k)


def check_product_identity_all(ps: PeriodicSet) -> LawReport:
    """:func:`check_product_identity_k` for every admissible ``k``; first failure wins."""
    n = len(ps.per)
    if n < 2:
        return _na(LawId.PRODUCT_IDENTITY_K, ps, "fewer than two periodic points")
    status = Status.NOT_APPLICABLE
    for k in range(1, n):
        rep = check_product_identity_k(ps, k)
        if rep.failed:
            return rep
        if rep.passed:
            status = Status.PASS
    if status is Status.NOT_APPLICABLE:
        return _na(LawId.PRODUCT_IDENTITY_K, ps, "only fixed points")
    return _report(LawId.PRODUCT_IDENTITY_K, ps, None, k=list(range(1, n)))


def check_pairwise_product(ps: PeriodicSet) -> LawReport:
    """``prod_{i<j} (X_i + X_j) = +-d**(n(n-1)/2)`` over all periodic numerators."""
    nums = list(ps.num_per)
    n = len(nums)
    if n < 2:
        return _na(LawId.PAIRWISE_PRODUCT, ps, "fewer than two periodic points")
    d = ps.d
    expected = d ** (n * (n - 1) // 2)
    got = _prod(x + y for x, y in combinations(nums, 2))
    if abs(got) == expected:
        return _report(LawId.PAIRWISE_PRODUCT, ps, None, product=got)
    pair = _first_bad_pair(nums, d)
    return _report(
        LawId.PAIRWISE_PRODUCT,
        ps,
        {"numerators": nums, "d": d, "product": got, "expected_abs": expected, "pair": pair},
    )


def _first_bad_pair(nums: Sequence[int], d: int) -> list[int] | None:
    primes = supp(d)
    for x, y in combinations(nums, 2):
        if x + y == 0 or not supp(x + y) <= primes:
            return [x, y]
    return None


def check_orbit_pair_product(ps: PeriodicSet) -> LawReport:
    """For distinct periodic x, y: ``prod_{i<r} (X_i + Y_i) = d**r``, r = lcm of periods."""
    cycles = ps.cycle_numerators()
    where = {X: (ci, i) for ci, cyc in enumerate(cycles) for i, X in enumerate(cyc)}
    nums = list(ps.num_per)
    if len(nums) < 2:
        return _na(LawId.ORBIT_PAIR_PRODUCT, ps, "fewer than two periodic points")
    d = ps.d
    for X, Y in combinations(nums, 2):
        cx, ix = where[X]
        cy, iy = where[Y]
        lx, ly = len(cycles[cx]), len(cycles[cy])
        r = lcm(lx, ly)
        ox = [cycles[cx][(ix + t) % lx] for t in range(r)]
        oy = [cycles[cy][(iy + t) % ly] for t in range(r)]
        got = _prod(u + v for u, v in zip(ox, oy))
        if got != d**r:
            return _report(
                LawId.ORBIT_PAIR_PRODUCT,
                ps,
                {"orbit_x": ox, "orbit_y": oy, "d": d, "product": got, "expected": d**r},
            )
    return _report(LawId.ORBIT_PAIR_PRODUCT, ps, None)


# --- support and parity -------------------------------------------------------


def check_sum_support(ps: PeriodicSet) -> LawReport:
    """Every pairwise sum of periodic numerators has its primes inside supp(d); pairs are coprime."""
    nums = list(ps.num_per)
    if len(nums) < 2:
        return _na(LawId.SUM_SUPPORT, ps, "fewer than two periodic points")
    d = ps.d
    primes = supp(d)
    for x, y in combinations(nums, 2):
        s = x + y
        if s == 0:
            why = "zero sum"
        elif not supp(s) <= primes:
            why = "prime outside supp(d)"
        elif math.gcd(x, y) != 1:
            why = "not coprime"
        else:
            continue
        return _report(LawId.SUM_SUPPORT, ps, {"pair": [x, y], "sum": s, "d": d, "reason": why})
    return _report(LawId.SUM_SUPPORT, ps, None)


def check_odd_denominator(ps: PeriodicSet) -> LawReport:
    den_c = ps.c.c.denominator
    if den_c % 2 == 0:
        return _na(LawId.ODD_DENOMINATOR, ps, "den(c) is even")
    n = len(ps.per)
    witness = None if n <= 2 else {"den_c": den_c, "per_size": n}
    return _report(LawId.ODD_DENOMINATOR, ps, witness)


def check_div16(ps: PeriodicSet) -> LawReport:
    """A cycle of length >= 3 forces 16 | den(c)."""
    den_c = ps.c.c.denominator
    longest = ps.max_cycle_length
    witness = None
    if longest >= 3 and den_c % 16:
        witness = {"den_c": den_c, "cycle_length": longest}
    return _report(LawId.DIV16, ps, witness)


# --- residue-class bounds (d divisible by 4) ----------------------------------


def _classes(nums: Iterable[int], d: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = defaultdict(list)
    for X in nums:
        out[X % d].append(X)
    return dict(out)


def _class_bound_violations(num_per: Sequence[int], preper_nums: Sequence[int], d: int, s: int) -> list[str]:
    n = len(num_per)
    classes = _classes(num_per, d)
    m = len(classes)
    bad = []
    if not m <= n <= m + 2:
        bad.append(f"|Per|={n} outside [m, m+2] with m={m}")
    if n > 2**s + 2:
        bad.append(f"|Per|={n} > 2^s+2={2**s + 2}")
    pm = len({X % d for X in preper_nums})
    if pm > 2**s:
        bad.append(f"PrePer uses {pm} classes mod d > 2^s={2**s}")
    if n == m + 2:
        # both doubled classes hold exactly two elements, with sums 2 and -2
        doubled = [v for v in classes.values() if len(v) > 1]
        sums = sorted(sum(v) for v in doubled)
        if len(doubled) != 2 or any(len(v) != 2 for v in doubled) or sums != [-2, 2]:
            bad.append(f"|Per|=m+2 but doubled classes are {sorted(doubled)}")
    return bad


def check_class_bounds(ps: PeriodicSet) -> LawReport:
    """``m <= |Per| <= m+2``, ``|Per| <= 2**s + 2`` and at most ``2**s`` PrePer classes mod d."""
    if not _d4(ps):
        return _na(LawId.CLASS_BOUNDS, ps, "d not divisible by 4")
    preper_nums = sorted(x.numerator for x in ps.per + ps.preper)
    bad = _class_bound_violations(ps.num_per, preper_nums, ps.d, ps.s)
    witness = None
    if bad:
        witness = {
            "num_per": list(ps.num_per),
            "preper_nums": preper_nums,
            "d": ps.d,
            "s": ps.s,
            "violations": bad,
        }
    return _report(LawId.CLASS_BOUNDS, ps, witness, m=ps.m_classes, preper_classes=ps.preper_classes)


def check_same_class_sum(ps: PeriodicSet) -> LawReport:
    """Distinct periodic numerators congruent mod d sum to +-2, at most two per class."""
    if not _d4(ps):
        return _na(LawId.SAME_CLASS_SUM, ps, "d not divisible by 4")
    d = ps.d
    for members in _classes(ps.num_per, d).values():
        if len(members) > 2:
            return _report(LawId.SAME_CLASS_SUM, ps, {"class": members, "d": d, "reason": "more than two"})
        if len(members) == 2 and sum(members) not in (2, -2):
            return _report(LawId.SAME_CLASS_SUM, ps, {"class": members, "d": d, "reason": "sum not +-2"})
    return _report(LawId.SAME_CLASS_SUM, ps, None)


# --- residues of a single cycle mod 3 and mod 5 -------------------------------


def _mod3_ok(res: Sequence[int]) -> bool:
    return len(set(res)) == 1 and res[0] != 0


def _mod5_ok(res: Sequence[int]) -> bool:
    n = len(res)
    vals = set(res)
    if 0 in vals:
        return False
    if len(vals) == 1:
        return True
    if len(vals) != 2:
        return False
    u, v = sorted(vals)
    if (u + v) % 5 == 0:
        return False
    alternating = all(res[i] != res[i + 1] for i in range(n - 1))
    if alternating and n % 2:
        log.warning("odd-length cycle alternating two residues mod 5: %s (treated as fail)", list(res))
    return alternating and n % 2 == 0


def check_mod3_mod5(cycle: Sequence[int], d: int) -> LawReport:
    """Residue shape of one cycle's numerators mod 3 (when 3 does not divide d, n >= 3)
    and mod 5 (when 5 does not divide d, n >= 4)."""
    cycle = list(cycle)
    n = len(cycle)
    ctx = {"cycle": cycle, "d": d}
    use3 = d % 3 != 0 and n >= 3
    use5 = d % 5 != 0 and n >= 4
    if not (use3 or use5):
        return LawReport(LawId.CYCLE_RESIDUES, Status.NOT_APPLICABLE, None, dict(ctx, reason="hypotheses not met"))
    r3 = [X % 3 for X in cycle]
    r5 = [X % 5 for X in cycle]
    bad = []
    if use3 and not _mod3_ok(r3):
        bad.append("mod3")
    if use5 and not _mod5_ok(r5):
        bad.append("mod5")
    witness = None
    if bad:
        witness = {"cycle": cycle, "d": d, "mod3": r3, "mod5": r5, "failed": bad}
    status = Status.FAIL if bad else Status.PASS
    return LawReport(LawId.CYCLE_RESIDUES, status, witness, ctx)


def check_cycle_residues(ps: PeriodicSet) -> LawReport:
    """:func:`check_mod3_mod5` over every cycle of the set."""
    if ps.d is None:
        return _na(LawId.CYCLE_RESIDUES, ps, "no cycles")
    applied = False
    for cyc in ps.cycle_numerators():
        rep = check_mod3_mod5(cyc, ps.d)
        if rep.failed:
            return LawReport(rep.law_id, rep.status, rep.witness, _ctx(ps))
        applied = applied or rep.passed
    if not applied:
        return _na(LawId.CYCLE_RESIDUES, ps, "no cycle meets the hypotheses")
    return _report(LawId.CYCLE_RESIDUES, ps, None)


def check_cycle_bound_3free(ps: PeriodicSet) -> LawReport:
    """With 4 | d and 3 not dividing d, every cycle has length at most ``2**s + 1``."""
    if not _d4(ps) or ps.d % 3 == 0:
        return _na(LawId.CYCLE_BOUND_3FREE, ps, "needs 4 | d and 3 not dividing d")
    longest = ps.max_cycle_length
    witness = None
    if longest > 2**ps.s + 1:
        witness = {"cycle_length": longest, "s": ps.s, "d": ps.d}
    return _report(LawId.CYCLE_BOUND_3FREE, ps, witness)


def check_fps_conjecture(ps: PeriodicSet) -> LawReport:
    """No cycle longer than 3. A failure is the thing the search is looking for."""
    s = ps.s
    regime = "s<=2: cycles longer than 3 are ruled out when d has at most two primes" if s <= 2 else "s>=3: open regime"
    for cyc in ps.cycles:
        if len(cyc) > 3:
            witness = {
                "cycle": [format_rational(x) for x in cyc],
                "length": len(cyc),
                "s": s,
                "escalate": True,
            }
            return _report(LawId.FPS_CONJECTURE, ps, witness, regime=regime)
    return _report(LawId.FPS_CONJECTURE, ps, None, regime=regime)


def check_preper_bound(ps: PeriodicSet) -> LawReport:
    """``|PrePer| <= 2**(s+2) + 1`` for nonzero c."""
    if ps.c.c == 0:
        return _na(LawId.PREPER_BOUND, ps, "c = 0")
    size = len(ps.per) + len(ps.preper)
    witness = None
    if size > 2 ** (ps.s + 2) + 1:
        witness = {"preper_size": size, "s": ps.s}
    return _report(LawId.PREPER_BOUND, ps, witness, preper_size=size)


# --- powers of two ------------------------------------------------------------


def two_power_decompositions(k: int) -> list[tuple[int, int, int, int]]:
    """All ``(e1, k1, e2, k2)`` with ``2**k = e1*2**k1 + e2*2**k2``, signs +-1, ``k_i >= 0``.

    Unordered: listed with ``k1 <= k2``. For ``k >= 1`` these are
    ``2**(k-1) + 2**(k-1)`` and ``-2**k + 2**(k+1)``; ``k = 0`` only has the second.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = []
    if k >= 1:
        out.append((1, k - 1, 1, k - 1))
    out.append((-1, k, 1, k + 1))
    return out


# --- driver -------------------------------------------------------------------

CHECKERS: dict[LawId, Callable[[PeriodicSet], LawReport]] = {
    LawId.PRODUCT_IDENTITY_K: check_product_identity_all,
    LawId.PAIRWISE_PRODUCT: check_pairwise_product,
    LawId.ORBIT_PAIR_PRODUCT: check_orbit_pair_product,
    LawId.SUM_SUPPORT: check_sum_support,
    LawId.ODD_DENOMINATOR: check_odd_denominator,
    LawId.DIV16: check_div16,
    LawId.CLASS_BOUNDS: check_class_bounds,
    LawId.SAME_CLASS_SUM: check_same_class_sum,
    LawId.CYCLE_RESIDUES: check_cycle_residues,
    LawId.CYCLE_BOUND_3FREE: check_cycle_bound_3free,
    LawId.FPS_CONJECTURE: check_fps_conjecture,
    LawId.PREPER_BOUND: check_preper_bound,
}

ALL_LAWS = tuple(CHECKERS)


def run_laws(ps: PeriodicSet, enabled: Iterable[LawId | str] | None = None) -> list[LawReport]:
    ids = ALL_LAWS if enabled is None else tuple(LawId(x) for x in enabled)
    return [CHECKERS[i](ps) for i in ALL_LAWS if i in ids]


# --- independent re-evaluation of failure witnesses ---------------------------


def _re_product_k(w: dict) -> bool:
    cyc = w["cycle"]
    return _shift_product(cyc, w["k"]) != w["d"] ** len(cyc)


def _re_pairwise(w: dict) -> bool:
    nums = w["numerators"]
    n = len(nums)
    return abs(_prod(x + y for x, y in combinations(nums, 2))) != w["d"] ** (n * (n - 1) // 2)


def _re_orbit_pair(w: dict) -> bool:
    ox, oy = w["orbit_x"], w["orbit_y"]
    return _prod(u + v for u, v in zip(ox, oy)) != w["d"] ** len(ox)


def _re_sum_support(w: dict) -> bool:
    x, y = w["pair"]
    s = x + y
    return s == 0 or not supp(s) <= supp(w["d"]) or math.gcd(x, y) != 1


def _re_same_class(w: dict) -> bool:
    members = w["class"]
    if len({X % w["d"] for X in members}) != 1:
        return False
    return len(members) > 2 or sum(members) not in (2, -2)


def _re_residues(w: dict) -> bool:
    cyc, d = w["cycle"], w["d"]
    return check_mod3_mod5(cyc, d).failed


_RECHECK: dict[LawId, Callable[[dict], bool]] = {
    LawId.PRODUCT_IDENTITY_K: _re_product_k,
    LawId.PAIRWISE_PRODUCT: _re_pairwise,
    LawId.ORBIT_PAIR_PRODUCT: _re_orbit_pair,
    LawId.SUM_SUPPORT: _re_sum_support,
    LawId.ODD_DENOMINATOR: lambda w: w["den_c"] % 2 == 1 and w["per_size"] > 2,
    LawId.DIV16: lambda w: w["cycle_length"] >= 3 and w["den_c"] % 16 != 0,
    LawId.CLASS_BOUNDS: lambda w: bool(_class_bound_violations(w["num_per"], w["preper_nums"], w["d"], w["s"])),
    LawId.SAME_CLASS_SUM: _re_same_class,
    LawId.CYCLE_RESIDUES: _re_residues,
    LawId.CYCLE_BOUND_3FREE: lambda w: w["d"] % 4 == 0 and w["d"] % 3 != 0 and w["cycle_length"] > 2 ** w["s"] + 1,
    LawId.FPS_CONJECTURE: lambda w: w["length"] == len(w["cycle"]) > 3,
    LawId.PREPER_BOUND: lambda w: w["preper_size"] > 2 ** (w["s"] + 2) + 1,
}


def reproduces_failure(report: LawReport) -> bool:
    """Re-evaluate the law on the witness values alone; True when the failure stands."""
    if not report.failed or report.witness is None:
        return False
    return _RECHECK[report.law_id](report.witness)
