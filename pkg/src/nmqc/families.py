"""Named function families, closed-form bounds and the verification suites."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

from .boolfn import BooleanFunction, all_functions, degree
from .bounds import (OptimizerConfig, PriorDistribution, appendix_c_window,
                     functional_from_game, quantum_bound)
from .gf2 import Gf2Matrix
from .sim import (GhzResource, parity_correlator, setting_angles,
                  statevector_distribution, success_probability)
from .synth import (build_pairwise_and_protocol, decide_feasibility,
                    synthesize_protocol, verify_deterministic)

SQRT1_2 = 1 / math.sqrt(2)


@dataclass(frozen=True)
class FamilySpec:
    kind: str  # "g" n-tuple AND, "h" pairwise AND, "k" complement of NOR
    n: int


def make_family(spec: FamilySpec) -> BooleanFunction:
    kind, n = spec.kind, spec.n
    if kind == "g" and n >= 1:
        return BooleanFunction.from_callable(n, lambda x: int(all(x)))
    if kind == "k" and n >= 1:
        return BooleanFunction.from_callable(n, lambda x: int(any(x)))
    if kind == "h" and n >= 2:
        # parity of the number of pairs of ones, C(W, 2) mod 2
        return BooleanFunction.from_callable(n, lambda x: (sum(x) * (sum(x) - 1) // 2) & 1)
    if kind not in ("g", "h", "k"):
        raise ValueError(f"unknown family {kind!r}")
    raise ValueError(f"arity {n} out of range for family {kind}")


def family(kind: str, n: int) -> BooleanFunction:
    return make_family(FamilySpec(kind, n))


@dataclass(frozen=True)
class ClosedFormBounds:
    family: str
    n: int
    c: Fraction
    q_coefficient: Fraction  # q = q_coefficient, or q_coefficient / sqrt(2) when q_over_sqrt2
    q_over_sqrt2: bool

    @property
    def q(self) -> float:
        return float(self.q_coefficient) * (SQRT1_2 if self.q_over_sqrt2 else 1.0)


def closed_form_bounds(spec: FamilySpec) -> ClosedFormBounds:
    """Bounds under the uniform prior.  Family k shares the bounds of g (input and output relabelling)."""
    kind, n = spec.kind, spec.n
    if kind in ("g", "k"):
        if n < 2:
            raise ValueError("closed form needs n >= 2")
        if n == 2:
            return ClosedFormBounds(kind, n, Fraction(1, 2), Fraction(1), True)
        c = Fraction((1 << n) - 2, 1 << n)
        return ClosedFormBounds(kind, n, c, c, False)
    if kind == "h":
        if n < 2:
            raise ValueError("closed form needs n >= 2")
        c = Fraction(1, 1 << (n // 2)) if n % 2 == 0 else Fraction(1, 1 << ((n - 1) // 2))
        return ClosedFormBounds(kind, n, c, Fraction(1), True)
    raise ValueError(f"unknown family {kind!r}")


# --- verification suites --------------------------------------------------------

SCOPES = ("theorem1", "prop1", "prop2", "prop3", "prop4", "appendixC")


@dataclass
class SuiteConfig:
    optimizer_tol: float = 1e-6
    probability_tol: float = 1e-12
    restarts: int = 200
    seed: int = 0
    random_functions_n4: int = 100


@dataclass
class CheckResult:
    check: str
    scope: str
    expected: object
    measured: object
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    @classmethod
    def from_json(cls, obj: dict) -> CheckResult:
        return cls(obj["check"], obj["scope"], obj["expected"], obj["measured"],
                   obj["tolerance"], obj["pass"])


def _fmt(v) -> object:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _close(check, scope, expected, measured, tol) -> CheckResult:
    return CheckResult(check, scope, expected, measured, tol, abs(measured - expected) <= tol)


def _exact(check, scope, expected, measured) -> CheckResult:
    return CheckResult(check, scope, _fmt(expected), _fmt(measured), 0.0, expected == measured)


def _suite_totality(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    rng = random.Random(cfg.seed)
    groups = [(3, list(all_functions(3)))]
    groups.append((4, [BooleanFunction(4, tuple(rng.randint(0, 1) for _ in range(16)))
                       for _ in range(cfg.random_functions_n4)]))
    for n, funcs in groups:
        exact_ok = prob_ok = size_ok = 0
        worst = 0.0
        for f in funcs:
            p = synthesize_protocol(f)
            exact_ok += verify_deterministic(p, f)
            size_ok += p.sites <= (1 << n) - 1
            sp = success_probability(p, GhzResource(p.sites), f) if p.sites else 1.0
            worst = max(worst, abs(1.0 - sp))
            prob_ok += abs(1.0 - sp) <= cfg.probability_tol
        total = len(funcs)
        out.append(_exact(f"n={n} exact determinism ({total} functions)", "theorem1", total, exact_ok))
        out.append(_exact(f"n={n} site count <= {(1 << n) - 1}", "theorem1", total, size_ok))
        out.append(CheckResult(f"n={n} success probability 1", "theorem1", 0.0, worst,
                               cfg.probability_tol, prob_ok == total))
    return out


def _all_row_sets(n: int, max_rows: int):
    for m in range(0, max_rows + 1):
        for rows in itertools.combinations(range(1, 1 << n), m):
            yield Gf2Matrix(rows, n)


def _suite_and_lower_bound(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    for n in (2, 3):
        f = family("g", n)
        full = (1 << n) - 1
        feasible = [P.rows for P in _all_row_sets(n, full - 1) if decide_feasibility(f, P).feasible]
        out.append(_exact(f"g_{n} infeasible with <= {full - 1} rows", "prop1", 0, len(feasible)))
        verdict = decide_feasibility(f, Gf2Matrix(tuple(range(1, full + 1)), n))
        ok = verdict.feasible and verify_deterministic(verdict.witness, f)
        out.append(_exact(f"g_{n} feasible with {full} rows", "prop1", True, ok))
    return out


def _suite_pairwise(cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    for n in range(2, 7):
        f = family("h", n)
        proto, res = build_pairwise_and_protocol(n)
        det = verify_deterministic(proto, f, res.flip)
        sp = success_probability(proto, res, f)
        ok = det and abs(sp - 1.0) <= cfg.probability_tol
        if n <= 5:
            # statevector cross-check of every input's parity correlator
            psi = res.statevector()
            for x in range(1 << n):
                corr = parity_correlator(statevector_distribution(psi, setting_angles(proto, x)))
                ok &= abs(corr - (1 - 2 * f.table[x])) <= 1e-12
        out.append(CheckResult(f"h_{n} deterministic with {n + 1} sites", "prop2", 1.0, sp,
                               cfg.probability_tol, bool(ok)))
    for n in (2, 3):
        bad = 0
        count = 0
        row_sets = list(_all_row_sets(n, n))
        for f in all_functions(n):
            if degree(f) <= 1:
                continue
            count += 1
            bad += any(decide_feasibility(f, P).feasible for P in row_sets)
        out.append(_exact(f"{count} nonlinear n={n} functions infeasible at <= {n} sites",
                          "prop2", 0, bad))
    return out


def _suite_bounds(kind: str, ns, scope: str, cfg: SuiteConfig) -> list[CheckResult]:
    out = []
    ratios = {}
    for n in ns:
        spec = FamilySpec(kind, n)
        cf = closed_form_bounds(spec)
        beta = functional_from_game(make_family(spec), PriorDistribution.uniform(n))
        rep = quantum_bound(beta, OptimizerConfig(restarts=cfg.restarts, seed=cfg.seed))
        out.append(_exact(f"{kind}_{n} classical bound", scope, cf.c, rep.classical))
        out.append(_close(f"{kind}_{n} quantum bound", scope, cf.q, rep.quantum, cfg.optimizer_tol))
        ratios[n] = rep.quantum / float(rep.classical)
    if kind == "h":
        for n in ns:
            expected = closed_form_bounds(FamilySpec("h", n)).q / float(closed_form_bounds(FamilySpec("h", n)).c)
            out.append(_close(f"h_{n} ratio q/c", scope, expected, ratios[n], cfg.optimizer_tol * expected))
        grows = all(ratios[n + 2] > 1.99 * ratios[n] for n in ns if n + 2 in ratios)
        out.append(CheckResult("h_n ratio doubles every two parties", scope, True, grows, 0.0, grows))
    return out


def _suite_window(cfg: SuiteConfig) -> list[CheckResult]:
    inside = [n for n in range(2, 8) if appendix_c_window(n)]
    outside = [n for n in range(8, 65) if appendix_c_window(n)]
    return [
        _exact("window holds for n = 2..7", "appendixC", list(range(2, 8)), inside),
        _exact("window fails for n = 8..64", "appendixC", [], outside),
    ]


SUITES: dict[str, Callable[[SuiteConfig], list[CheckResult]]] = {
    "theorem1": _suite_totality,
    "prop1": _suite_and_lower_bound,
    "prop2": _suite_pairwise,
    "prop3": lambda cfg: _suite_bounds("g", range(3, 8), "prop3", cfg),
    "prop4": lambda cfg: _suite_bounds("h", range(2, 11), "prop4", cfg),
    "appendixC": _suite_window,
}


def verify_suite(scope: str = "all", cfg: SuiteConfig | None = None) -> list[CheckResult]:
    cfg = SuiteConfig() if cfg is None else cfg
    if scope == "all":
        scopes = sorted(SCOPES)
    elif scope in SUITES:
        scopes = [scope]
    else:
        raise ValueError(f"unknown scope {scope!r}; choose from {', '.join(SCOPES)} or all")
    results = []
    for name in scopes:
        results.extend(SUITES[name](cfg))
    return results
