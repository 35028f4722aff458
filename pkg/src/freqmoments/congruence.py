"""Progression projection, heuristic congruence scanning, and Sturm-bound
certification.

The pipeline is scan-then-certify: a cheap pass over the moment series up
to n_scan filters candidate progressions M(ell*n + r) = 0 (mod ell), and
survivors are proven by checking every projected coefficient up to the
half-integral Sturm bound.  A PASS record together with the bound is a
proof for all n; a FAIL record carries the first counterexample and
refutes the congruence outright.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import lcm

import numpy as np

from .arith import SturmConfig, is_prime, sturm_bound, sturm_bound_for_level
from .divisorweights import (
    DirichletCharacterSpec,
    DivisorWeight,
    GlaisherFilter,
    filter_modular_data,
    weighted_sigma_table,
)
from .moments import MomentSeries, fermat_reduce, master_transform
from .qseries import CoefficientRing, Ensemble, Series, companion_series, ORDINARY

__all__ = [
    "CertificationRecord",
    "DEFAULT_COEFF_BUDGET",
    "Progression",
    "ResourceLimitError",
    "ScanReport",
    "certify",
    "certify_batch",
    "certify_filtered",
    "predicted_hits",
    "project",
    "records_to_csv",
    "records_to_json",
    "records_to_text",
    "scan",
    "scan_report_to_csv",
    "scan_report_to_json",
    "scan_report_to_text",
]

DEFAULT_COEFF_BUDGET = 1 << 25


class ResourceLimitError(RuntimeError):
    """A requested series would exceed the configured coefficient budget."""


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression ell*n + r for a prime ell."""

    ell: int
    r: int

    def __post_init__(self) -> None:
        if not is_prime(self.ell):
            raise ValueError(f"ell={self.ell} must be prime")
        if not 0 <= self.r < self.ell:
            raise ValueError(f"residue r={self.r} out of range for ell={self.ell}")


def project(moments: MomentSeries, prog: Progression) -> Series:
    """The subsequence M(ell*n + r) for 0 <= n <= floor((N - r)/ell).

    Residues r >= ell are rejected by Progression itself.
    """
    if moments.n_max < prog.r:
        raise ValueError("series too short to contain the residue class")
    return Series(moments.ring, moments.values.coeffs[prog.r :: prog.ell])


@dataclass(frozen=True)
class CertificationRecord:
    """One certification outcome, mirroring the published table rows."""

    ensemble: str
    weight: str
    m: int
    ell: int
    r: int
    modulus: int
    mode: str
    level_model: str
    level: int  # the full 4L
    bound_b: int
    max_index_checked: int
    status: str  # "PASS" or "FAIL"
    fail_witness: tuple[int, int, int] | None = None  # (n, t, residue)

    def to_json_dict(self) -> dict:
        witness = None
        if self.fail_witness is not None:
            n, t, residue = self.fail_witness
            witness = {"n": n, "t": t, "residue": residue}
        return {
            "ensemble": self.ensemble,
            "weight": self.weight,
            "m": self.m,
            "ell": self.ell,
            "r": self.r,
            "modulus": self.modulus,
            "mode": self.mode,
            "level": self.level,
            "bound_B": self.bound_b,
            "max_index_checked": self.max_index_checked,
            "status": self.status,
            "fail_witness": witness,
        }

    def csv_row(self) -> str:
        return ",".join(
            str(v)
            for v in (
                self.m,
                self.ell,
                self.r,
                self.modulus,
                self.level // 4,
                self.level_model,
                self.bound_b,
                self.max_index_checked,
                self.status,
            )
        )


CSV_HEADER = "m,ell,r,prime,L,model,sturm_B,max_index,status"


def _projected_moment_values(
    sigma: Series, comp: Series, ell: int, r: int, count: int
) -> list[int]:
    """M(ell*n + r) mod modulus for n = 0..count-1, evaluated only at the
    projected indices (one integer dot product each)."""
    modulus = sigma.ring.modulus
    assert modulus is not None
    n_max = sigma.n_max
    if (modulus - 1) ** 2 * (n_max + 1) >= 2**62:
        # exact big-int fallback for moduli too large for int64 dots
        out = []
        for n in range(count):
            t = ell * n + r
            total = sum(sigma.coeffs[d] * comp.coeffs[t - d] for d in range(1, t + 1))
            out.append(total % modulus)
        return out
    sig = np.array(sigma.coeffs, dtype=np.int64)
    rev = np.array(comp.coeffs[::-1], dtype=np.int64)
    out = []
    for n in range(count):
        t = ell * n + r
        # sum_{d=0..t} sigma(d) comp(t-d); sigma(0) = 0 keeps this the transform
        value = int(np.dot(sig[: t + 1], rev[n_max - t :])) % modulus
        out.append(value)
    return out


def _certification_inputs(
    ensemble: Ensemble,
    m: int,
    weight: DivisorWeight | None,
    n_max: int,
    modulus: int,
    max_coeffs: int,
) -> tuple[Series, Series, str]:
    if n_max + 1 > max_coeffs:
        raise ResourceLimitError(
            f"certification needs {n_max + 1} coefficients, over the budget of {max_coeffs}"
        )
    ring = CoefficientRing.integers_mod(modulus)
    if weight is None:
        weight = DivisorWeight(m, ensemble.exponents)
    sigma = weighted_sigma_table(weight, n_max, ring)
    comp = companion_series(ensemble, n_max, ring)
    return sigma, comp, weight.describe()


def _finish_certification(
    sigma: Series,
    comp: Series,
    ensemble_name: str,
    weight_desc: str,
    m: int,
    prog: Progression,
    modulus: int,
    mode: str,
    level_model: str,
    level4: int,
    bound: int,
) -> CertificationRecord:
    values = _projected_moment_values(sigma, comp, prog.ell, prog.r, bound + 1)
    for n, value in enumerate(values):
        if value != 0:
            t = prog.ell * n + prog.r
            return CertificationRecord(
                ensemble_name, weight_desc, m, prog.ell, prog.r, modulus,
                mode, level_model, level4, bound,
                max_index_checked=t, status="FAIL", fail_witness=(n, t, value),
            )
    return CertificationRecord(
        ensemble_name, weight_desc, m, prog.ell, prog.r, modulus,
        mode, level_model, level4, bound,
        max_index_checked=prog.ell * bound + prog.r, status="PASS",
    )


def certify(
    ensemble: Ensemble,
    m: int,
    prog: Progression,
    modulus: int,
    config: SturmConfig,
    *,
    weight: DivisorWeight | None = None,
    max_coeffs: int = DEFAULT_COEFF_BUDGET,
) -> CertificationRecord:
    """Check M(ell*n + r) = 0 (mod modulus) for 0 <= n <= B, where B is the
    Sturm bound the config resolves.  A PASS proves the congruence for all
    n >= 0; a FAIL refutes it with the first bad coefficient."""
    if m < 1 or m % 2 == 0:
        raise ValueError("m must be odd and >= 1")
    if not is_prime(modulus):
        raise ValueError("modulus must be prime")
    bound = sturm_bound(m, config, prog.ell)
    n_max = prog.ell * bound + prog.r
    sigma, comp, weight_desc = _certification_inputs(
        ensemble, m, weight, n_max, modulus, max_coeffs
    )
    level4 = 4 * config.resolve_level(prog.ell)
    return _finish_certification(
        sigma, comp, ensemble.name, weight_desc, m, prog, modulus,
        config.mode, config.level_model, level4, bound,
    )


def filtered_safe_level(ell: int, conductor: int, level_model: str) -> int:
    """Level parameter L for a twisted certification: lcm(ell, conductor),
    squared in the safe model.  Generalizes the single published instance
    4 * 5^2 where conductor = ell = 5."""
    base = lcm(ell, conductor)
    return base * base if level_model == "safe" else base


def certify_filtered(
    weight: DivisorWeight,
    m: int,
    prog: Progression,
    modulus: int,
    config: SturmConfig,
    *,
    ensemble: Ensemble = ORDINARY,
    max_coeffs: int = DEFAULT_COEFF_BUDGET,
) -> CertificationRecord:
    """Certification for a character-twisted or filtered weight.

    The level is derived from the twist: L = lcm(ell, conductor) in the
    natural model and its square in the safe model; a custom level is used
    as given.  The record stores the level so the rule is auditable.
    """
    if not isinstance(weight.selector, (DirichletCharacterSpec, GlaisherFilter)):
        raise ValueError("filtered certification needs a character or filter weight")
    if m < 1 or m % 2 == 0:
        raise ValueError("m must be odd and >= 1")
    if not is_prime(modulus):
        raise ValueError("modulus must be prime")
    if weight.exponent != m:
        raise ValueError("weight exponent disagrees with m")
    if config.level_model == "custom":
        assert config.custom_level is not None
        level = config.custom_level
    else:
        if isinstance(weight.selector, DirichletCharacterSpec):
            conductor = weight.selector.level_factor
        else:
            conductor = filter_modular_data(weight.selector, m).level // 4
        level = filtered_safe_level(prog.ell, conductor, config.level_model)
    bound = sturm_bound_for_level(m, config.mode, level)
    n_max = prog.ell * bound + prog.r
    sigma, comp, weight_desc = _certification_inputs(
        ensemble, m, weight, n_max, modulus, max_coeffs
    )
    return _finish_certification(
        sigma, comp, ensemble.name, weight_desc, m, prog, modulus,
        config.mode, config.level_model, 4 * level, bound,
    )


# ---------------------------------------------------------------------------
# Scanning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanReport:
    """Discovered progressions grouped by (ell, r) -> sorted list of m."""

    ensemble: str
    weight_family: str
    ms: tuple[int, ...]
    ells: tuple[int, ...]
    n_scan: int
    include_r0: bool
    hits: tuple[tuple[tuple[int, int], tuple[int, ...]], ...]

    def hit_map(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return dict(self.hits)

    def zero_class(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return {key: ms for key, ms in self.hits if key[1] == 0}

    def nonzero_class(self) -> dict[tuple[int, int], tuple[int, ...]]:
        return {key: ms for key, ms in self.hits if key[1] != 0}

    def triples(self) -> frozenset[tuple[int, int, int]]:
        """All (m, ell, r) hit triples, for diffing against predictions."""
        return frozenset(
            (m, ell, r) for (ell, r), ms in self.hits for m in ms
        )


def _scan_task(args) -> tuple[int, int, tuple[int, ...]]:
    ensemble, weight_selector, m, ell, n_scan, include_r0 = args
    ring = CoefficientRing.integers_mod(ell)
    if weight_selector is None:
        weight = DivisorWeight(m, ensemble.exponents)
    else:
        weight = DivisorWeight(m, weight_selector)
    sigma = weighted_sigma_table(weight, n_scan, ring)
    comp = companion_series(ensemble, n_scan, ring)
    values = master_transform(sigma, comp).values
    good: list[int] = []
    start = 0 if include_r0 else 1
    for r in range(start, ell):
        first = r if r else ell
        if all(values[t] == 0 for t in range(first, n_scan + 1, ell)):
            good.append(r)
    return m, ell, tuple(good)


def scan(
    ensemble: Ensemble,
    ms,
    ells,
    n_scan: int = 2000,
    *,
    include_r0: bool = True,
    weight_selector: DirichletCharacterSpec | GlaisherFilter | None = None,
    jobs: int = 1,
) -> ScanReport:
    """For each odd m and prime ell, record every residue class r whose
    projected moment entries all vanish mod ell up to n_scan.

    weight_selector switches the divisor weights from the ensemble's
    canonical c(d) * d^m to a twisted or filtered rule.  Results are merged
    in sorted order, so any parallelism degree gives identical reports.
    """
    ms = tuple(sorted(set(ms)))
    ells = tuple(sorted(set(ells)))
    if not ms or not ells:
        raise ValueError("need at least one m and one ell")
    if any(m < 1 or m % 2 == 0 for m in ms):
        raise ValueError("scan weights must be odd m >= 1")
    if any(not is_prime(ell) for ell in ells):
        raise ValueError("scan moduli must be prime")
    if n_scan < max(ells):
        raise ValueError("n_scan must be at least the largest prime scanned")
    tasks = [(ensemble, weight_selector, m, ell, n_scan, include_r0) for m in ms for ell in ells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_task, tasks))
    else:
        results = [_scan_task(t) for t in tasks]
    grouped: dict[tuple[int, int], list[int]] = {}
    for m, ell, residues in results:
        for r in residues:
            grouped.setdefault((ell, r), []).append(m)
    hits = tuple(
        (key, tuple(sorted(grouped[key]))) for key in sorted(grouped)
    )
    if weight_selector is None:
        family = "canonical"
    elif isinstance(weight_selector, DirichletCharacterSpec):
        family = f"chi={weight_selector.describe()}"
    else:
        family = f"filter={weight_selector.describe()}"
    return ScanReport(ensemble.name, family, ms, ells, n_scan, include_r0, hits)


def certify_batch(tasks, *, jobs: int = 1) -> list[CertificationRecord]:
    """Run a list of certification task tuples, optionally in parallel.

    Each task is (ensemble, m, prog, modulus, config) or the same with a
    weight appended.  Results come back in task order regardless of jobs.
    """
    normalized = []
    for task in tasks:
        if len(task) == 5:
            ensemble, m, prog, modulus, config = task
            weight = None
        else:
            ensemble, m, prog, modulus, config, weight = task
        normalized.append((ensemble, m, prog, modulus, config, weight))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_certify_task, normalized))
    return [_certify_task(t) for t in normalized]


def _certify_task(task) -> CertificationRecord:
    ensemble, m, prog, modulus, config, weight = task
    if weight is not None and isinstance(
        weight.selector, (DirichletCharacterSpec, GlaisherFilter)
    ):
        return certify_filtered(weight, m, prog, modulus, config, ensemble=ensemble)
    return certify(ensemble, m, prog, modulus, config, weight=weight)


# ---------------------------------------------------------------------------
# Closed-form predictions
# ---------------------------------------------------------------------------

_RAMANUJAN_CLASSES = {5: 4, 7: 5, 11: 6}
_BASE_CASES = {
    3: ((7, 0), (7, 5), (11, 0), (11, 6)),
    7: ((11, 6),),
}


def predicted_hits(ms, ells) -> frozenset[tuple[int, int, int]]:
    """The closed-form prediction for ordinary-partition progressions:

    (a) r = 0 whenever m = 1 (mod ell - 1);
    (b) the Ramanujan classes (5,4), (7,5), (11,6) whenever m = 1 (mod ell-1);
    (c) the base congruences at reduced exponent 3 (ell in {7, 11}, both the
        zero class and the Ramanujan class) and 7 (ell = 11, class 6),
        lifted to every m with the same Fermat reduction.
    """
    out: set[tuple[int, int, int]] = set()
    for ell in ells:
        if not is_prime(ell) or ell < 5:
            raise ValueError("predictions need primes >= 5")
        for m in ms:
            if m % 2 == 0 or m < 1:
                raise ValueError("predictions need odd m >= 1")
            mbar = fermat_reduce(m, ell)
            if mbar == 1:
                out.add((m, ell, 0))
                if ell in _RAMANUJAN_CLASSES:
                    out.add((m, ell, _RAMANUJAN_CLASSES[ell]))
            for ell_base, r in _BASE_CASES.get(mbar, ()):
                if ell_base == ell:
                    out.add((m, ell, r))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def records_to_json(records) -> str:
    payload = [rec.to_json_dict() for rec in records]
    return json.dumps(payload, indent=2) + "\n"


def records_to_csv(records) -> str:
    lines = [CSV_HEADER]
    lines.extend(rec.csv_row() for rec in records)
    return "\n".join(lines) + "\n"


def records_to_text(records) -> str:
    lines = []
    for rec in records:
        head = (
            f"(m={rec.m}, ell={rec.ell}, r={rec.r}) mod {rec.modulus} "
            f"[{rec.mode}/{rec.level_model}, level {rec.level}]: "
            f"B={rec.bound_b}, max index {rec.max_index_checked}: {rec.status}"
        )
        if rec.fail_witness is not None:
            n, t, residue = rec.fail_witness
            head += f" (n={n}, t={t}, residue={residue})"
        lines.append(head)
    return "\n".join(lines) + "\n"


def scan_report_to_json(report: ScanReport) -> str:
    payload = {
        "ensemble": report.ensemble,
        "weight_family": report.weight_family,
        "parameters": {
            "m": list(report.ms),
            "ell": list(report.ells),
            "n_scan": report.n_scan,
            "include_r0": report.include_r0,
        },
        "zero_classes": [
            {"ell": ell, "r": r, "m": list(ms)}
            for (ell, r), ms in report.hits
            if r == 0
        ],
        "nonzero_classes": [
            {"ell": ell, "r": r, "m": list(ms)}
            for (ell, r), ms in report.hits
            if r != 0
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def scan_report_to_csv(report: ScanReport) -> str:
    lines = ["ensemble,m,ell,r,class"]
    for (ell, r), ms in report.hits:
        klass = "zero" if r == 0 else "nonzero"
        for m in ms:
            lines.append(f"{report.ensemble},{m},{ell},{r},{klass}")
    return "\n".join(lines) + "\n"


def scan_report_to_text(report: ScanReport) -> str:
    lines = [
        f"scan: ensemble={report.ensemble} weights={report.weight_family} "
        f"m={list(report.ms)} ell={list(report.ells)} n_scan={report.n_scan}",
        "",
        "=== r = 0 classes ===",
    ]
    zero = report.zero_class()
    if not zero:
        lines.append("(none)")
    else:
        for (ell, r), ms in sorted(zero.items()):
            lines.append(f"(ell,r)=({ell},{r}): m = {list(ms)}")
    lines.extend(["", "=== 1 <= r < ell classes ==="])
    nonzero = report.nonzero_class()
    if not nonzero:
        lines.append("(none)")
    else:
        for (ell, r), ms in sorted(nonzero.items()):
            lines.append(f"(ell,r)=({ell},{r}): m = {list(ms)}")
    return "\n".join(lines) + "\n"
