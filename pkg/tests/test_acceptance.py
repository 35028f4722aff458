"""Acceptance suite: one test per criterion, every tolerance exact.

Each test prints a single PASS line on success (visible with pytest -v -s
or in the captured output), and the expected numbers are frozen here
rather than imported from the package, so the suite is an independent
check of the shipped golden data.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time

from freqmoments.arith import CONSERVATIVE12, SHARP24, SturmConfig
from freqmoments.congruence import (
    Progression,
    certify,
    certify_batch,
    certify_filtered,
    predicted_hits,
    records_to_csv,
    records_to_json,
    scan,
    scan_report_to_json,
)
from freqmoments.divisorweights import (
    DirichletCharacterSpec,
    DivisorWeight,
    sigma_from_weight_function,
)
from freqmoments.moments import (
    fermat_congruence_check,
    first_moment_identity_check,
    ford_recursion_check,
    frequency_oracle,
    j_identity_check,
    master_transform,
    moebius,
    moebius_identity_check,
    oracle_moment,
    tau_convolution_check,
)
from freqmoments.qseries import (
    CoefficientRing,
    ORDINARY,
    OVERPARTITION,
    partition_counts,
)

Z = CoefficientRing.exact_integers()


def test_criterion_1_ordinary_certification_table():
    """All 10 rows of the ordinary-partition table, exact."""
    expected = [
        # (m, ell, r, level_model, B, max_index)
        (3, 7, 0, "natural", 14, 98),
        (3, 7, 0, "safe", 98, 686),
        (3, 7, 5, "natural", 14, 103),
        (3, 7, 5, "safe", 98, 691),
        (3, 11, 0, "natural", 21, 231),
        (3, 11, 0, "safe", 231, 2541),
        (3, 11, 6, "natural", 21, 237),
        (3, 11, 6, "safe", 231, 2547),
        (7, 11, 6, "natural", 45, 501),
        (7, 11, 6, "safe", 495, 5451),
    ]
    start = time.perf_counter()
    for m, ell, r, level_model, want_b, want_max in expected:
        config = SturmConfig(SHARP24, level_model)
        rec = certify(ORDINARY, m, Progression(ell, r), ell, config)
        assert rec.status == "PASS", (m, ell, r, level_model, rec)
        assert rec.bound_b == want_b, (m, ell, r, level_model, rec.bound_b)
        assert rec.max_index_checked == want_max, (m, ell, r, level_model)
    elapsed = time.perf_counter() - start
    assert sorted({row[4] for row in expected}) == [14, 21, 45, 98, 231, 495]
    print(f"PASS criterion 1: ordinary table, 10/10 rows exact ({elapsed:.2f}s)")


def test_criterion_2_overpartition_certification_table():
    """Overpartition zero-class table in conservative12/safe mode, exact."""
    expected = [
        (5, 5, 165, 825),
        (9, 5, 285, 1425),
        (7, 7, 420, 2940),
        (13, 7, 756, 5292),
        (11, 11, 1518, 16698),
        (13, 13, 2457, 31941),
    ]
    start = time.perf_counter()
    config = SturmConfig(CONSERVATIVE12, "safe")
    for m, ell, want_b, want_range in expected:
        rec = certify(OVERPARTITION, m, Progression(ell, 0), ell, config)
        assert rec.status == "PASS", (m, ell, rec)
        assert rec.bound_b == want_b, (m, ell, rec.bound_b)
        assert rec.max_index_checked == want_range, (m, ell, rec.max_index_checked)
    elapsed = time.perf_counter() - start
    assert elapsed < 300, f"overpartition table took {elapsed:.1f}s, budget 5 min"
    print(f"PASS criterion 2: overpartition table, 6/6 rows exact ({elapsed:.2f}s)")


def test_criterion_3_filtered_propositions():
    """chi5-twisted m=3 and m=11 certify at level 100; twisted scan finds
    nothing at ell in {7, 11, 13}."""
    start = time.perf_counter()
    chi5 = DirichletCharacterSpec.kronecker(5)
    config = SturmConfig(SHARP24, "safe")

    rec3 = certify_filtered(DivisorWeight(3, chi5), 3, Progression(5, 4), 5, config)
    assert rec3.status == "PASS" and rec3.level == 100 and rec3.bound_b == 52

    rec11 = certify_filtered(DivisorWeight(11, chi5), 11, Progression(5, 4), 5, config)
    assert rec11.status == "PASS" and rec11.level == 100
    assert rec11.bound_b == (23 * 180) // 24 == 172  # formula-derived

    report = scan(ORDINARY, [3], [7, 11, 13], 2000, weight_selector=chi5)
    assert report.hit_map() == {}, report.hit_map()
    elapsed = time.perf_counter() - start
    print(
        "PASS criterion 3: filtered certifications (B=52, B=172) and empty "
        f"twisted scan at ell=7,11,13 ({elapsed:.2f}s)"
    )


def test_criterion_4_desk_scale_exhaustion():
    """Nonzero-class scan hits = closed-form predictions for odd m <= 25,
    primes ell <= 31, n_scan = 2000."""
    start = time.perf_counter()
    ms = list(range(1, 26, 2))
    ells = [5, 7, 11, 13, 17, 19, 23, 29, 31]
    report = scan(ORDINARY, ms, ells, 2000, include_r0=False)
    observed = report.triples()
    predicted = {(m, e, r) for (m, e, r) in predicted_hits(ms, ells) if r != 0}
    assert observed == predicted, (observed ^ predicted)
    classes = {(e, r) for (_m, e, r) in observed}
    assert classes == {(5, 4), (7, 5), (11, 6)}
    elapsed = time.perf_counter() - start
    print(
        f"PASS criterion 4: desk-scale exhaustion, {len(observed)} nonzero-class "
        f"hits match predictions exactly ({elapsed:.2f}s)"
    )


def test_criterion_5_overpartition_contrast():
    """Overpartition scan: no nonzero classes at all, zero classes exactly at
    m = 1 mod (ell - 1), for odd m <= 49 and ell <= 31."""
    start = time.perf_counter()
    ms = list(range(1, 50, 2))
    ells = [5, 7, 11, 13, 17, 19, 23, 29, 31]
    report = scan(OVERPARTITION, ms, ells, 2000)
    assert report.nonzero_class() == {}, report.nonzero_class()
    observed_zero = report.triples()
    expected_zero = {
        (m, ell, 0) for m in ms for ell in ells if m % (ell - 1) == 1
    }
    assert observed_zero == expected_zero, (observed_zero ^ expected_zero)
    elapsed = time.perf_counter() - start
    print(
        f"PASS criterion 5: overpartition contrast, {len(observed_zero)} zero-class "
        f"hits all Fermat classes, zero nonzero-class hits ({elapsed:.2f}s)"
    )


def test_criterion_6_oracle_equivalence():
    """Enumeration-oracle moments equal master-transform moments exactly for
    n <= 25 across six weight rules."""
    start = time.perf_counter()
    n_max = 25
    table = frequency_oracle(n_max)
    p = partition_counts(n_max, Z)
    weights = {
        "k": lambda k: k,
        "k^2": lambda k: k**2,
        "k^3": lambda k: k**3,
        "k^7": lambda k: k**7,
        "mu": moebius,
        "odd-filtered k^3": lambda k: k**3 if k % 2 else 0,
    }
    for name, f in weights.items():
        sigma = sigma_from_weight_function(f, n_max, Z)
        transform = master_transform(sigma, p)
        for n in range(n_max + 1):
            assert oracle_moment(f, n, table) == transform[n], (name, n)
    elapsed = time.perf_counter() - start
    print(f"PASS criterion 6: oracle equivalence for 6 weights to n=25 ({elapsed:.2f}s)")


def test_criterion_7_identity_suite():
    """Ford to n=500, Moebius to n=40, first moments to n=2000, Fermat
    congruences, tau*p = M11 mod 691 to n=300, j-decomposition to q^40."""
    start = time.perf_counter()
    results = [
        ford_recursion_check(500),
        moebius_identity_check(40),
        first_moment_identity_check(ORDINARY, 2000),
        first_moment_identity_check(OVERPARTITION, 2000),
        fermat_congruence_check(500),
        tau_convolution_check(300),
        j_identity_check(40),
    ]
    for result in results:
        assert result.passed, result.summary()
    elapsed = time.perf_counter() - start
    assert elapsed < 120, f"identity suite took {elapsed:.1f}s, budget 2 min"
    print(f"PASS criterion 7: identity suite, {len(results)} checks exact ({elapsed:.2f}s)")


def test_criterion_8_determinism_across_parallelism():
    """Scan and certify batches yield byte-identical reports at jobs 1 and 8."""
    start = time.perf_counter()
    ms = [1, 3, 5, 7, 9]
    ells = [5, 7, 11, 13]
    scan_payloads = {}
    for jobs in (1, 8):
        report = scan(ORDINARY, ms, ells, 500, jobs=jobs)
        scan_payloads[jobs] = scan_report_to_json(report).encode()
    assert scan_payloads[1] == scan_payloads[8]

    tasks = [
        (ORDINARY, 3, Progression(7, 5), 7, SturmConfig(SHARP24, "natural")),
        (ORDINARY, 3, Progression(7, 0), 7, SturmConfig(SHARP24, "natural")),
        (ORDINARY, 3, Progression(11, 6), 11, SturmConfig(SHARP24, "natural")),
        (ORDINARY, 7, Progression(11, 6), 11, SturmConfig(SHARP24, "natural")),
        (OVERPARTITION, 5, Progression(5, 0), 5, SturmConfig(CONSERVATIVE12, "natural")),
    ]
    cert_payloads = {}
    for jobs in (1, 8):
        records = certify_batch(tasks, jobs=jobs)
        cert_payloads[jobs] = (records_to_json(records) + records_to_csv(records)).encode()
    assert cert_payloads[1] == cert_payloads[8]

    # end to end through the CLI as well
    base = ["scan", "--ensemble", "ordinary", "--m", "1,3", "--ell", "5,7",
            "--nscan", "300", "--format", "json"]
    outputs = set()
    for jobs in ("1", "8"):
        proc = subprocess.run(
            [sys.executable, "-m", "freqmoments.cli", *base, "--jobs", jobs],
            capture_output=True,
        )
        assert proc.returncode == 0
        outputs.add(proc.stdout)
    assert len(outputs) == 1
    elapsed = time.perf_counter() - start
    print(f"PASS criterion 8: byte-identical reports at jobs 1 and 8 ({elapsed:.2f}s)")
