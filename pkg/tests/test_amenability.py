import math

import numpy as np
import pytest

from fusionwalk import (
    EmptyWindow,
    ValidationError,
    Measure,
    amenability_verdict,
    fp_dimensions,
    free_group_benchmark,
    gamma_matrix,
    gamma_norm_lower,
    verify_certificate,
    weak_amenability_probe,
)
from fusionwalk.amenability import _radial_matrix
from fusionwalk.families import FamilySpec, build, classical_su2_dims, quantum_su2_dims
from fusionwalk.ring import constant_dimensions

import oracles

SQ3 = 2 * math.sqrt(3)


def su2(cutoff):
    return build(FamilySpec("su2_rep", {"cutoff": cutoff}))


def test_gamma_unit_is_one(finite_ring):
    assert gamma_norm_lower(finite_ring, finite_ring.unit).lower_bound == 1.0


def test_verlinde3_fund():
    ring = build(FamilySpec("verlinde_su2", {"level": 3}))
    cert = gamma_norm_lower(ring, "1")
    assert cert.lower_bound == pytest.approx(2 * math.cos(math.pi / 5), abs=1e-9)
    assert cert.converged


def test_norms_match_dense_oracle(finite_ring):
    d = fp_dimensions(finite_ring)
    N = oracles.ring_tensor(finite_ring)
    for s in finite_ring.basis:
        vec = np.array([1 if b == s else 0 for b in finite_ring.basis])
        cert = gamma_norm_lower(finite_ring, s)
        exact = np.linalg.norm(oracles.dense_gamma(N, vec).astype(float), 2)
        assert cert.lower_bound <= exact + 1e-12
        assert cert.lower_bound == pytest.approx(exact, abs=1e-9)
        # finite rings: fp dimensions are the norms
        assert cert.lower_bound == pytest.approx(d[s], abs=1e-9)


def test_su2_bounds_increase_to_two():
    bounds = [gamma_norm_lower(su2(c), "1").lower_bound for c in (8, 16, 32, 64, 128)]
    assert all(a <= b + 1e-12 for a, b in zip(bounds, bounds[1:]))
    assert all(b <= 2 + 1e-9 for b in bounds)
    # the complete columns sit inside the path graph on c + 1 vertices
    for c, b in zip((8, 16, 32, 64, 128), bounds):
        assert b <= 2 * math.cos(math.pi / (c + 2)) + 1e-12


def test_soundness_against_dimension_functions():
    ring = su2(60)
    for d in (classical_su2_dims(ring), quantum_su2_dims(ring, 1.3)):
        for s in ("1", "2", "5"):
            assert gamma_norm_lower(ring, s).lower_bound <= d[s] + 1e-9


def test_witness_reproduces_bound():
    ring = su2(40)
    cert = gamma_norm_lower(ring, {"1": 1, "2": 2})
    assert verify_certificate(ring, cert) == pytest.approx(cert.lower_bound, rel=1e-12)
    assert np.linalg.norm(cert.witness) == pytest.approx(1.0)
    G = gamma_matrix(ring, {"1": 1, "2": 2}).matrix.toarray().astype(float)
    cols = [ring.index(c) for c in cert.columns]
    Gp = G[:, cols]
    v = cert.witness
    assert np.linalg.norm(Gp.T @ Gp @ v) >= cert.lower_bound**2 * (1 - cert.residual) - 1e-12


def test_window_restriction_monotone():
    ring = su2(60)
    full = gamma_norm_lower(ring, "1").lower_bound
    part = gamma_norm_lower(ring, "1", window=[str(i) for i in range(20)]).lower_bound
    assert part <= full + 1e-12


def test_empty_window():
    ring = su2(4)
    with pytest.raises(EmptyWindow):
        gamma_norm_lower(ring, "1", window=["4"])


# -- verdicts ---------------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 3, 6])
def test_verlinde_fp_amenable(k):
    ring = build(FamilySpec("verlinde_su2", {"level": k}))
    v = amenability_verdict(ring, fp_dimensions(ring), "1")
    assert v.kind == "AmenableEvidence"


def test_su2_classical_amenable():
    v = amenability_verdict(FamilySpec("su2_rep", {"cutoff": 64}), classical_su2_dims, "1")
    assert v.kind == "AmenableEvidence"
    assert v.lower_bound >= 2 - 1e-3


def test_su2_quantum_nonamenable():
    q = 1.5
    v = amenability_verdict(FamilySpec("su2_rep", {"cutoff": 64}), lambda r: quantum_su2_dims(r, q), "1")
    assert v.kind == "NonamenableCertificate"
    assert v.gap == pytest.approx(q + 1 / q - 2, abs=2e-3)
    assert len(v.history) >= 2


def test_schedule_inconclusive_when_short():
    v = amenability_verdict(FamilySpec("su2_rep", {"cutoff": 8}),
                            lambda r: quantum_su2_dims(r, 1.5), "1", window_schedule=[8])
    assert v.kind == "Inconclusive"
    assert v.warnings


def test_bad_dimension_function_rejected():
    ring = su2(20)
    with pytest.raises(ValidationError):
        amenability_verdict(ring, constant_dimensions(ring), "1")


# -- free groups -----------------------------------------------------------------------


def test_radial_equals_ball():
    for radius in (4, 5, 6):
        ball = free_group_benchmark(2, radius, method="ball").lower_bound
        radial = free_group_benchmark(2, radius, method="radial").lower_bound
        assert radial == pytest.approx(ball, abs=1e-9)


def test_radial_matrix_against_dense_norm():
    ring = build(FamilySpec("free_group", {"rank": 2, "radius": 5}))
    op = gamma_matrix(ring, {g: 1 for g in "aAbB"})
    mat, _ = op.truncated()
    exact = np.linalg.norm(mat.toarray().astype(float), 2)
    assert np.linalg.norm(_radial_matrix(2, 5).toarray(), 2) == pytest.approx(exact, abs=1e-10)


def test_free_group_bounds_below_kesten():
    bounds = [free_group_benchmark(2, r, method="radial").lower_bound for r in (10, 20, 40, 80)]
    assert all(b < SQ3 for b in bounds)
    assert all(a < b for a, b in zip(bounds, bounds[1:]))
    assert bounds[-1] > 3.45
    assert 4 - bounds[-1] == pytest.approx(4 - SQ3, abs=0.02)


def test_rank_one_tends_to_two():
    b = free_group_benchmark(1, 200, method="radial").lower_bound
    assert 2 - 1e-3 < b <= 2


def test_benchmark_radius_check():
    with pytest.raises(ValueError):
        free_group_benchmark(2, 3)


# -- weak amenability probe ----------------------------------------------------------------


def test_probe_finite_ring_decays():
    ring = build(FamilySpec("verlinde_su2", {"level": 4}))
    rows = weak_amenability_probe(ring, fp_dimensions(ring), Measure({"0": 0.5, "1": 0.5}),
                                  [10, 100, 1000], generators=["1"])
    assert rows[-1]["abs_diff"] < 0.1 * rows[0]["abs_diff"]
    assert rows[-1]["rel_diff"] < 0.05


def test_probe_integers_decay():
    ring = build(FamilySpec("integer_lattice", {"rank": 1, "window": 300}))
    rows = weak_amenability_probe(ring, constant_dimensions(ring), Measure({"1": 0.5, "-1": 0.5}),
                                  [10, 50, 250], generators=["1"])
    rel = [r["rel_diff"] for r in rows]
    assert rel[0] > rel[1] > rel[2]
    assert rel[2] < 0.1


def test_probe_free_group_stays_away_from_zero():
    ring = build(FamilySpec("free_group", {"rank": 2, "radius": 9}))
    rows = weak_amenability_probe(ring, constant_dimensions(ring), Measure({g: 0.25 for g in "aAbB"}),
                                  [2, 4, 6, 8], generators=["a"])
    assert all(r["rel_diff"] > 0.6 for r in rows)
