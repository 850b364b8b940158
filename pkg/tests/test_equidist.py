import math

import numpy as np
import pytest

from sievelab import SequenceKind, level_sweep, residue_error
from sievelab.equidist import sequence_values, window_for

import oracles

LIOU = SequenceKind("liouville")
THETA = SequenceKind("theta")
ALL_KINDS = [
    SequenceKind("theta"),
    SequenceKind("liouville"),
    SequenceKind("liouville_pair", 2),
    SequenceKind("liouville_shift_theta", 2),
    SequenceKind("theta_shift_liouville", 2),
]


def test_kind_validation():
    with pytest.raises(ValueError):
        SequenceKind("mangoldt")
    with pytest.raises(ValueError):
        SequenceKind("liouville_pair")  # h required
    with pytest.raises(ValueError):
        SequenceKind("liouville_shift_theta", 3)  # h must be even
    SequenceKind("liouville")  # no h needed


def test_windows():
    assert window_for(LIOU, 100) == (100, 200)
    assert window_for(SequenceKind("liouville_pair", 4), 100) == (100, 204)
    assert window_for(SequenceKind("theta_shift_liouville", 2), 100) == (98, 200)
    with pytest.raises(ValueError):
        window_for(SequenceKind("theta_shift_liouville", 4), 3)


def test_q1_is_plain_window_sum(table_small):
    values = sequence_values(LIOU, 100, table_small)
    assert residue_error(LIOU, 100, 1, table_small) == abs(values.sum())
    # theta at q = 1 subtracts its own total mass
    assert residue_error(THETA, 100, 1, table_small) == 0.0


@pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.tag)
@pytest.mark.parametrize("q", [1, 2, 3, 5, 8, 12, 30])
def test_matches_bruteforce(table_small, kind, q):
    got = residue_error(kind, 100, q, table_small)
    ref = oracles.residue_error_ref(kind.tag, kind.h or 0, 100, q)
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-12), (kind.tag, q)


def test_liouville_q3_small_case(table_small):
    got = residue_error(LIOU, 100, 3, table_small)
    sums = [0, 0, 0]
    for n in range(100, 200):
        sums[n % 3] += table_small.lam_of(n)
    assert got == max(abs(s) for s in sums)


def test_theta_q4_reduced_classes(table_small):
    N, q = 100, 4
    th = {n: table_small.theta(n) for n in range(N, 2 * N)}
    total = math.fsum(th.values())
    class_sums = {a: math.fsum(v for n, v in th.items() if n % q == a)
                  for a in (1, 3)}
    expected = max(abs(class_sums[a] - total / 2) for a in (1, 3))
    assert residue_error(THETA, N, q, table_small) == pytest.approx(expected, rel=1e-12)


def test_trivial_bound(table_small):
    N = 500
    for kind in ALL_KINDS:
        values = sequence_values(kind, N, table_small)
        cap = np.abs(values).max()
        assert cap <= math.log(3 * N) + 1e-12
        for q in (1, 3, 7, 20, 111):
            assert residue_error(kind, N, q, table_small) <= (N / q + 1) * cap


def test_theta_signed_error_bookkeeping(table_small):
    # signed reduced-class errors must sum to coprime mass minus the total
    N = 300
    values = sequence_values(THETA, N, table_small)
    total = float(values.sum())
    for q in (3, 4, 5):
        sums = [0.0] * q
        for i, v in enumerate(values):
            sums[(N + i) % q] += float(v)
        reduced = [a for a in range(q) if math.gcd(a, q) == 1]
        signed = math.fsum(sums[a] - total / len(reduced) for a in reduced)
        coprime_mass = math.fsum(sums[a] for a in reduced)
        assert signed == pytest.approx(coprime_mass - total, abs=1e-9)


def test_relabel_invariance(table_small):
    # shifting the class label by q changes nothing (max over classes)
    assert residue_error(LIOU, 128, 7, table_small) == residue_error(
        LIOU, 128, 7, table_small)


def test_q_above_N_warns(table_small):
    with pytest.warns(UserWarning):
        residue_error(LIOU, 50, 51, table_small)


def test_sweep_totals(table_small):
    rep50 = level_sweep(LIOU, 1000, 50, table_small)
    rep100 = level_sweep(LIOU, 1000, 100, table_small)
    assert rep100.total >= rep50.total  # non-negative summands accumulate
    assert rep50.rows[0][1] == residue_error(LIOU, 1000, 1, table_small)
    assert [q for q, _ in rep100.rows] == list(range(1, 101))
    assert rep50.normalized_total == pytest.approx(
        rep50.total * math.log(1000) ** 2 / 1000)
    assert not rep50.truncated


def test_sweep_q1_total(table_small):
    rep = level_sweep(LIOU, 1000, 1, table_small)
    assert rep.total == residue_error(LIOU, 1000, 1, table_small)


def test_sweep_matches_per_q_bruteforce(table_small):
    rep = level_sweep(LIOU, 500, 30, table_small)
    for q, e in rep.rows:
        assert e == pytest.approx(
            oracles.residue_error_ref("liouville", 0, 500, q), rel=1e-9, abs=1e-12)


def test_sweep_respects_time_budget(table_small):
    rep = level_sweep(LIOU, 1000, 1000, table_small, time_budget=0.0)
    assert rep.truncated
    assert 0 < len(rep.rows) < 1000
    assert rep.total == pytest.approx(math.fsum(e for _, e in rep.rows))


def test_sweep_rejects_Q_above_N(table_small):
    with pytest.raises(ValueError):
        level_sweep(LIOU, 100, 101, table_small)


def test_sweep_thread_invariance(table_small):
    a = level_sweep(LIOU, 1000, 40, table_small, threads=1)
    b = level_sweep(LIOU, 1000, 40, table_small, threads=4)
    assert a.rows == b.rows and a.total == b.total


def test_report_serialization(table_small):
    rep = level_sweep(SequenceKind("liouville_pair", 2), 200, 5, table_small)
    d = rep.to_dict()
    assert d["kind"] == "liouville_pair" and d["h"] == 2
    assert len(d["rows"]) == 5
    assert d["truncated"] is False
