import numpy as np

from qpot import checks as C
from qpot import model as M


def test_involution_suite_passes(em):
    assert C.all_ok(C.involution_suite(em, n=200))


def test_inequality_suite_small_grid(asep):
    res = C.inequality_suite(asep, C.default_specs(asep), n=40)
    assert C.all_ok(res), [r.line() for r in res if not r.ok]


def test_default_specs_phases(em):
    assert [s.phase for s in C.default_specs(em)] == ["LD", "HD", "COEX"]


def test_equality_match_flags_mismatch():
    gap = np.array([0.0, 1e-3, 0.0])
    pred = np.array([True, True, False])
    r = C._equality_match("x", gap, pred, 1e-9)
    assert not r.ok and "2 of 3" in r.detail


def test_field_corpus_kinds(asep):
    corpus = C.field_corpus(asep, np.random.default_rng(0), size=8, n_cells=16, horizon=0.1)
    assert [k for k, _, _ in corpus[:4]] == ["entropy", "reversed", "noisy", "steps"]
    assert all(f.frames.min() >= -1e-12 and f.frames.max() <= 1 + 1e-12 for _, f, _ in corpus)
