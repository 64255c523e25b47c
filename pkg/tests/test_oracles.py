import numpy as np
import pytest

from qpot import model as M
from qpot.fields import cell_centers, rh_violations
from qpot.oracles import B_CASES, C_CASES, CaseError, appendix_oracle, find_case, particle_hole_symmetric


@pytest.mark.parametrize("cid,pair,rho", [("B.a", (0.2, 0.6), 0.1), ("B.b", (0.2, 0.6), 0.3),
                                          ("C.1.1", (0.4, 0.2), 0.7), ("C.2.2", (0.8, 0.2), 0.3)])
def test_oracle_is_consistent(asep, cid, pair, rho):
    d = appendix_oracle(asep, cid, rho, M.make_spec(asep, *pair))
    assert rh_violations(d) < 1e-6
    x = cell_centers(50)
    assert np.allclose(d(0.0, x), rho)
    assert d.tau is None or d.tau > 0


def test_case_preconditions_enforced(asep):
    with pytest.raises(CaseError):
        appendix_oracle(asep, "B.a", 0.5, M.make_spec(asep, 0.2, 0.6))


def test_find_case(asep):
    assert find_case(asep, 0.3, M.make_spec(asep, 0.2, 0.6)).name == "B.b"
    d = find_case(asep, 0.5, M.make_spec(asep, 0.4, 0.8))
    assert d is not None and d.name.startswith("mirror")
    assert d(0.0, np.array([0.5]))[0] == pytest.approx(0.5)


def test_mirror_needs_symmetry(cubic):
    assert particle_hole_symmetric(M.asep())
    assert not particle_hole_symmetric(cubic)


def test_case_lists():
    assert len(B_CASES) == 10 and len(C_CASES) == 8
