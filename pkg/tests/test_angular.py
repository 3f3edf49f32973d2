import pytest

from magictrap.angular import wigner_6j

sympy_wigner = pytest.importorskip("sympy.physics.wigner")


CASES = [
    (1, 1, 1, 1, 0, 1), (1, 1, 1, 1, 1, 1), (1, 1, 1, 1, 2, 1),
    (1, 2, 1, 1, 0, 1), (1, 2, 1, 1, 1, 1), (1, 2, 1, 1, 2, 1),
    (1, 1, 1, 0.5, 0.5, 0.5), (1, 2, 1, 1.5, 0.5, 1.5),
    (1, 1, 0, 1, 1, 2), (2, 2, 2, 2, 2, 2), (1, 2, 1, 0.5, 1.5, 0.5),
    (0.5, 0.5, 1, 0.5, 0.5, 1), (1, 1, 2, 1, 1, 2), (2, 1, 1, 1, 2, 2),
]


@pytest.mark.parametrize("args", CASES)
def test_matches_sympy(args):
    from sympy import Rational
    try:
        ref = float(sympy_wigner.wigner_6j(*[Rational(round(2 * a), 2) for a in args]))
    except ValueError:
        ref = 0.0
    assert wigner_6j(*args) == pytest.approx(ref, abs=1e-14)


def test_triangle_violation_gives_zero():
    assert wigner_6j(1, 1, 3, 1, 1, 1) == 0.0
    assert wigner_6j(1, 2, 1, 1, 5, 1) == 0.0


def test_rejects_negative_and_non_half_integer():
    with pytest.raises(ValueError):
        wigner_6j(1, 1, 1, 1, 0.3, 1)
    with pytest.raises(ValueError):
        wigner_6j(-1, 1, 1, 1, 1, 1)
