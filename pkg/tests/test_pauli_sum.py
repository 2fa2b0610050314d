import math

import pytest

from pauliprop import PathCoefficient, PauliSum, TruncationConfig, norms, scalar_product, truncate
from pauliprop.pauli_bits import encode, from_symbols

ZI, YI, XZ, XI = (from_symbols(s)[0] for s in ("ZI", "YI", "XZ", "XI"))


def test_add_and_cancel():
    s = PauliSum(2)
    s.add(ZI, 0.5)
    assert s.values() == {ZI: 0.5}
    s.add(ZI, -0.5)
    assert len(s) == 0 and ZI not in s
    s = PauliSum(2, {ZI: 0.96})
    s.add(YI, 0.21)
    assert s.values() == {ZI: 0.96, YI: 0.21}


def test_get_coeff():
    s = PauliSum(2, {ZI: 0.96})
    assert s.get_coeff(ZI) == 0.96
    assert s.get_coeff(XZ) == 0


def test_scalar_product_and_norms():
    assert scalar_product(PauliSum(2, {ZI: 0.5}), PauliSum(2, {ZI: 2.0})) == 1.0
    assert scalar_product(PauliSum(2, {ZI: 0.5}), PauliSum(2, {XI: 2.0})) == 0.0
    c, s_ = math.cos(0.3), math.sin(0.3)
    example = PauliSum(2, {ZI: c, YI: s_ * math.cos(0.8), XZ: -s_ * math.sin(0.8)})
    l1, l2sq, n = norms(example)
    assert n == 3 and l2sq == pytest.approx(1.0, abs=1e-15)
    assert scalar_product(example, example) == pytest.approx(l2sq)
    assert l1 == pytest.approx(c + s_ * (math.cos(0.8) + math.sin(0.8)))
    # display-rounded coefficients
    l1, l2sq, _ = norms(PauliSum(2, {ZI: 0.96, YI: 0.21, XZ: -0.21}))
    assert l1 == pytest.approx(1.38) and l2sq == pytest.approx(1.0098)
    assert norms(PauliSum(2)) == (0, 0, 0)


def test_truncate_threshold():
    s = PauliSum(2, {ZI: 0.96, YI: 0.005})
    kept, l1, l2sq = truncate(s, TruncationConfig(min_abs_coeff=0.01))
    assert kept.values() == {ZI: 0.96}
    assert l1 == pytest.approx(0.005) and l2sq == pytest.approx(2.5e-5)
    assert len(s) == 2  # not in place by default


def test_truncate_weight():
    n = 5
    zall = encode(n, [(i, "Z") for i in range(1, n + 1)])
    z1 = encode(n, [(1, "Z")])
    kept, l1, l2sq = truncate(PauliSum(n, {zall: 1.0, z1: 1.0}),
                              TruncationConfig(min_abs_coeff=0, max_weight=2))
    assert kept.values() == {z1: 1.0} and l1 == 1 and l2sq == 1


def test_truncate_custom_and_tracked():
    s = PauliSum(2, {ZI: PathCoefficient(0.5, ncos=1, nsin=2), YI: PathCoefficient(0.5, nsin=0)})
    kept, _, _ = truncate(s, TruncationConfig(min_abs_coeff=0, max_sins=1))
    assert list(kept.terms) == [YI]
    kept, _, _ = truncate(s, TruncationConfig(min_abs_coeff=0, custom=lambda w, c: w == ZI))
    assert list(kept.terms) == [YI]


def test_config_validation():
    with pytest.raises(ValueError):
        TruncationConfig(min_abs_coeff=-1)
    with pytest.raises(ValueError):
        TruncationConfig(max_weight=-2)
    assert TruncationConfig(max_freq=3).needs_tracking
    assert not TruncationConfig(max_weight=3).needs_tracking


def test_path_coefficient():
    a = PathCoefficient(0.3, ncos=2, nsin=1, pathweight=4)
    assert a.freq == 3 and float(a) == 0.3 and abs(PathCoefficient(-0.2)) == 0.2
    b = a.scaled(2.0)
    assert float(b) == 0.6 and b.nsin == 1
    m = a.merge(PathCoefficient(0.1, ncos=0, nsin=0))
    assert float(m) == pytest.approx(0.4) and m.freq == 0


def test_serialization_round_trip():
    s = PauliSum(3, {27: 0.1 + 1e-17, 5: -1 / 3, 0: 2.0})
    assert PauliSum.from_text(s.to_text()) == s
    assert PauliSum.from_json(s.to_json()) == s
    assert PauliSum.from_dict(s.to_dict()).values() == s.values()


def test_size_mismatch():
    with pytest.raises(ValueError):
        scalar_product(PauliSum(2), PauliSum(3))
    with pytest.raises(ValueError):
        PauliSum(2).add(4 ** 2, 1.0)
