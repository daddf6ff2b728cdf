import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import RefField
from rackcodes import gf
from rackcodes.errors import ParameterError

FIELDS = [gf.prime_field(13), gf.prime_field(29), gf.prime_field(257), gf.binary_field(4), gf.binary_field(8)]


def ref_of(F):
    if F.spec.kind == "prime":
        return RefField(F.order)
    return RefField(F.order, F.spec.polynomial)


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_multiplication_table_matches_reference(F):
    ref = ref_of(F)
    rng = np.random.default_rng(0)
    a = rng.integers(0, F.order, 300)
    b = rng.integers(0, F.order, 300)
    got = F.mul(a, b)
    assert [int(x) for x in got] == [ref.mul(int(x), int(y)) for x, y in zip(a, b)]


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_inverse_and_division(F):
    a = np.arange(1, F.order)
    assert np.all(F.mul(a, F.inv(a)) == 1)
    assert np.all(F.div(a, a) == 1)
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


@pytest.mark.parametrize("F", FIELDS, ids=str)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms(F, data):
    el = st.integers(0, F.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a
    assert F.add(a, F.neg(a)) == 0


@pytest.mark.parametrize("F", FIELDS, ids=str)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_pow_matches_repeated_multiplication(F, data):
    a = data.draw(st.integers(1, F.order - 1))
    e = data.draw(st.integers(-20, 40))
    ref = ref_of(F)
    expect = ref.pow(a, e) if e >= 0 else ref.inv(ref.pow(a, -e))
    assert int(F.pow(a, e)) == expect


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_matmul_matches_reference(F):
    rng = np.random.default_rng(1)
    A = rng.integers(0, F.order, (5, 7))
    B = rng.integers(0, F.order, (7, 3))
    assert F.matmul(A, B).tolist() == ref_of(F).matmul(A.tolist(), B.tolist())


def test_prime_matmul_blocked_accumulation_is_exact():
    F = gf.prime_field(2**31 - 1)
    rng = np.random.default_rng(2)
    A = rng.integers(0, F.order, (3, 9))
    B = rng.integers(0, F.order, (9, 2))
    expect = [[sum(int(A[i, t]) * int(B[t, j]) for t in range(9)) % F.order for j in range(2)] for i in range(3)]
    assert F.matmul(A, B).tolist() == expect


@pytest.mark.parametrize("F", FIELDS, ids=str)
def test_primitive_has_full_order_and_is_smallest(F):
    xi = F.primitive
    assert gf.element_order(F, xi) == F.order - 1
    assert all(gf.element_order(F, g) < F.order - 1 for g in range(1, xi))


def test_known_primitives():
    assert gf.prime_field(13).primitive == 2
    assert gf.prime_field(29).primitive == 2
    assert gf.binary_field(8).primitive == 2
    assert gf.binary_field(1).primitive == 1


@pytest.mark.parametrize("F,u", [(gf.prime_field(13), 4), (gf.prime_field(31), 5), (gf.binary_field(8), 5),
                                 (gf.binary_field(8), 17), (gf.prime_field(29), 7)])
def test_unity_root_and_character_sum(F, u):
    eta = gf.unity_root(F, u)
    assert gf.element_order(F, eta) == u
    for x in range(-2 * u, 2 * u + 1):
        expect = F.embed(u) if x % u == 0 else 0
        assert gf.char_sum(F, u, x) == expect


def test_unity_root_rejects_non_divisor():
    with pytest.raises(ParameterError) as exc:
        gf.unity_root(gf.prime_field(13), 5)
    assert exc.value.constraint == "u | q-1"


def test_field_spec_parse_and_string_round_trip():
    for text in ["prime:29", "gf2:8:0x11d", "gf2:4:0x13"]:
        assert str(gf.FieldSpec.parse(text)) == text
    assert gf.FieldSpec.parse("gf2:8") == gf.FieldSpec.binary(8, 0x11D)
    with pytest.raises(ParameterError):
        gf.FieldSpec.parse("banana")


def test_rejects_bad_fields():
    with pytest.raises(ParameterError):
        gf.prime_field(15)
    with pytest.raises(ParameterError):
        gf.binary_field(8, 0x100)  # x^8 is reducible
    with pytest.raises(ParameterError):
        gf.binary_field(17)


@pytest.mark.parametrize("m", range(1, 17))
def test_default_polynomials_are_irreducible(m):
    assert gf.is_irreducible_gf2(gf.DEFAULT_POLYNOMIALS[m])


def test_irreducibility_check_small_cases():
    # x^2+x+1 irreducible; x^2+1 = (x+1)^2; x^4+x^3+x^2+x+1 irreducible but not primitive
    assert gf.is_irreducible_gf2(0b111)
    assert not gf.is_irreducible_gf2(0b101)
    assert gf.is_irreducible_gf2(0b11111)


def test_asarray_range_check():
    F = gf.prime_field(13)
    with pytest.raises(ValueError):
        F.asarray([0, 13])
    with pytest.raises(ValueError):
        F.asarray([-1])


def test_symbol_widths():
    assert gf.binary_field(8).symbol_bytes == 1 and gf.binary_field(8).data_bits == 8
    assert gf.prime_field(17).symbol_bytes == 1 and gf.prime_field(17).data_bits == 4
    assert gf.prime_field(257).symbol_bytes == 2 and gf.prime_field(257).data_bits == 8
    assert gf.binary_field(16).symbol_bytes == 2


@pytest.mark.parametrize("n,u,expect", [(30, 5, "gf2:8:0x11d"), (16, 4, "prime:17"), (150, 5, "gf2:8:0x11d"),
                                        (300, 5, "prime:311"), (16, 2, "prime:17")])
def test_default_field(n, u, expect):
    F = gf.default_field(n, u)
    assert str(F.spec) == expect
    gf.check_code_field(F, n, u)


def test_check_code_field_constraints():
    with pytest.raises(ParameterError, match="exceed"):
        gf.check_code_field(gf.prime_field(13), 16, 4)
    with pytest.raises(ParameterError):
        gf.check_code_field(gf.prime_field(29), 16, 3)
