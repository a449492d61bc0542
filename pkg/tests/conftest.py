import pytest

from itruth import (
    ClassSpec,
    KripkeStructure,
    Or,
    Tr,
    Universe,
    code,
    neg,
    parse,
    quote,
)

@pytest.fixture(scope="session")
def zero_eq():
    return parse("0=0")


@pytest.fixture(scope="session")
def tr_zero(zero_eq):
    return Tr(quote(zero_eq))


@pytest.fixture(scope="session")
def u1(zero_eq):
    """One-atom universe."""
    return Universe.from_formulas([zero_eq])


@pytest.fixture(scope="session")
def u4(zero_eq, tr_zero):
    """The four-member universe used by the monotonicity sweeps."""
    return Universe.from_formulas([zero_eq, tr_zero, neg(zero_eq), neg(tr_zero)])


@pytest.fixture(scope="session")
def u5(zero_eq, tr_zero):
    """Adds the truth excluded-middle disjunction."""
    return Universe.from_formulas(
        [zero_eq, tr_zero, neg(zero_eq), neg(tr_zero), Or(tr_zero, neg(tr_zero))]
    )


@pytest.fixture(scope="session")
def spec_u4(u4):
    return ClassSpec(3, u4, 2)


@pytest.fixture(scope="session")
def spec_u5(u5):
    return ClassSpec(3, u5, 2)


@pytest.fixture(scope="session")
def spec_small(u1):
    return ClassSpec(2, u1, 2)


def chain2(code_top, bound=2):
    """The two-world chain with an empty root: the canonical countermodel."""
    return KripkeStructure.build(
        ["w0", "w1"], [("w0", "w1")], {"w1": list(code_top)}, bound
    )


@pytest.fixture(scope="session")
def em_chain(zero_eq):
    return chain2([code(zero_eq)])
