import pytest

import twistlab as tl


@pytest.fixture(scope="session")
def ribe_normalized():
    return tl.normalize_constant(tl.Ribe())


@pytest.fixture(scope="session")
def state4(ribe_normalized):
    xs, ds = tl.make_case_a_inputs(4, 3)
    return tl.run_construction(ribe_normalized, xs, ds, 4)


@pytest.fixture(scope="session")
def state6(ribe_normalized):
    xs, ds = tl.make_case_a_inputs(6, 3)
    return tl.run_construction(ribe_normalized, xs, ds, 6)
