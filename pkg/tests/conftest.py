import pytest

from topcert.generate import detour_task, t1, two_goals
from topcert.plans import plans_from_names


@pytest.fixture
def t1c():
    return t1(with_c=True)


@pytest.fixture
def t1_plain():
    return t1(with_c=False)


@pytest.fixture
def goals2():
    return two_goals()


@pytest.fixture
def detour():
    return detour_task()


def plans(task, *seqs):
    """Validated plans from space-separated action names."""
    return plans_from_names(task, [s.split() if s else [] for s in seqs])
