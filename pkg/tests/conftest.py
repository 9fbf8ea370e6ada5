import pytest

from nuddlab import mpcore


@pytest.fixture(autouse=True)
def _restore_precision():
    old = mpcore.get_precision()
    yield
    mpcore.set_precision(old)
