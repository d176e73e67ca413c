import math

import pytest

COS_FIXED_POINT = 0.7390851332151607


def cos_oracle(x0: float = 0.5, n: int = 1000) -> float:
    x = x0
    for _ in range(n):
        x = math.cos(x)
    return x


@pytest.fixture(scope="session")
def cos_limit():
    x = cos_oracle()
    assert x == pytest.approx(COS_FIXED_POINT, abs=1e-15)
    return x
