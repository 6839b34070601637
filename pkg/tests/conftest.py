import math

from hypothesis import HealthCheck, settings, strategies as st

from lenspec.lens import LensParams

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def lenses(draw, q_max=16, n_min=2, n_max=3, spaces=False):
    q = draw(st.integers(1, q_max))
    n = draw(st.integers(n_min, n_max))
    s = draw(st.lists(st.integers(0, q), min_size=n, max_size=n))
    if spaces:
        s = [x if math.gcd(x, q) == 1 else 1 for x in s]
    g = q
    for x in s:
        g = math.gcd(g, x)
    if g != 1:
        s[0] = 1
    return LensParams(q, s)


def pytest_configure(config):
    config.addinivalue_line("markers", "property: randomized or exhaustive invariant checks")
    config.addinivalue_line("markers", "acceptance: acceptance criteria")


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
