import itertools

from hypothesis import HealthCheck, settings, strategies as st

from permchain.perm import flatten

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def perms(min_size=1, max_size=8):
    """Hypothesis strategy for permutations of 1..n."""
    return st.integers(min_size, max_size).flatmap(
        lambda n: st.permutations(range(1, n + 1)).map(tuple)
    )


def naive_contains(host, pattern):
    k = len(pattern)
    return any(
        flatten([host[i] for i in c]) == tuple(pattern)
        for c in itertools.combinations(range(len(host)), k)
    )


def naive_patterns(p, length):
    return {flatten([p[i] for i in c]) for c in itertools.combinations(range(len(p)), length)}
