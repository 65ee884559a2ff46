import itertools

import numpy as np
from hypothesis import given, settings, strategies as st

from tmfdual import zmod
from tmfdual.zmod import DTYPE, Subgroup, kernel_rows, matmul

N = 3


def matrices(max_rows=5, max_cols=4):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, (1 << N) - 1), min_size=c, max_size=c),
                           min_size=0, max_size=max_rows).map(lambda rows: (np.array(rows, dtype=DTYPE).reshape(-1, c), c)))


def span(rows, n):
    """Brute-force span of the rows in (Z/2^N)^n."""
    out = {tuple([0] * n)}
    for r in rows:
        new = set()
        for v in out:
            for k in range(1 << N):
                new.add(tuple((a + k * int(b)) % (1 << N) for a, b in zip(v, r)))
        out = new
    return out


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_order_and_membership_match_brute_force(mc):
    mat, n = mc
    H = Subgroup.generated_by(mat, n, N)
    S = span(mat, n)
    assert 2 ** H.log_order() == len(S)
    for v in itertools.islice(itertools.product(range(1 << N), repeat=n), 200):
        assert H.contains(np.array(v, dtype=DTYPE)) == (v in S)


@settings(max_examples=60, deadline=None)
@given(matrices(6, 5))
def test_backends_agree(mc):
    mat, n = mc
    a = zmod.howell_reduce_py(mat, n, N)
    b = zmod.howell_reduce(mat, n, N)
    assert list(a[1]) == list(b[1]) and list(a[2]) == list(b[2])
    ha, hb = Subgroup(a[0], a[1], a[2], n, N), Subgroup(b[0], b[1], b[2], n, N)
    assert ha == hb


def test_kernel_rows():
    # images of e1, e2 under x -> 2x in Z/8; kernel modulo 4Z/8 is everything with 2x in 4Z
    images = np.array([[2], [4]], dtype=DTYPE)
    tracked = np.eye(2, dtype=DTYPE)
    modulo = Subgroup.generated_by(np.array([[4]], dtype=DTYPE), 1, N)
    K = Subgroup.generated_by(kernel_rows(images, tracked, modulo, N), 2, N)
    assert K.contains(np.array([2, 0], dtype=DTYPE))
    assert K.contains(np.array([0, 1], dtype=DTYPE))
    assert not K.contains(np.array([1, 0], dtype=DTYPE))


def test_matmul_wraps_mod():
    a = np.array([[7, 7]], dtype=DTYPE)
    b = np.array([[7], [7]], dtype=DTYPE)
    assert matmul(a, b, N)[0, 0] == (98 % 8)


def test_backend_flag():
    assert zmod.BACKEND in ("cython", "python")


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys
    env = dict(os.environ, TMFDUAL_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tmfdual import zmod; print(zmod.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
