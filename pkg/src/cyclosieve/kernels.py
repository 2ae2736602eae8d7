"""Hot numeric kernels for the scan engine.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with the same signature.  The numba path is used when numba imports
and ``CYCLOSIEVE_NO_NUMBA`` is unset (or ``0``); setting it to ``1`` forces
the numpy path, which is also what you get when numba is missing.

All kernels work on ``int64`` arrays and require the modulus ``q < 2**31`` so
that a product of two residues never leaves ``int64``.  Exponents are passed
as little-endian bit arrays, so they may be arbitrarily large.
"""

from __future__ import annotations

import os

import numpy as np

MAX_KERNEL_MODULUS = 2**31

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("CYCLOSIEVE_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")
BACKEND = "numba" if (numba is not None and not _DISABLED) else "numpy"


def exponent_bits(e: int) -> np.ndarray:
    """Little-endian bits of a non-negative integer as a uint8 array."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    return np.array([int(c) for c in reversed(bin(e)[2:])], dtype=np.uint8) if e else np.zeros(0, np.uint8)


# --------------------------------------------------------------------------
# numpy implementations

def _powmod_numpy(base, bits, q):
    b = np.asarray(base, dtype=np.int64) % q
    result = np.ones_like(b) % q
    for bit in bits:
        if bit:
            result = result * b % q
        b = b * b % q
    return result


def _ext_mul_numpy(a, b, modulus, q):
    n, f = a.shape
    prod = np.zeros((n, 2 * f - 1), dtype=np.int64)
    for i in range(f):
        prod[:, i:i + f] = (prod[:, i:i + f] + a[:, i:i + 1] * b) % q
    for deg in range(2 * f - 2, f - 1, -1):
        lead = prod[:, deg:deg + 1]
        # modulus is one shared row or one row per element
        prod[:, deg - f:deg] = (prod[:, deg - f:deg] - lead * modulus[..., :f]) % q
    return prod[:, :f].copy()


def _ext_powmod_numpy(base, bits, modulus, q):
    b = np.asarray(base, dtype=np.int64) % q
    modulus = np.asarray(modulus, dtype=np.int64)
    result = np.zeros_like(b)
    result[:, 0] = 1 % q
    for bit in bits:
        if bit:
            result = _ext_mul_numpy(result, b, modulus, q)
        b = _ext_mul_numpy(b, b, modulus, q)
    return result


def _frobenius_numpy(moduli, bits, q):
    # X^(q^k) mod g_i for k = 1..f, one monic g_i per row.  Only h = X^q is
    # a real power; later ones are compositions X^(q^(k+1)) = c(h), c = X^(q^k).
    n, f1 = moduli.shape
    f = f1 - 1
    out = np.zeros((n, f, f), dtype=np.int64)
    x = np.zeros((n, f), dtype=np.int64)
    x[:, 1] = 1
    h = _ext_powmod_numpy(x, bits, moduli, q)
    out[:, 0] = h
    for k in range(1, f):
        c = out[:, k - 1]
        acc = np.zeros((n, f), dtype=np.int64)
        acc[:, 0] = c[:, f - 1]
        for j in range(f - 2, -1, -1):
            acc = _ext_mul_numpy(acc, h, moduli, q)
            acc[:, 0] = (acc[:, 0] + c[:, j]) % q
        out[:, k] = acc
    return out


def _match_powers_numpy(values, table):
    # values (N, f); table (N, m, f) -> index j with table[i, j] == values[i], else -1
    hits = np.all(table == values[:, None, :], axis=2)
    found = hits.any(axis=1)
    return np.where(found, hits.argmax(axis=1), -1).astype(np.int64)


def _bernoulli_even_numpy(p, inverses):
    # B_0, B_2, ..., B_{p-3} mod p from sum_{j<=m} C(m+1, j) B_j = 0.
    top = p - 3
    bern = np.zeros(top // 2 + 1, dtype=np.int64)
    bern[0] = 1
    half = inverses[2]
    row = np.zeros(top + 2, dtype=np.int64)  # Pascal row C(m+1, .) mod p
    row[0] = 1
    row[1] = 1  # row for m+1 = 1
    for m in range(1, top + 1):
        nxt = row.copy()
        nxt[1:] = (row[1:] + row[:-1]) % p
        row = nxt  # now C(m+1, .)
        if m % 2:
            continue
        s = int(np.dot(row[0:m:2], bern[: m // 2]) % p)
        s = (s - row[1] * half) % p  # B_1 = -1/2
        bern[m // 2] = (-s * inverses[m + 1]) % p
    return bern


# --------------------------------------------------------------------------
# numba implementations

if numba is not None:
    _njit = numba.njit(cache=True, nogil=True)

    @_njit
    def _powmod_numba(base, bits, q):
        n = base.shape[0]
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            b = base[i] % q
            r = 1 % q
            for t in range(bits.shape[0]):
                if bits[t]:
                    r = r * b % q
                b = b * b % q
            out[i] = r
        return out

    @_njit
    def _ext_mul_row(a, b, modulus, q, prod, out):
        f = a.shape[0]
        for i in range(2 * f - 1):
            prod[i] = 0
        for i in range(f):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(f):
                prod[i + j] = (prod[i + j] + ai * b[j]) % q
        for deg in range(2 * f - 2, f - 1, -1):
            lead = prod[deg]
            if lead == 0:
                continue
            for j in range(f):
                prod[deg - f + j] = (prod[deg - f + j] - lead * modulus[j]) % q
        for i in range(f):
            out[i] = prod[i]

    @_njit
    def _ext_powmod_numba(base, bits, modulus, q):
        n, f = base.shape
        out = np.zeros((n, f), dtype=np.int64)
        prod = np.zeros(2 * f - 1, dtype=np.int64)
        b = np.zeros(f, dtype=np.int64)
        r = np.zeros(f, dtype=np.int64)
        tmp = np.zeros(f, dtype=np.int64)
        for i in range(n):
            for j in range(f):
                b[j] = base[i, j] % q
                r[j] = 0
            r[0] = 1 % q
            for t in range(bits.shape[0]):
                if bits[t]:
                    _ext_mul_row(r, b, modulus, q, prod, tmp)
                    r[:] = tmp
                _ext_mul_row(b, b, modulus, q, prod, tmp)
                b[:] = tmp
            out[i, :] = r
        return out

    @_njit
    def _frobenius_numba(moduli, bits, q):
        n, f1 = moduli.shape
        f = f1 - 1
        out = np.zeros((n, f, f), dtype=np.int64)
        prod = np.zeros(2 * f - 1, dtype=np.int64)
        b = np.zeros(f, dtype=np.int64)
        r = np.zeros(f, dtype=np.int64)
        tmp = np.zeros(f, dtype=np.int64)
        for i in range(n):
            g = moduli[i]
            b[:] = 0
            b[1] = 1
            r[:] = 0
            r[0] = 1
            for t in range(bits.shape[0]):
                if bits[t]:
                    _ext_mul_row(r, b, g, q, prod, tmp)
                    r[:] = tmp
                _ext_mul_row(b, b, g, q, prod, tmp)
                b[:] = tmp
            out[i, 0, :] = r  # h = X^q
            for k in range(1, f):
                # Horner: X^(q^(k+1)) = c(h) with c = X^(q^k)
                b[:] = 0
                b[0] = out[i, k - 1, f - 1]
                for j in range(f - 2, -1, -1):
                    _ext_mul_row(b, out[i, 0], g, q, prod, tmp)
                    b[:] = tmp
                    b[0] = (b[0] + out[i, k - 1, j]) % q
                out[i, k, :] = b
        return out

    @_njit
    def _match_powers_numba(values, table):
        n, m, f = table.shape
        out = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            for j in range(m):
                same = True
                for c in range(f):
                    if table[i, j, c] != values[i, c]:
                        same = False
                        break
                if same:
                    out[i] = j
                    break
        return out

    @_njit
    def _bernoulli_even_numba(p, inverses):
        top = p - 3
        bern = np.zeros(top // 2 + 1, dtype=np.int64)
        bern[0] = 1
        half = inverses[2]
        row = np.zeros(top + 2, dtype=np.int64)
        row[0] = 1
        row[1] = 1
        for m in range(1, top + 1):
            for j in range(m + 1, 0, -1):
                row[j] = (row[j] + row[j - 1]) % p
            if m % 2:
                continue
            s = 0
            for j in range(0, m, 2):
                s = (s + row[j] * bern[j // 2]) % p
            s = (s - row[1] * half) % p
            bern[m // 2] = (-s * inverses[m + 1]) % p
        return bern


IMPLEMENTATIONS = {
    "numpy": {
        "powmod": _powmod_numpy,
        "ext_powmod": _ext_powmod_numpy,
        "frobenius": _frobenius_numpy,
        "match_powers": _match_powers_numpy,
        "bernoulli_even": _bernoulli_even_numpy,
    },
}
if numba is not None:
    IMPLEMENTATIONS["numba"] = {
        "powmod": _powmod_numba,
        "ext_powmod": _ext_powmod_numba,
        "frobenius": _frobenius_numba,
        "match_powers": _match_powers_numba,
        "bernoulli_even": _bernoulli_even_numba,
    }


def _check_modulus(q):
    if not 1 < q < MAX_KERNEL_MODULUS:
        raise ValueError(f"kernel modulus must satisfy 1 < q < 2**31, got {q}")


def powmod_array(base, exponent: int, q: int, backend: str | None = None) -> np.ndarray:
    """Elementwise ``base**exponent mod q`` over a 1-d int64 array."""
    _check_modulus(q)
    impl = IMPLEMENTATIONS[backend or BACKEND]["powmod"]
    return impl(np.ascontiguousarray(base, dtype=np.int64), exponent_bits(exponent), np.int64(q))


def ext_powmod_array(base, exponent: int, modulus, q: int, backend: str | None = None) -> np.ndarray:
    """Row-wise powers in F_q[X]/(modulus).

    ``base`` has shape (N, f), low coefficient first; ``modulus`` is monic of
    degree f given by its f+1 coefficients, low first.
    """
    _check_modulus(q)
    base = np.ascontiguousarray(base, dtype=np.int64)
    modulus = np.ascontiguousarray(modulus, dtype=np.int64)
    if base.ndim != 2 or modulus.shape[0] != base.shape[1] + 1:
        raise ValueError("shape mismatch between elements and modulus")
    impl = IMPLEMENTATIONS[backend or BACKEND]["ext_powmod"]
    return impl(base, exponent_bits(exponent), modulus, np.int64(q))


def ext_mul_array(a, b, modulus, q: int) -> np.ndarray:
    """Row-wise product of two (B, f) coefficient arrays mod (modulus, q).  Vectorized numpy."""
    _check_modulus(q)
    a = np.asarray(a, dtype=np.int64) % q
    b = np.asarray(b, dtype=np.int64) % q
    return _ext_mul_numpy(a, b, np.asarray(modulus, dtype=np.int64), q)


def frobenius_powers(moduli, q: int, backend: str | None = None) -> np.ndarray:
    """``X^(q^k) mod g`` for k = 1..f and each monic g of degree f >= 2.

    ``moduli`` has shape (B, f+1), low coefficient first.  The result has
    shape (B, f, f); entry [b, k-1] is the residue for k.
    """
    _check_modulus(q)
    moduli = np.ascontiguousarray(moduli, dtype=np.int64)
    if moduli.ndim != 2 or moduli.shape[1] < 3 or np.any(moduli[:, -1] != 1):
        raise ValueError("expected monic moduli of degree >= 2, one per row")
    impl = IMPLEMENTATIONS[backend or BACKEND]["frobenius"]
    return impl(moduli % q, exponent_bits(q), np.int64(q))


def match_powers(values, table, backend: str | None = None) -> np.ndarray:
    """For each row i return j with ``table[i, j] == values[i]`` or -1."""
    impl = IMPLEMENTATIONS[backend or BACKEND]["match_powers"]
    return impl(np.ascontiguousarray(values, dtype=np.int64), np.ascontiguousarray(table, dtype=np.int64))


def bernoulli_even_mod_p(p: int, backend: str | None = None) -> np.ndarray:
    """Residues of B_0, B_2, ..., B_{p-3} modulo the odd prime p (index i holds B_{2i})."""
    if p < 5:
        return np.array([1], dtype=np.int64)
    if p > 10**6:
        raise ValueError("p too large for the quadratic Bernoulli recurrence")
    inverses = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inverses[a] = pow(a, -1, p)
    impl = IMPLEMENTATIONS[backend or BACKEND]["bernoulli_even"]
    return impl(np.int64(p), inverses)
