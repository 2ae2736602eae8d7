"""Standalone modular-arithmetic recomputation of the two worked negative instances.

Deliberately imports nothing from the package.
"""

# (p=5, u=3, v=1, q=11): 11 | 3^4+3^3+3^2+3+1 = 121, order of v/u mod 11 is 5 = p.
p, u, v, q = 5, 3, 1, 11
assert sum(u**i * v**(4 - i) for i in range(5)) == 121 == q * q
ratio = v * pow(u, -1, q) % q
assert [e for e in range(1, q) if pow(ratio, e, q) == 1][0] == 5
print("instance-1 q mod p^2 =", q % p**2)

# (p=5, u=1, v=3, q=31): xi = 3 has order 30, z = 3^6 = 16 has order 5, kappa = 6.
q, xi, kappa = 31, 3, 6
z = pow(xi, 6, q)
eps = [(1 + xi * pow(z, k, q)) % q for k in range(1, 5)]
powered = [pow(e, kappa, q) for e in eps]
print("instance-2 eps =", eps, "eps^kappa =", powered)
assert (z, eps, powered) == (16, [18, 25, 13, 7], [16, 1, 16, 4])
assert len(set(powered)) > 1  # main congruence fails
