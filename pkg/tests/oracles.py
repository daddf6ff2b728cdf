"""Independent reference implementations used only by the tests.

Nothing here imports the package's arithmetic: fields are plain Python
integers, matrices are lists of lists.
"""

from itertools import product


def poly_mulmod(a, b, poly, m):
    """Schoolbook GF(2)[x] product of a and b reduced modulo ``poly``."""
    prod = 0
    for i in range(m):
        if (b >> i) & 1:
            prod ^= a << i
    for deg in range(2 * m - 2, m - 1, -1):
        if (prod >> deg) & 1:
            prod ^= poly << (deg - m)
    return prod


class RefField:
    """Scalar field arithmetic with Python ints."""

    def __init__(self, q, poly=None):
        self.q = q
        self.poly = poly
        self.m = q.bit_length() - 1 if poly else None

    def add(self, a, b):
        return a ^ b if self.poly else (a + b) % self.q

    def sub(self, a, b):
        return a ^ b if self.poly else (a - b) % self.q

    def mul(self, a, b):
        return poly_mulmod(a, b, self.poly, self.m) if self.poly else (a * b) % self.q

    def pow(self, a, e):
        r = 1
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def inv(self, a):
        if self.poly:
            return self.pow(a, self.q - 2)
        return pow(a, -1, self.q)

    def matmul(self, A, B):
        out = []
        for row in A:
            new = []
            for j in range(len(B[0])):
                acc = 0
                for t in range(len(B)):
                    acc = self.add(acc, self.mul(row[t], B[t][j]))
                new.append(acc)
            out.append(new)
        return out

    def rank(self, A):
        M = [list(r) for r in A]
        rank = 0
        cols = len(M[0]) if M else 0
        for c in range(cols):
            piv = next((r for r in range(rank, len(M)) if M[r][c]), None)
            if piv is None:
                continue
            M[rank], M[piv] = M[piv], M[rank]
            inv = self.inv(M[rank][c])
            M[rank] = [self.mul(inv, x) for x in M[rank]]
            for r in range(len(M)):
                if r != rank and M[r][c]:
                    f = M[r][c]
                    M[r] = [self.sub(x, self.mul(f, y)) for x, y in zip(M[r], M[rank])]
            rank += 1
        return rank


def min_weight(ref, G):
    """Minimum Hamming weight of nonzero codewords spanned by the rows of G (brute force)."""
    B, n = len(G), len(G[0])
    best = n + 1
    for coeffs in product(range(ref.q), repeat=B):
        if not any(coeffs):
            continue
        w = 0
        for j in range(n):
            acc = 0
            for i in range(B):
                if coeffs[i]:
                    acc = ref.add(acc, ref.mul(coeffs[i], G[i][j]))
            w += acc != 0
        best = min(best, w)
    return best
