"""Independent reference implementations used as test oracles.

Nothing here imports the package; everything is built from dense matrices and
plain Python loops so agreement with the optimized code is meaningful.
"""

import math
from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def rx(t):
    return math.cos(t / 2) * I2 - 1j * math.sin(t / 2) * X


def ry(t):
    return math.cos(t / 2) * I2 - 1j * math.sin(t / 2) * Y


def rz(t):
    return math.cos(t / 2) * I2 - 1j * math.sin(t / 2) * Z


def rot(phi, theta, omega):
    return rz(omega) @ ry(theta) @ rz(phi)


def kron_all(ops):
    return reduce(np.kron, ops)


def lift(mat, qubit, n):
    """Full ``2**n`` operator; qubit 0 is the least significant bit, i.e. rightmost factor."""
    ops = [I2] * n
    ops[n - 1 - qubit] = mat
    return kron_all(ops)


def lift_cnot(control, target, n):
    a = [I2] * n
    b = [I2] * n
    a[n - 1 - control] = P0
    b[n - 1 - control] = P1
    b[n - 1 - target] = X
    return kron_all(a) + kron_all(b)


def zero(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1
    return v


def z_expectation(psi, qubit, n):
    return float(np.real(np.vdot(psi, lift(Z, qubit, n) @ psi)))


def sel_reference(weights, n):
    """Dense unitary of the strongly entangling layers."""
    L = weights.shape[0]
    U = np.eye(2**n, dtype=complex)
    for layer in range(L):
        for q in range(n):
            U = lift(rot(*weights[layer, q]), q, n) @ U
        if n == 2:
            U = lift_cnot(0, 1, n) @ U
        elif n > 2:
            r = layer % (n - 1) + 1
            for q in range(n):
                U = lift_cnot(q, (q + r) % n, n) @ U
    return U


def model_reference(order, x, weights, n, readout=0):
    psi = zero(n)
    for q in range(n):
        psi = lift(rx(x[order[2 * q]]), q, n) @ psi
        psi = lift(ry(x[order[2 * q + 1]]), q, n) @ psi
    psi = sel_reference(weights, n) @ psi
    return z_expectation(psi, readout, n)


def silhouette_loop(points, labels):
    """Textbook O(N^2) silhouette with the same left-to-right summation order."""
    pts = [list(map(float, p)) for p in points]
    labs = list(labels)
    classes = sorted(set(labs))
    n = len(pts)

    def dist(i, j):
        s = 0.0
        for a, b in zip(pts[i], pts[j]):
            d = a - b
            s += d * d
        return math.sqrt(s)

    size = {c: labs.count(c) for c in classes}
    total = 0.0
    for i in range(n):
        sums = {c: 0.0 for c in classes}
        for j in range(n):
            sums[labs[j]] += dist(i, j)
        own = labs[i]
        a = sums[own] / (size[own] - 1)
        b = min(sums[c] / size[c] for c in classes if c != own)
        total += 0.0 if max(a, b) == 0 else (b - a) / max(a, b)
    return total / n
