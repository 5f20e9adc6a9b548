#!/usr/bin/env python3
"""Independent numpy oracle for the bundled case-study probability tables.

Builds every state and measurement used by the case studies directly from
its textbook formula (no shared code with the Rust engine) and writes
crates/core/data/expected_probabilities.tsv.

    python3 tools/expected_probabilities.py
"""
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "crates" / "core" / "data" / "expected_probabilities.tsv"

k0 = np.array([1, 0], dtype=complex)
k1 = np.array([0, 1], dtype=complex)
I2 = np.eye(2, dtype=complex)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def spin_up(theta, phi=0.0):
    return np.cos(theta / 2) * k0 + np.exp(1j * phi) * np.sin(theta / 2) * k1


def spin_axis(theta, phi=0.0):
    # Projectors (I +/- n.sigma)/2 for the Bloch axis n(theta, phi).
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    n = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    ns = n[0] * sx + n[1] * sy + n[2] * sz
    return [("up", (I2 + ns) / 2), ("down", (I2 - ns) / 2)]


def joint_spin(a, b):
    out = []
    for la, ea in spin_axis(a):
        for lb, eb in spin_axis(b):
            out.append((f"({la}, {lb})", np.kron(ea, eb)))
    return out


plus = (k0 + k1) / np.sqrt(2)
minus = (k0 - k1) / np.sqrt(2)
interference = [("bright", proj(plus)), ("dark", proj(minus))]
which_path = [("left", proj(k0)), ("right", proj(k1))]

phi_plus = (np.kron(k0, k0) + np.kron(k1, k1)) / np.sqrt(2)
phi_minus = (np.kron(k0, k0) - np.kron(k1, k1)) / np.sqrt(2)
psi_plus = (np.kron(k0, k1) + np.kron(k1, k0)) / np.sqrt(2)
psi_minus = (np.kron(k0, k1) - np.kron(k1, k0)) / np.sqrt(2)
bell_basis = [
    ("phi_plus", proj(phi_plus)),
    ("phi_minus", proj(phi_minus)),
    ("psi_plus", proj(psi_plus)),
    ("psi_minus", proj(psi_minus)),
]
door = [
    ("saw_up", np.diag([1, 0, 1, 0]).astype(complex)),
    ("saw_down", np.diag([0, 1, 0, 1]).astype(complex)),
]


def reduce(rho, keep):
    """Partial trace of a two-qubit density matrix, keeping factor `keep`."""
    r = rho.reshape(2, 2, 2, 2)
    if keep == 0:
        return np.einsum("ajbj->ab", r)
    return np.einsum("jajb->ab", r)


def born(state, effects, keep=None):
    rho = proj(state) if state.ndim == 1 else state
    if keep is not None:
        rho = reduce(rho, keep)
    return [(label, float(np.real(np.trace(e @ rho)))) for label, e in effects]


rows = []


def emit(case, structure, config, dist):
    for label, p in dist:
        rows.append((case, structure, config, label, p))


# stern_gerlach
z_axis = spin_axis(0.0)
x_axis = spin_axis(np.pi / 2)
for name, st in [("prep", spin_up(0.0)), ("tilted", spin_up(np.pi / 3))]:
    emit("stern_gerlach", name, "z_axis", born(st, z_axis))
    emit("stern_gerlach", name, "x_axis", born(st, x_axis))

# double_slit
for k in range(8):
    phase = k * np.pi / 4
    st = (k0 + np.exp(1j * phase) * k1) / np.sqrt(2)
    emit("double_slit", f"open_{k}", "interference", born(st, interference))
    emit("double_slit", f"open_{k}", "which_path", born(st, which_path))
for k in range(8):
    phase = k * np.pi / 4
    st = (np.kron(k0, k0) + np.exp(1j * phase) * np.kron(k1, k1)) / np.sqrt(2)
    emit("double_slit", f"marked_{k}", "interference", born(st, interference, keep=0))
    emit("double_slit", f"marked_{k}", "which_path", born(st, which_path, keep=0))

# singlet_bell
singlet = psi_minus
a, ap, b, bp = 0.0, np.pi / 2, np.pi / 4, 3 * np.pi / 4
emit("singlet_bell", "singlet_state", "equal_angles", born(singlet, joint_spin(0.0, 0.0)))
emit("singlet_bell", "singlet_state", "setting_ab", born(singlet, joint_spin(a, b)))
emit("singlet_bell", "singlet_state", "setting_abp", born(singlet, joint_spin(a, bp)))
emit("singlet_bell", "singlet_state", "setting_apb", born(singlet, joint_spin(ap, b)))
emit("singlet_bell", "singlet_state", "setting_apbp", born(singlet, joint_spin(ap, bp)))
emit("singlet_bell", "singlet_state", "alice_0", born(singlet, spin_axis(a), keep=0))
emit("singlet_bell", "singlet_state", "bob_45", born(singlet, spin_axis(b), keep=1))

# wigner_friend
emit("wigner_friend", "sealed_lab", "friend_reads", born(phi_plus, spin_axis(0.0), keep=1))
emit("wigner_friend", "sealed_lab", "wigner_view", born(phi_plus, bell_basis))
emit("wigner_friend", "sealed_lab", "door", born(phi_plus, door))

with OUT.open("w") as f:
    f.write("# generated by tools/expected_probabilities.py; do not edit\n")
    f.write("# case\tstructure\tconfig\toutcome\tprobability\n")
    for case, s, c, label, p in rows:
        if abs(p) < 1e-15:
            p = 0.0
        f.write(f"{case}\t{s}\t{c}\t{label}\t{p!r}\n")
print(f"wrote {len(rows)} rows to {OUT}")
