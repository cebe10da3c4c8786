"""Instance builders shared by the test modules."""

import numpy as np

from qsfddvv import MapInstance, Sff, SpaceFormAmbient, standard_quaternionic_structure
from qsfddvv.quatlin import AdaptedFrame, quaternionic_basis, random_orthogonal

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def make_instance(c, zeta, frame=None, n=None):
    """Instance with the standard structure; zeta is padded with zero normal matrices up to q = n - r."""
    zeta = np.asarray(zeta, dtype=float)
    q0, r, _ = zeta.shape
    if n is None:
        n = 4 * -(-(r + q0) // 4)
    full = np.zeros((n - r, r, r))
    full[:q0] = zeta
    cols = np.eye(n) if frame is None else frame
    return MapInstance(SpaceFormAmbient(c, standard_quaternionic_structure(n // 4)), AdaptedFrame(r, cols), Sff(full))


def sigma_instance(c=0.0):
    return make_instance(c, np.stack([SIGMA_X, SIGMA_Z]))


def random_frame(n, rng):
    return random_orthogonal(n, rng)


def j_invariant_frame(n, rng):
    return quaternionic_basis(standard_quaternionic_structure(n // 4), rng)
