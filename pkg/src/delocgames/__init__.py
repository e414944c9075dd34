"""Delocalised-interaction quantum games.

Exact win probabilities for the particle/no-particle and Bell-distinguishing
games, two-qubit entanglement measures and the bounds they induce, analytic
tactic constructions, numerical optimization over local unitaries, spectral
trace-distance inequalities, and a noisy four-qubit demonstration simulator.
"""

__version__ = "0.1.0"

from . import circuits, games, inequalities, measures, optimizer, qcore, stateio, tactics  # noqa: F401
from .games import GameSpec, Tactic  # noqa: F401
from .qcore import DensityMatrix, PureState, named_state  # noqa: F401
