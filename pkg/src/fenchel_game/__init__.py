"""No-regret game dynamics for convex optimization."""

from . import core, dynamics, geometry, kernels, learners, optimizers, problems, verify
from .core import DynamicTrace, FenchelLoss, QuadraticLoss, Side, WeightSchedule
from .dynamics import Composite, GameSpec, GaugeShift, Order, Plain, StronglyConvexShift, equilibrium_gap, run_dynamic
from .geometry import Box, Entropy, GaugeSet, L1Term, L2Ball, LpBall, Simplex, SquaredGauge, SquaredL2, Unconstrained
from .optimizers import ALGORITHMS, OptimizerRun, run_optimizer

__version__ = "0.1.0"
