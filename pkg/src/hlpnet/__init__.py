"""Nets-within-nets motion planning for heterogeneous robot teams.

A team of robots (one state-machine Petri net each) and a mission net are
synchronized by a global guard; plans are found by seeded simulation and
checked against an explicit product-space search.
"""

from hlpnet.environment import Cell, Environment, Region
from hlpnet.errors import (
    CapacityError,
    HLPNError,
    InputError,
    LTLSyntaxError,
    SemanticsError,
    StateBoundExceeded,
    StructuralError,
    UnderflowError,
)
from hlpnet.gef import Binding, gef
from hlpnet.multiset import Bag
from hlpnet.robot_net import RobotOPN, build_robot_net
from hlpnet.spec_net import Guard, SpecOPN
from hlpnet.system import HLPNState, enabled_bindings, fire_binding, initial_state

__version__ = "0.1.0"

__all__ = [
    "Bag",
    "Binding",
    "CapacityError",
    "Cell",
    "Environment",
    "Guard",
    "HLPNError",
    "HLPNState",
    "InputError",
    "LTLSyntaxError",
    "Region",
    "RobotOPN",
    "SemanticsError",
    "SpecOPN",
    "StateBoundExceeded",
    "StructuralError",
    "UnderflowError",
    "build_robot_net",
    "enabled_bindings",
    "fire_binding",
    "gef",
    "initial_state",
]
